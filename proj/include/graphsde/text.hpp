#pragma once

#include <cstdint>
#include <string>

namespace graphsde {

/// Shortest round-trippable decimal rendering used for all emitted numbers;
/// goldens stay bit-stable without binary formats.
std::string fmt_g17(double v);

/// FNV-1a 64-bit; rendered as 16 hex digits. Content fingerprint for result
/// bundles, not cryptographic.
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace graphsde
