#pragma once

#include <cmath>
#include <cstdint>

namespace graphsde::rng {

/// Algorithm tag recorded in every output header.
inline constexpr const char* kAlgorithm = "mix64-chain/box-muller";

/// splitmix64 finalizer; full-avalanche 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Draw domains keep distinct uses of the stream disjoint.
enum class Domain : std::uint64_t {
  WhiteNoise = 1,
  ColouredNoise = 2,
  Reaction = 3,
  Test = 4,
};

/// Counter-based stream keyed by (seed, path). Every draw is a pure function
/// of (seed, path, domain, step, slot, draw): workers can consume draws in
/// any order without changing any value, coarse integrators can re-read the
/// fine-step draws of a coupled refinement run, and path streams never
/// overlap.
class Stream {
public:
  Stream(std::uint64_t seed, std::uint64_t path)
      : base_(mix64(mix64(seed ^ 0x6A09E667F3BCC909ull) ^
                    mix64(path ^ 0xBB67AE8584CAA73Bull))) {}

  std::uint64_t word(Domain domain, std::uint64_t step, std::uint64_t slot,
                     std::uint64_t draw) const {
    std::uint64_t s = mix64(base_ ^ static_cast<std::uint64_t>(domain));
    s = mix64(s ^ step);
    s = mix64(s ^ slot);
    return mix64(s ^ draw);
  }

  /// Uniform in [0,1) from the top 53 bits.
  double uniform(Domain domain, std::uint64_t step, std::uint64_t slot,
                 std::uint64_t draw) const {
    return static_cast<double>(word(domain, step, slot, draw) >> 11) *
           0x1.0p-53;
  }

  /// Standard normal via Box-Muller on draws (2d, 2d+1).
  double normal(Domain domain, std::uint64_t step, std::uint64_t slot,
                std::uint64_t draw = 0) const {
    const double u1 = 1.0 - uniform(domain, step, slot, 2 * draw);  // (0,1]
    const double u2 = uniform(domain, step, slot, 2 * draw + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

private:
  std::uint64_t base_;
};

}  // namespace graphsde::rng
