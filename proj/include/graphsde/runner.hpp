#pragma once

#include <string>
#include <utility>
#include <vector>

#include "graphsde/config.hpp"

namespace graphsde {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::string out_dir = "out";
  unsigned threads = 1;  // worker pool size; never affects results
  bool quiet = false;
  std::string task_override;  // empty = use the config's task
  long long seed_override = -1;  // < 0 = use the config's seed
};

/// Exit codes: 0 success, 2 config error, 3 numerical failure,
/// 4 blow-up rate exceeded.
struct ResultBundle {
  int exit_code = 0;
  std::vector<std::pair<std::string, std::string>> summary;  // ordered
  std::vector<std::string> files;  // paths written, summary.txt last
};

/// Dispatches the configured task and writes the bundle (summary.txt, the
/// normalized config, and per-task CSV tables) into out_dir. Every file
/// carries the tool version, config hash, seed and RNG algorithm in its
/// header; identical config + seed produce byte-identical bundles
/// independent of the thread count.
ResultBundle run(const ExperimentConfig& cfg, const RunOptions& opts);

/// Parses and runs. The validate task parses leniently and reports
/// assumption violations in the summary instead of failing the parse.
ResultBundle run_config_text(const std::string& text, const RunOptions& opts);

/// All result files in a bundle must carry one config hash; a mismatch or a
/// missing header is an error.
bool verify_bundle(const std::string& dir, std::string* error = nullptr);

}  // namespace graphsde
