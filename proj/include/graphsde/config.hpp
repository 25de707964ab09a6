#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphsde/dynamics.hpp"
#include "graphsde/graph.hpp"
#include "graphsde/noise.hpp"
#include "graphsde/reaction.hpp"

namespace graphsde {

enum class Task { Simulate, Ensemble, Convergence, Hoelder, Spectrum, Validate };

struct ProbeSpec {
  std::string edge_id;
  double x = 0.0;
};

/// Parse or semantic error with source position.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::size_t line, std::size_t column, const std::string& msg);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_, column_;
};

struct ExperimentConfig {
  MetricGraph graph;
  ReactionSpec reaction;
  NoiseSpec noise;
  ValidationOptions validation;  // row-sum strictness margin, overridable
  std::vector<Profile> initial;  // one per edge
  double mesh_h = 0.05;
  SolverConfig solver;  // probe_dofs resolved against the mesh at run time
  std::vector<ProbeSpec> probes;
  Task task = Task::Validate;
  std::size_t convergence_levels = 4;
  std::size_t spectrum_count = 8;
  std::vector<std::size_t> hoelder_lags = {8, 16, 32, 64, 128};
  double max_blowup_rate = 1.0;
};

/// Sectioned key-value text with inline arrays; see README for the format.
/// With enforce_assumptions the graph must satisfy every standing assumption
/// or a positioned ConfigError is thrown; the validate task parses leniently
/// and reports instead.
ExperimentConfig parse_config(const std::string& text,
                              bool enforce_assumptions = true);

/// Canonical emission: parsing the result reproduces an equivalent config
/// (identical normal form). The config hash is taken over this text.
std::string normalize_config(const ExperimentConfig& cfg);

/// 16-hex-digit fingerprint of the normal form.
std::string config_hash(const ExperimentConfig& cfg);

std::string task_name(Task t);

/// Inverse of task_name; throws std::invalid_argument on unknown names.
Task task_from_name(const std::string& name);

}  // namespace graphsde
