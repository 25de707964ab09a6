#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "graphsde/assembly.hpp"
#include "graphsde/noise.hpp"
#include "graphsde/reaction.hpp"
#include "graphsde/rng.hpp"

namespace graphsde {

enum class Scheme {
  DeterministicCN,    // Crank-Nicolson on the linear part, no drift/noise terms
  SemiImplicitTamed,  // tamed reaction + noise at u, one implicit linear solve
  SplitStep,          // tamed reaction substep, noise at u*, implicit solve
};

struct SolverConfig {
  double T = 1.0;
  double dt = 1e-3;
  Scheme scheme = Scheme::SplitStep;
  std::uint64_t seed = 0;
  double taming = 1.0;            // theta in  dt f / (1 + theta dt |f|)
  std::size_t output_stride = 1;  // snapshot every this many steps
  std::size_t n_paths = 1;
  std::vector<std::size_t> probe_dofs;
  bool record_snapshots = false;
  /// Noise increments are sums of this many fine draws per step; the fine
  /// grid has width dt / noise_substeps. A run at (2 dt, 2 s) is driven by
  /// exactly the same Brownian path as one at (dt, s).
  std::size_t noise_substeps = 1;
  std::vector<double> moment_orders = {4.0};

  std::size_t num_steps() const {
    return static_cast<std::size_t>(std::llround(T / dt));
  }
};

struct PathSample {
  std::uint64_t path_index = 0;
  std::uint64_t seed = 0;
  bool blew_up = false;
  std::size_t blowup_step = 0;
  double sup_norm = 0.0;  // sup over time of the sup-norm on the graph
  Eigen::VectorXd final_state;
  std::vector<double> snapshot_times;
  std::vector<Eigen::VectorXd> snapshots;          // only when recorded
  std::vector<std::vector<double>> probe_series;   // [probe][step], every step
};

struct EnsembleStats {
  std::size_t n_paths = 0;
  std::size_t blowup_count = 0;
  /// Across-path mean and unbiased variance of each probe at final time
  /// (blown-up paths excluded).
  std::vector<double> probe_mean;
  std::vector<double> probe_variance;
  /// (q, estimate of E sup_t ||u(t)||_inf^q) for each configured order.
  std::vector<std::pair<double, double>> sup_moments;
};

/// Time integrator for one fixed (operator, reaction, noise, config). Owns
/// the factorizations it needs; create one per worker thread and share the
/// immutable DiscreteOperator.
class Integrator {
public:
  Integrator(const DiscreteOperator& op, const ReactionSpec& reaction,
             const NoiseSpec& noise, const SolverConfig& cfg);
  Integrator(const DiscreteOperator& op, const ReactionSpec& reaction,
             const NoiseSpec& noise, const SolverConfig& cfg,
             PreparedKernel kernel);

  const SolverConfig& config() const { return cfg_; }
  const DiscreteOperator& op() const { return *op_; }

  /// Crank-Nicolson step of the full linear generator (diffusion, potential,
  /// coupling and convection); direct sparse solve.
  Eigen::VectorXd step_deterministic(const Eigen::VectorXd& u) const;

  /// Implicit Euler resolvent step on the linear part only; the propagator
  /// behind the positivity / sub-Markov checks.
  Eigen::VectorXd step_implicit_euler(const Eigen::VectorXd& u) const;

  /// One stochastic step at step index `step` of the path's stream.
  Eigen::VectorXd step_stochastic(const Eigen::VectorXd& u,
                                  std::uint64_t step,
                                  const rng::Stream& stream) const;

  /// Full trajectory from xi over num_steps() steps. Non-finite values set
  /// the blow-up flag and abort the path, never the ensemble.
  PathSample simulate_path(std::uint64_t path_index,
                           const GridFunction& xi) const;

private:
  Eigen::VectorXd reaction_term(const Eigen::VectorXd& u,
                                std::uint64_t step,
                                const rng::Stream& stream) const;
  Eigen::VectorXd noise_term(const Eigen::VectorXd& u_eval,
                             std::uint64_t step,
                             const rng::Stream& stream) const;

  const DiscreteOperator* op_;
  const ReactionSpec* reaction_;
  const NoiseSpec* noise_;
  SolverConfig cfg_;
  PreparedKernel kernel_;
  std::vector<std::vector<NodalSite>> sites_;

  SparseMat cn_rhs_;
  bool symmetric_ = false;
  Eigen::SimplicialLDLT<SparseMat> cn_chol_, ie_chol_;
  std::unique_ptr<Eigen::SparseLU<SparseMat>> cn_lu_, ie_lu_;
};

/// Convenience wrapper matching the single-path contract.
PathSample simulate_path(const DiscreteOperator& op,
                         const ReactionSpec& reaction, const NoiseSpec& noise,
                         const SolverConfig& cfg, const GridFunction& xi);

/// Runs cfg.n_paths independent paths on `threads` workers. Path p uses the
/// substream (cfg.seed, p), so results are bitwise independent of the worker
/// count and doubling n_paths reproduces the first half exactly. The
/// observer, when set, is invoked once per path from the worker that ran it;
/// observers must only touch per-index state. Reductions happen afterwards
/// in path-index order.
EnsembleStats run_ensemble(
    const DiscreteOperator& op, const ReactionSpec& reaction,
    const NoiseSpec& noise, const SolverConfig& cfg, const GridFunction& xi,
    unsigned threads = 1,
    const std::function<void(std::size_t, const PathSample&)>& observer = {},
    const PreparedKernel* kernel = nullptr);

}  // namespace graphsde
