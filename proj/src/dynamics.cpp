#include "graphsde/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace graphsde {

Integrator::Integrator(const DiscreteOperator& op, const ReactionSpec& reaction,
                       const NoiseSpec& noise, const SolverConfig& cfg)
    : Integrator(op, reaction, noise, cfg,
                 noise.kind == NoiseKind::Coloured
                     ? PreparedKernel(noise.modes, *op.mesh)
                     : PreparedKernel()) {}

Integrator::Integrator(const DiscreteOperator& op, const ReactionSpec& reaction,
                       const NoiseSpec& noise, const SolverConfig& cfg,
                       PreparedKernel kernel)
    : op_(&op),
      reaction_(&reaction),
      noise_(&noise),
      cfg_(cfg),
      kernel_(std::move(kernel)),
      sites_(nodal_sites(*op.mesh)) {
  if (!(cfg_.dt > 0.0) || cfg_.T < cfg_.dt)
    throw std::invalid_argument("SolverConfig: need dt > 0 and T >= dt");
  if (cfg_.noise_substeps == 0)
    throw std::invalid_argument("SolverConfig: noise_substeps must be >= 1");
  if (cfg_.scheme == Scheme::DeterministicCN &&
      (!reaction.trivial() || !noise.trivial()))
    throw std::invalid_argument(
        "deterministic-cn integrates the linear part only; "
        "use split-step or semi-implicit-tamed with reaction or noise");

  const double dt = cfg_.dt;
  SparseMat drift = op.stiffness;
  if (op.has_drift) drift -= op.convection;
  SparseMat cn_lhs = op.mass + (0.5 * dt) * drift;
  cn_rhs_ = op.mass - (0.5 * dt) * drift;
  SparseMat ie_lhs = op.mass + dt * drift;

  symmetric_ = !op.has_drift;
  if (symmetric_) {
    cn_chol_.compute(cn_lhs);
    ie_chol_.compute(ie_lhs);
    if (cn_chol_.info() != Eigen::Success || ie_chol_.info() != Eigen::Success) {
      std::ostringstream os;
      os << "Integrator: Cholesky factorization failed (dofs "
         << op.num_dofs() << ", dt " << dt << ", h " << op.resolution
         << "); the operator is indefinite at this step size";
      throw std::runtime_error(os.str());
    }
  } else {
    cn_lu_ = std::make_unique<Eigen::SparseLU<SparseMat>>();
    ie_lu_ = std::make_unique<Eigen::SparseLU<SparseMat>>();
    cn_lu_->compute(cn_lhs);
    ie_lu_->compute(ie_lhs);
    if (cn_lu_->info() != Eigen::Success || ie_lu_->info() != Eigen::Success) {
      std::ostringstream os;
      os << "Integrator: sparse LU factorization failed (dofs "
         << op.num_dofs() << ", dt " << dt << ", h " << op.resolution << ")";
      throw std::runtime_error(os.str());
    }
  }
}

Eigen::VectorXd Integrator::step_deterministic(const Eigen::VectorXd& u) const {
  Eigen::VectorXd rhs = cn_rhs_ * u;
  return symmetric_ ? cn_chol_.solve(rhs).eval() : cn_lu_->solve(rhs).eval();
}

Eigen::VectorXd Integrator::step_implicit_euler(const Eigen::VectorXd& u) const {
  Eigen::VectorXd rhs = op_->mass * u;
  return symmetric_ ? ie_chol_.solve(rhs).eval() : ie_lu_->solve(rhs).eval();
}

Eigen::VectorXd Integrator::reaction_term(const Eigen::VectorXd& u,
                                          std::uint64_t step,
                                          const rng::Stream& stream) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(u.size());
  if (reaction_->trivial()) return f;

  std::vector<double> factor(reaction_->edges.size(), 1.0);
  if (reaction_->modulation != Modulation::None) {
    const std::uint64_t key =
        reaction_->modulation == Modulation::PerPath ? 0 : step + 1;
    for (std::size_t e = 0; e < factor.size(); ++e)
      factor[e] = reaction_->modulation_low +
                  (reaction_->modulation_high - reaction_->modulation_low) *
                      stream.uniform(rng::Domain::Reaction, key, e, 0);
  }

  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double acc = 0.0;
    for (const NodalSite& s : sites_[static_cast<std::size_t>(i)])
      acc += s.share * reaction_->eval(s.edge, s.x, u[i], factor[s.edge]);
    f[i] = acc;
  }
  return f;
}

Eigen::VectorXd Integrator::noise_term(const Eigen::VectorXd& u_eval,
                                       std::uint64_t step,
                                       const rng::Stream& stream) const {
  const std::size_t sub = cfg_.noise_substeps;
  const double dt_sub = cfg_.dt / static_cast<double>(sub);
  const std::uint64_t first = step * sub;
  NoiseIncrement dw =
      noise_->kind == NoiseKind::White
          ? sample_white_increment(op_->lumped_mass, dt_sub, first, sub, stream)
          : kernel_.sample(dt_sub, first, sub, stream);
  return apply_gamma(*noise_, u_eval, dw.values);
}

Eigen::VectorXd Integrator::step_stochastic(const Eigen::VectorXd& u,
                                            std::uint64_t step,
                                            const rng::Stream& stream) const {
  const double dt = cfg_.dt;
  Eigen::VectorXd ustar = u;
  if (!reaction_->trivial()) {
    Eigen::VectorXd f = reaction_term(u, step, stream);
    // Nodewise taming keeps the dissipative leading term from exploding the
    // explicit substep.
    for (Eigen::Index i = 0; i < u.size(); ++i)
      ustar[i] += dt * f[i] / (1.0 + cfg_.taming * dt * std::abs(f[i]));
  }
  Eigen::VectorXd rhs = ustar;
  if (!noise_->trivial()) {
    const Eigen::VectorXd& gamma_state =
        cfg_.scheme == Scheme::SplitStep ? ustar : u;
    rhs += noise_term(gamma_state, step, stream);
  }
  rhs = op_->mass * rhs;
  return symmetric_ ? ie_chol_.solve(rhs).eval() : ie_lu_->solve(rhs).eval();
}

PathSample Integrator::simulate_path(std::uint64_t path_index,
                                     const GridFunction& xi) const {
  if (xi.mesh != op_->mesh)
    throw std::invalid_argument("simulate_path: initial state mesh mismatch");
  const std::size_t n_steps = cfg_.num_steps();
  const rng::Stream stream(cfg_.seed, path_index);

  PathSample out;
  out.path_index = path_index;
  out.seed = cfg_.seed;
  out.probe_series.resize(cfg_.probe_dofs.size());
  for (auto& s : out.probe_series) s.reserve(n_steps + 1);

  Eigen::VectorXd u = xi.values;
  auto record = [&](std::size_t step_idx) {
    const double t = cfg_.dt * static_cast<double>(step_idx);
    for (std::size_t p = 0; p < cfg_.probe_dofs.size(); ++p)
      out.probe_series[p].push_back(
          u[static_cast<Eigen::Index>(cfg_.probe_dofs[p])]);
    if (cfg_.record_snapshots &&
        (step_idx % cfg_.output_stride == 0 || step_idx == n_steps)) {
      out.snapshot_times.push_back(t);
      out.snapshots.push_back(u);
    }
    out.sup_norm = std::max(out.sup_norm, u.cwiseAbs().maxCoeff());
  };
  record(0);

  for (std::size_t s = 0; s < n_steps; ++s) {
    u = cfg_.scheme == Scheme::DeterministicCN ? step_deterministic(u)
                                               : step_stochastic(u, s, stream);
    if (!u.allFinite()) {
      out.blew_up = true;
      out.blowup_step = s + 1;
      break;
    }
    record(s + 1);
  }
  out.final_state = u;
  return out;
}

PathSample simulate_path(const DiscreteOperator& op,
                         const ReactionSpec& reaction, const NoiseSpec& noise,
                         const SolverConfig& cfg, const GridFunction& xi) {
  Integrator integrator(op, reaction, noise, cfg);
  return integrator.simulate_path(0, xi);
}

EnsembleStats run_ensemble(
    const DiscreteOperator& op, const ReactionSpec& reaction,
    const NoiseSpec& noise, const SolverConfig& cfg, const GridFunction& xi,
    unsigned threads,
    const std::function<void(std::size_t, const PathSample&)>& observer,
    const PreparedKernel* kernel) {
  const std::size_t n = cfg.n_paths;
  if (n == 0) throw std::invalid_argument("run_ensemble: n_paths must be >= 1");
  threads = std::max(1u, threads);

  struct PathReduce {
    bool blew_up = false;
    double sup_norm = 0.0;
    std::vector<double> probe_final;
  };
  std::vector<PathReduce> reduced(n);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto make_integrator = [&]() {
    if (kernel) return Integrator(op, reaction, noise, cfg, *kernel);
    return Integrator(op, reaction, noise, cfg);
  };
  auto worker = [&]() {
    try {
      Integrator integrator = make_integrator();
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t p = next.fetch_add(1);
        if (p >= n) break;
        PathSample sample = integrator.simulate_path(p, xi);
        PathReduce& r = reduced[p];
        r.blew_up = sample.blew_up;
        r.sup_norm = sample.sup_norm;
        for (const auto& series : sample.probe_series)
          r.probe_final.push_back(series.back());
        if (observer) observer(p, sample);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Deterministic reduction in path-index order.
  EnsembleStats stats;
  stats.n_paths = n;
  const std::size_t n_probes = cfg.probe_dofs.size();
  stats.probe_mean.assign(n_probes, 0.0);
  stats.probe_variance.assign(n_probes, 0.0);
  std::size_t ok = 0;
  for (const PathReduce& r : reduced) {
    if (r.blew_up) {
      ++stats.blowup_count;
      continue;
    }
    ++ok;
    for (std::size_t p = 0; p < n_probes; ++p)
      stats.probe_mean[p] += r.probe_final[p];
  }
  if (ok > 0)
    for (std::size_t p = 0; p < n_probes; ++p)
      stats.probe_mean[p] /= static_cast<double>(ok);
  if (ok > 1) {
    for (const PathReduce& r : reduced) {
      if (r.blew_up) continue;
      for (std::size_t p = 0; p < n_probes; ++p) {
        const double d = r.probe_final[p] - stats.probe_mean[p];
        stats.probe_variance[p] += d * d;
      }
    }
    for (std::size_t p = 0; p < n_probes; ++p)
      stats.probe_variance[p] /= static_cast<double>(ok - 1);
  }
  for (double q : cfg.moment_orders) {
    double acc = 0.0;
    for (const PathReduce& r : reduced)
      if (!r.blew_up) acc += std::pow(r.sup_norm, q);
    stats.sup_moments.emplace_back(q, ok ? acc / static_cast<double>(ok) : 0.0);
  }
  return stats;
}

}  // namespace graphsde
