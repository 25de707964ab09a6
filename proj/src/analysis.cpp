#include "graphsde/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace graphsde {

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need >= 2 matched samples");
  const double n = static_cast<double>(x.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - ym - fit.slope * (x[i] - xm);
    rss += r * r;
  }
  if (x.size() > 2)
    fit.half_width = 2.0 * std::sqrt(rss / (n - 2.0) / sxx);
  fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  return fit;
}

ConvergenceTable strong_order_time(const DiscreteOperator& op,
                                   const ReactionSpec& reaction,
                                   const NoiseSpec& noise,
                                   const SolverConfig& base,
                                   const GridFunction& xi,
                                   const std::vector<double>& dts,
                                   std::size_t n_paths, std::uint64_t seed,
                                   unsigned threads) {
  if (dts.size() < 3)
    throw std::invalid_argument("strong_order_time: need >= 3 dt levels");
  for (std::size_t i = 1; i < dts.size(); ++i)
    if (std::abs(dts[i - 1] / dts[i] - 2.0) > 1e-9)
      throw std::invalid_argument("strong_order_time: dts must halve");

  ConvergenceTable table;
  for (double dt : dts) {
    SolverConfig coarse = base;
    coarse.dt = dt;
    coarse.seed = seed;
    coarse.noise_substeps = 2;
    coarse.record_snapshots = false;
    coarse.probe_dofs.clear();
    SolverConfig fine = coarse;
    fine.dt = dt / 2.0;
    fine.noise_substeps = 1;

    std::vector<double> err(n_paths, 0.0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      try {
        Integrator ic(op, reaction, noise, coarse);
        Integrator iff(op, reaction, noise, fine);
        while (!failed.load(std::memory_order_relaxed)) {
          const std::size_t p = next.fetch_add(1);
          if (p >= n_paths) break;
          PathSample a = ic.simulate_path(p, xi);
          PathSample b = iff.simulate_path(p, xi);
          err[p] = (a.blew_up || b.blew_up)
                       ? std::numeric_limits<double>::quiet_NaN()
                       : op.mass_norm(a.final_state - b.final_state);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    };
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    double mean = 0.0;
    std::size_t ok = 0;
    for (double e : err)
      if (std::isfinite(e)) {
        mean += e;
        ++ok;
      }
    if (ok == 0) throw std::runtime_error("strong_order_time: all paths blew up");
    mean /= static_cast<double>(ok);
    double var = 0.0;
    for (double e : err)
      if (std::isfinite(e)) var += (e - mean) * (e - mean);
    const double se =
        ok > 1 ? std::sqrt(var / static_cast<double>(ok - 1) /
                           static_cast<double>(ok))
               : 0.0;
    table.rows.push_back({dt, mean, se});
  }

  bool positive_errors = true;
  for (const auto& r : table.rows) positive_errors &= r.error > 0.0;
  if (!positive_errors) {
    table.usable = false;
    table.note = "zero errors at some level; nothing to fit";
    return table;
  }
  std::vector<double> lx, ly;
  for (const auto& r : table.rows) {
    lx.push_back(std::log(r.dt));
    ly.push_back(std::log(r.error));
  }
  SlopeFit fit = fit_slope(lx, ly);
  table.slope = fit.slope;
  table.slope_half_width = fit.half_width;

  table.usable = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const double diff = table.rows[i - 1].error - table.rows[i].error;
    const double se =
        std::max(table.rows[i - 1].std_error, table.rows[i].std_error);
    if (!(diff > se)) {
      table.usable = false;
      table.note = "standard errors exceed level differences";
      break;
    }
  }
  return table;
}

HoelderEstimate estimate_hoelder(const std::vector<std::vector<double>>& series,
                                 double dt,
                                 const std::vector<std::size_t>& lags) {
  if (lags.size() < 4)
    throw std::invalid_argument("estimate_hoelder: need >= 4 dyadic lags");
  for (std::size_t i = 1; i < lags.size(); ++i)
    if (lags[i] != 2 * lags[i - 1])
      throw std::invalid_argument("estimate_hoelder: lags must be dyadic");
  std::size_t longest = 0;
  for (const auto& s : series) longest = std::max(longest, s.size());
  if (longest <= lags.back())
    throw std::invalid_argument("estimate_hoelder: series too short");

  HoelderEstimate est;
  est.lags = lags;
  est.sufficient_resolution = lags.front() > 4;
  if (!est.sufficient_resolution)
    est.note = "smallest lag <= 4 dt; estimate contaminated by scheme scale";

  for (std::size_t lag : lags) {
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& s : series) {
      for (std::size_t t = 0; t + lag < s.size(); ++t) {
        const double d = s[t + lag] - s[t];
        acc += d * d;
        ++count;
      }
    }
    est.msd.push_back(acc / static_cast<double>(count));
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(lags[i]) * dt));
    ly.push_back(std::log(est.msd[i]));
  }
  SlopeFit fit = fit_slope(lx, ly);
  est.lambda_hat = fit.slope / 2.0;
  est.r_squared = fit.r_squared;
  return est;
}

namespace {

Eigen::VectorXd random_vector(std::mt19937_64& gen, Eigen::Index n) {
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

}  // namespace

SemigroupReport check_semigroup_properties(const DiscreteOperator& op,
                                           const SemigroupCheckOptions& opts) {
  if (op.has_drift)
    throw std::invalid_argument(
        "check_semigroup_properties: requires drift-free operator");
  SemigroupReport report;
  const auto n = static_cast<Eigen::Index>(op.num_dofs());
  std::mt19937_64 gen(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const ReactionSpec no_reaction;
  const NoiseSpec no_noise;

  // Solver roundoff headroom on top of exact inequalities.
  const double tol = 1e-10;

  for (double dt : opts.dt_list) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.T = dt;
    cfg.scheme = Scheme::DeterministicCN;
    Integrator integ(op, no_reaction, no_noise, cfg);
    std::ostringstream tag;
    tag << " (dt=" << dt << ")";

    const double lowest = std::numeric_limits<double>::lowest();
    PropertyCheck mass_contraction{"mass_contraction_cn" + tag.str(), true,
                                   lowest, ""};
    PropertyCheck sup_contraction{"sup_contraction_ie" + tag.str(), true,
                                  lowest, ""};
    PropertyCheck positivity{"positivity_ie" + tag.str(), true, lowest, ""};
    PropertyCheck submarkov{"submarkov_ie" + tag.str(), true, lowest, ""};

    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
      Eigen::VectorXd u = random_vector(gen, n);
      const double ratio =
          op.mass_norm(integ.step_deterministic(u)) / op.mass_norm(u);
      mass_contraction.worst = std::max(mass_contraction.worst, ratio - 1.0);

      // Iterated trajectories concentrate on the worst mode: a single step
      // from random data cannot expose an expanding direction that carries
      // only a 1/n share of the energy.
      if (trial < 5) {
        Eigen::VectorXd w = u;
        for (int it = 0; it < 200; ++it) {
          Eigen::VectorXd next = integ.step_deterministic(w);
          const double r = op.mass_norm(next) / op.mass_norm(w);
          mass_contraction.worst = std::max(mass_contraction.worst, r - 1.0);
          w = next;
        }
      }

      const double sup_ratio = integ.step_implicit_euler(u).lpNorm<Eigen::Infinity>() /
                               u.lpNorm<Eigen::Infinity>();
      sup_contraction.worst = std::max(sup_contraction.worst, sup_ratio - 1.0);

      Eigen::VectorXd upos = u.cwiseAbs();
      const double min_pos = integ.step_implicit_euler(upos).minCoeff();
      positivity.worst =
          std::max(positivity.worst, -min_pos / upos.lpNorm<Eigen::Infinity>());

      if (opts.include_submarkov) {
        Eigen::VectorXd ubox(n);
        for (Eigen::Index i = 0; i < n; ++i) ubox[i] = unif(gen);
        Eigen::VectorXd stepped = integ.step_implicit_euler(ubox);
        const double below = -stepped.minCoeff();
        const double above = stepped.maxCoeff() - 1.0;
        submarkov.worst = std::max({submarkov.worst, below, above});
      }
    }
    mass_contraction.pass = mass_contraction.worst <= tol;
    sup_contraction.pass = sup_contraction.worst <= tol;
    positivity.pass = positivity.worst <= tol;
    submarkov.pass = submarkov.worst <= tol;
    report.checks.push_back(mass_contraction);
    report.checks.push_back(sup_contraction);
    report.checks.push_back(positivity);
    if (opts.include_submarkov) report.checks.push_back(submarkov);

    // Discrete semigroup law: n steps twice == 2n steps, exactly up to
    // solver tolerance.
    PropertyCheck law{"semigroup_law" + tag.str(), true, lowest, ""};
    for (std::size_t trial = 0; trial < std::min<std::size_t>(opts.trials, 10);
         ++trial) {
      Eigen::VectorXd u = random_vector(gen, n);
      Eigen::VectorXd once = u, twice = u;
      for (int s = 0; s < 8; ++s) once = integ.step_deterministic(once);
      for (int s = 0; s < 4; ++s) twice = integ.step_deterministic(twice);
      for (int s = 0; s < 4; ++s) twice = integ.step_deterministic(twice);
      law.worst = std::max(law.worst,
                           op.mass_norm(once - twice) / op.mass_norm(u));
    }
    law.pass = law.worst <= 1e-9;
    report.checks.push_back(law);
  }

  // Analyticity proxy via the exact spectral propagator: || A S(t) u ||_mass
  // <= C / t means log || A S(t) u || decays with slope <= -0.8 in log t.
  {
    EigenPairs pairs = generalized_eigenpairs(op);
    PropertyCheck smoothing{"analytic_smoothing", true, 0.0, ""};
    std::vector<double> lt, ln;
    for (int k = -6; k <= 0; ++k) {
      const double t = std::pow(2.0, k);
      double worst = 0.0;
      for (std::size_t trial = 0; trial < 5; ++trial) {
        std::mt19937_64 g2(opts.seed + 1000 + trial);
        Eigen::VectorXd u = random_vector(g2, n);
        Eigen::VectorXd coeffs = pairs.vectors.transpose() * (op.mass * u);
        double norm2 = 0.0;
        for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
          const double lam = pairs.pencil_eigenvalues[i];
          const double amp = lam * std::exp(-lam * t) * coeffs[i];
          norm2 += amp * amp;
        }
        worst = std::max(worst, std::sqrt(norm2) / op.mass_norm(u));
      }
      lt.push_back(std::log(t));
      ln.push_back(std::log(worst));
    }
    SlopeFit fit = fit_slope(lt, ln);
    smoothing.worst = fit.slope + 0.8;  // pass when slope <= -0.8
    smoothing.pass = fit.slope <= -0.8;
    std::ostringstream detail;
    detail << "decay slope " << fit.slope;
    smoothing.detail = detail.str();
    report.checks.push_back(smoothing);
  }

  return report;
}

SpectralOracle spectral_oracle(const DiscreteOperator& op,
                               std::size_t probe_dof, double T, double sigma) {
  if (op.has_drift)
    throw std::invalid_argument("spectral_oracle: requires drift-free operator");
  EigenPairs pairs = generalized_eigenpairs(op);
  SpectralOracle oracle;
  const auto probe = static_cast<Eigen::Index>(probe_dof);
  for (Eigen::Index k = 0; k < pairs.pencil_eigenvalues.size(); ++k) {
    const double lam = pairs.pencil_eigenvalues[k];
    const double w = pairs.vectors(probe, k);
    const double factor =
        lam * T > 1e-12 ? (1.0 - std::exp(-2.0 * lam * T)) / (2.0 * lam) : T;
    oracle.mode_contributions.push_back(sigma * sigma * w * w * factor);
  }
  for (double c : oracle.mode_contributions) oracle.variance += c;
  return oracle;
}

}  // namespace graphsde
