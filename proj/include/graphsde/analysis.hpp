#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphsde/dynamics.hpp"

namespace graphsde {

struct ConvergenceRow {
  double dt = 0.0;
  double error = 0.0;      // E || u_dt(T) - u_{dt/2}(T) ||_mass
  double std_error = 0.0;  // Monte Carlo standard error of the mean
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;            // fitted log-log slope
  double slope_half_width = 0.0; // ~95% confidence half-width
  bool usable = false;           // false when noise swamps the differences
  std::string note;
};

/// Coupled self-refinement study: for each dt the coarse run (noise summed
/// over two fine draws) is paired against the dt/2 run on the same Brownian
/// path, and the mass-norm difference at final time is averaged over
/// n_paths pairs. Requires >= 3 dyadically nested dts.
ConvergenceTable strong_order_time(const DiscreteOperator& op,
                                   const ReactionSpec& reaction,
                                   const NoiseSpec& noise,
                                   const SolverConfig& base,
                                   const GridFunction& xi,
                                   const std::vector<double>& dts,
                                   std::size_t n_paths, std::uint64_t seed,
                                   unsigned threads = 1);

struct HoelderEstimate {
  double lambda_hat = 0.0;
  double r_squared = 0.0;
  std::vector<std::size_t> lags;  // in steps
  std::vector<double> msd;        // E |u(t+tau) - u(t)|^2 per lag
  bool sufficient_resolution = true;
  std::string note;
};

/// Regresses log E|u(t+tau)-u(t)|^2 on log tau over dyadic lags, averaging
/// over time origins and series; lambda_hat = slope / 2. Flags insufficient
/// resolution when the smallest lag is <= 4 steps. Needs >= 4 dyadic lags.
HoelderEstimate estimate_hoelder(const std::vector<std::vector<double>>& series,
                                 double dt,
                                 const std::vector<std::size_t>& lags);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // worst-case margin; <= 0 means satisfied with slack
  std::string detail;
};

struct SemigroupReport {
  std::vector<PropertyCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct SemigroupCheckOptions {
  std::size_t trials = 100;
  std::vector<double> dt_list = {1e-2, 1e-3};
  std::uint64_t seed = 0;
  bool include_submarkov = true;  // only meaningful when p == 0
};

/// Batteries for the discrete propagators of a drift-free operator:
/// Crank-Nicolson mass-norm contraction, implicit-Euler sup-norm contraction,
/// positivity and sub-Markov property (resolvent of an M-matrix system), the
/// discrete semigroup law, and an analyticity proxy t |A S(t) u| <= C |u|.
SemigroupReport check_semigroup_properties(const DiscreteOperator& op,
                                           const SemigroupCheckOptions& opts);

struct SpectralOracle {
  double variance = 0.0;
  std::vector<double> mode_contributions;  // ascending pencil order
};

/// Stationary/transient variance of the linear additive-noise problem at a
/// probe DOF: sum_w sigma^2 w(x)^2 (1 - e^{-2 lambda_w T}) / (2 lambda_w)
/// over the mass-normalized generalized eigenpairs. The reported total is
/// exactly the sum of the per-mode contributions.
SpectralOracle spectral_oracle(const DiscreteOperator& op,
                               std::size_t probe_dof, double T, double sigma);

/// Least-squares slope of y against x with ~95% half-width; shared by the
/// convergence and regularity fits.
struct SlopeFit {
  double slope = 0.0;
  double half_width = 0.0;
  double r_squared = 1.0;
};
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace graphsde
