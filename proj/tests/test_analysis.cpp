#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "graphsde/analysis.hpp"
#include "graphsde/assembly.hpp"
#include "support.hpp"

using namespace graphsde;
namespace gt = graphsde::testing;

TEST_CASE("fit_slope recovers an exact line") {
  std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
  std::vector<double> y = {1.0, 3.5, 6.0, 8.5};
  SlopeFit fit = fit_slope(x, y);
  CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(fit.half_width == doctest::Approx(0.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("hoelder estimator") {
  SUBCASE("synthetic brownian paths give lambda in [0.45, 0.55]") {
    const double dt = 5e-4;
    std::vector<std::vector<double>> series(64);
    for (std::size_t p = 0; p < series.size(); ++p) {
      rng::Stream stream(99, p);
      double b = 0.0;
      series[p].push_back(b);
      for (int s = 0; s < 2000; ++s) {
        b += std::sqrt(dt) * stream.normal(rng::Domain::Test, s, 0);
        series[p].push_back(b);
      }
    }
    HoelderEstimate est = estimate_hoelder(series, dt, {8, 16, 32, 64, 128});
    CHECK(est.lambda_hat > 0.45);
    CHECK(est.lambda_hat < 0.55);
    CHECK(est.sufficient_resolution);

    SUBCASE("scale invariance is exact up to rounding") {
      std::vector<std::vector<double>> scaled = series;
      for (auto& s : scaled)
        for (double& v : s) v *= 7.31;
      HoelderEstimate est2 = estimate_hoelder(scaled, dt, {8, 16, 32, 64, 128});
      CHECK(std::abs(est2.lambda_hat - est.lambda_hat) < 1e-12);
    }
  }
  SUBCASE("smooth differentiable paths estimate lambda >= 0.9") {
    const double dt = 1e-3;
    std::vector<std::vector<double>> series(1);
    for (int s = 0; s <= 4000; ++s)
      series[0].push_back(std::sin(1.7 * dt * s) + 0.2 * dt * s);
    HoelderEstimate est = estimate_hoelder(series, dt, {8, 16, 32, 64});
    CHECK(est.lambda_hat >= 0.9);
  }
  SUBCASE("lags at or below 4 steps trip the resolution flag") {
    std::vector<std::vector<double>> series(1, std::vector<double>(300, 0.0));
    for (std::size_t i = 0; i < series[0].size(); ++i)
      series[0][i] = static_cast<double>(i % 7);
    HoelderEstimate est = estimate_hoelder(series, 1e-3, {4, 8, 16, 32});
    CHECK_FALSE(est.sufficient_resolution);
  }
  SUBCASE("fewer than 4 or non-dyadic lags are rejected") {
    std::vector<std::vector<double>> series(1, std::vector<double>(300, 1.0));
    CHECK_THROWS_AS(estimate_hoelder(series, 1e-3, {8, 16, 32}),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_hoelder(series, 1e-3, {8, 16, 32, 48}),
                    std::invalid_argument);
  }
}

TEST_CASE("spectral oracle") {
  MetricGraph g = gt::single_edge();
  Mesh mesh(g, 1.0 / 32);
  DiscreteOperator op = assemble(g, mesh);
  const std::size_t probe = mesh.nearest_dof(0, 0.3);

  SUBCASE("sigma = 0 gives zero variance") {
    SpectralOracle oracle = spectral_oracle(op, probe, 1.0, 0.0);
    CHECK(oracle.variance == 0.0);
  }
  SUBCASE("T -> infinity matches the stationary sum") {
    SpectralOracle oracle = spectral_oracle(op, probe, 1e9, 0.5);
    EigenPairs pairs = generalized_eigenpairs(op);
    double stationary = 0.0;
    for (Eigen::Index k = 0; k < pairs.pencil_eigenvalues.size(); ++k) {
      const double w = pairs.vectors(static_cast<Eigen::Index>(probe), k);
      stationary += 0.25 * w * w / (2.0 * pairs.pencil_eigenvalues[k]);
    }
    CHECK(oracle.variance == doctest::Approx(stationary).epsilon(1e-12));
  }
  SUBCASE("contributions are nonnegative and sum exactly to the total") {
    SpectralOracle oracle = spectral_oracle(op, probe, 2.0, 0.7);
    double sum = 0.0;
    for (double c : oracle.mode_contributions) {
      CHECK(c >= 0.0);
      sum += c;
    }
    CHECK(sum == oracle.variance);  // bitwise: total is defined as this sum
  }
  SUBCASE("per-mode values match a brute-force variance integration") {
    // dV/dt = -2 lambda V + sigma^2 w(x)^2, V(0) = 0, integrated by RK4.
    const double sigma = 0.5, T = 1.0;
    SpectralOracle oracle = spectral_oracle(op, probe, T, sigma);
    EigenPairs pairs = generalized_eigenpairs(op);
    for (Eigen::Index k : {0, 1, 2}) {
      const double lam = pairs.pencil_eigenvalues[k];
      const double w = pairs.vectors(static_cast<Eigen::Index>(probe), k);
      const double source = sigma * sigma * w * w;
      double v = 0.0;
      const double hstep = 1e-5;
      auto rhs = [&](double vv) { return -2.0 * lam * vv + source; };
      for (int s = 0; s < 100000; ++s) {
        const double k1 = rhs(v);
        const double k2 = rhs(v + 0.5 * hstep * k1);
        const double k3 = rhs(v + 0.5 * hstep * k2);
        const double k4 = rhs(v + hstep * k3);
        v += hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      CHECK(oracle.mode_contributions[static_cast<std::size_t>(k)] ==
            doctest::Approx(v).epsilon(1e-6));
    }
  }
}

TEST_CASE("strong order table on eigenmode data matches the CN formula") {
  MetricGraph g = gt::single_edge();
  Mesh mesh(g, 1.0 / 16);
  DiscreteOperator op = assemble(g, mesh);
  EigenPairs pairs = generalized_eigenpairs(op);
  GridFunction xi(mesh);
  xi.values = pairs.vectors.col(1);
  const double lam = pairs.pencil_eigenvalues[1];

  SolverConfig base;
  base.T = 1.0;
  base.scheme = Scheme::DeterministicCN;
  std::vector<double> dts = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  ConvergenceTable table = strong_order_time(op, ReactionSpec(), NoiseSpec(),
                                             base, xi, dts, 1, 0, 1);
  auto amp = [&](double dt) {
    return (1.0 - 0.5 * dt * lam) / (1.0 + 0.5 * dt * lam);
  };
  for (const ConvergenceRow& row : table.rows) {
    const double n = 1.0 / row.dt;
    const double expected = std::abs(std::pow(amp(row.dt), n) -
                                     std::pow(amp(row.dt / 2.0), 2.0 * n));
    CHECK(row.error == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("coupled refinement errors decrease monotonically within noise") {
  MetricGraph g = gt::single_edge();
  Mesh mesh(g, 1.0 / 32);
  DiscreteOperator op = assemble(g, mesh);
  NoiseSpec white;
  white.sigma = 0.5;
  SolverConfig base;
  base.T = 0.25;
  base.scheme = Scheme::SplitStep;
  std::vector<double> dts = {1.0 / 256, 1.0 / 512, 1.0 / 1024};
  ConvergenceTable table = strong_order_time(op, ReactionSpec(), white, base,
                                             GridFunction(mesh), dts, 48, 11, 1);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const double allowance = 2.0 * (table.rows[i - 1].std_error +
                                    table.rows[i].std_error);
    CHECK(table.rows[i].error <= table.rows[i - 1].error + allowance);
  }
  CHECK(table.usable);
}

TEST_CASE("non-dyadic dt lists are rejected") {
  MetricGraph g = gt::single_edge();
  Mesh mesh(g, 0.25);
  DiscreteOperator op = assemble(g, mesh);
  SolverConfig base;
  CHECK_THROWS_AS(strong_order_time(op, ReactionSpec(), NoiseSpec(), base,
                                    GridFunction(mesh), {0.1, 0.06, 0.03}, 1,
                                    0, 1),
                  std::invalid_argument);
}

TEST_CASE("semigroup batteries pass on valid operators") {
  std::mt19937_64 gen(53);
  MetricGraph g = gt::random_graph(gen, 5, 0.8, 0.0);  // p == 0
  Mesh mesh(g, 0.05);
  DiscreteOperator op = assemble(g, mesh);
  SemigroupCheckOptions opts;
  opts.trials = 40;
  opts.include_submarkov = true;
  SemigroupReport report = check_semigroup_properties(op, opts);
  for (const PropertyCheck& c : report.checks) {
    INFO(c.name, " worst=", c.worst);
    CHECK(c.pass);
  }
}

TEST_CASE("an indefinite coupling matrix fails the contraction battery") {
  MetricGraph g = gt::star_graph();
  g.coupling(0, 0) = +10.0;  // invalid: a(1,1) = -(10 - 3) < 0
  Mesh mesh(g, 0.05);
  DiscreteOperator op = assemble(g, mesh);
  SemigroupCheckOptions opts;
  opts.trials = 100;
  opts.include_submarkov = false;
  SemigroupReport report = check_semigroup_properties(op, opts);
  bool contraction_failed = false;
  for (const PropertyCheck& c : report.checks)
    if (c.name.rfind("mass_contraction", 0) == 0 && !c.pass)
      contraction_failed = true;
  CHECK(contraction_failed);
}
