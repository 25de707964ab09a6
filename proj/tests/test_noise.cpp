#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "graphsde/assembly.hpp"
#include "graphsde/noise.hpp"
#include "support.hpp"

using namespace graphsde;
namespace gt = graphsde::testing;

TEST_CASE("white increments have per-DOF variance dt / m_i") {
  MetricGraph g = gt::path_graph();
  Mesh mesh(g, 0.25);
  DiscreteOperator op = assemble(g, mesh);
  const double dt = 1e-3;
  const std::size_t n_samples = 100000;
  const auto n = op.lumped_mass.size();

  rng::Stream stream(1234, 0);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(n);
  for (std::size_t s = 0; s < n_samples; ++s) {
    NoiseIncrement inc = sample_white_increment(op.lumped_mass, dt, s, 1, stream);
    mean += inc.values;
    sq += inc.values.cwiseProduct(inc.values);
  }
  mean /= static_cast<double>(n_samples);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double target = dt / op.lumped_mass[i];
    const double var = sq[i] / static_cast<double>(n_samples) - mean[i] * mean[i];
    const double se = target * std::sqrt(2.0 / static_cast<double>(n_samples));
    CHECK(std::abs(var - target) <= 3.0 * se);
    CHECK(std::abs(mean[i]) <=
          4.0 * std::sqrt(target / static_cast<double>(n_samples)));
  }
}

TEST_CASE("cross-DOF correlations stay below 4/sqrt(N)") {
  MetricGraph g = gt::path_graph();
  Mesh mesh(g, 0.25);
  DiscreteOperator op = assemble(g, mesh);
  const std::size_t n_samples = 100000;
  const auto n = op.lumped_mass.size();

  rng::Stream stream(99, 0);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (std::size_t s = 0; s < n_samples; ++s) {
    NoiseIncrement inc =
        sample_white_increment(op.lumped_mass, 1e-3, s, 1, stream);
    second += inc.values * inc.values.transpose();
    mean += inc.values;
  }
  second /= static_cast<double>(n_samples);
  mean /= static_cast<double>(n_samples);
  const double bound = 4.0 / std::sqrt(static_cast<double>(n_samples));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double cov = second(i, j) - mean[i] * mean[j];
      const double corr =
          cov / std::sqrt((second(i, i) - mean[i] * mean[i]) *
                          (second(j, j) - mean[j] * mean[j]));
      CHECK(std::abs(corr) <= bound);
    }
}

TEST_CASE("halving dt scales every draw by exactly sqrt(1/2)") {
  MetricGraph g = gt::single_edge();
  Mesh mesh(g, 0.25);
  DiscreteOperator op = assemble(g, mesh);
  rng::Stream stream(7, 3);
  NoiseIncrement a = sample_white_increment(op.lumped_mass, 2e-3, 5, 1, stream);
  NoiseIncrement b = sample_white_increment(op.lumped_mass, 1e-3, 5, 1, stream);
  for (Eigen::Index i = 0; i < a.values.size(); ++i)
    CHECK(a.values[i] == doctest::Approx(b.values[i] * std::sqrt(2.0))
                             .epsilon(1e-15));
}

TEST_CASE("substep sums reproduce the coarse increment exactly") {
  MetricGraph g = gt::single_edge();
  Mesh mesh(g, 0.1);
  DiscreteOperator op = assemble(g, mesh);
  rng::Stream stream(21, 4);
  const double dt_sub = 5e-4;
  NoiseIncrement coarse =
      sample_white_increment(op.lumped_mass, dt_sub, 10, 2, stream);
  NoiseIncrement f1 = sample_white_increment(op.lumped_mass, dt_sub, 10, 1, stream);
  NoiseIncrement f2 = sample_white_increment(op.lumped_mass, dt_sub, 11, 1, stream);
  CHECK((coarse.values - f1.values - f2.values).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("draws are pure functions of (seed, path, step, dof)") {
  MetricGraph g = gt::single_edge();
  Mesh mesh(g, 0.2);
  DiscreteOperator op = assemble(g, mesh);
  rng::Stream s1(5, 17), s2(5, 17), other_path(5, 18);
  NoiseIncrement a = sample_white_increment(op.lumped_mass, 1e-3, 9, 1, s1);
  NoiseIncrement b = sample_white_increment(op.lumped_mass, 1e-3, 9, 1, s2);
  NoiseIncrement c = sample_white_increment(op.lumped_mass, 1e-3, 9, 1, other_path);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("coloured kernel increments") {
  MetricGraph g = gt::single_edge();
  Mesh mesh(g, 0.25);

  SUBCASE("single constant mode is spatially constant with variance a^2 dt") {
    const double amp = 0.7, dt = 1e-3;
    PreparedKernel kernel({{0, Profile::constant(1.0), amp}}, mesh);
    rng::Stream stream(3, 0);
    double acc = 0.0, acc2 = 0.0;
    const std::size_t n_samples = 50000;
    for (std::size_t s = 0; s < n_samples; ++s) {
      NoiseIncrement inc = kernel.sample(dt, s, 1, stream);
      for (Eigen::Index i = 1; i < inc.values.size(); ++i)
        CHECK(inc.values[i] == inc.values[0]);
      acc += inc.values[0];
      acc2 += inc.values[0] * inc.values[0];
    }
    const double var = acc2 / n_samples - (acc / n_samples) * (acc / n_samples);
    const double target = amp * amp * dt;
    CHECK(std::abs(var - target) <=
          3.0 * target * std::sqrt(2.0 / n_samples));
  }
  SUBCASE("empty kernel gives the zero increment") {
    PreparedKernel kernel({}, mesh);
    rng::Stream stream(3, 0);
    NoiseIncrement inc = kernel.sample(1e-3, 0, 1, stream);
    CHECK(inc.values.size() == static_cast<Eigen::Index>(mesh.num_dofs()));
    CHECK(inc.values.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("two orthogonal modes give covariance a1^2 w1 w1^T + a2^2 w2 w2^T") {
    const double a1 = 0.5, a2 = 0.3, dt = 1e-3;
    PreparedKernel kernel({{0, Profile::constant(1.0), a1},
                           {0, Profile::polynomial({-0.5, 1.0}), a2}},
                          mesh);
    rng::Stream stream(11, 0);
    // probe two nodes: x=0.25 (value -0.25 in mode 2) and x=0.75 (+0.25)
    const auto i = static_cast<Eigen::Index>(mesh.nearest_dof(0, 0.25));
    const auto j = static_cast<Eigen::Index>(mesh.nearest_dof(0, 0.75));
    const std::size_t n_samples = 200000;
    double sxy = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
      NoiseIncrement inc = kernel.sample(dt, s, 1, stream);
      sxy += inc.values[i] * inc.values[j];
      sx += inc.values[i];
      sy += inc.values[j];
    }
    const double cov = sxy / n_samples - (sx / n_samples) * (sy / n_samples);
    const double target = (a1 * a1 * 1.0 * 1.0 + a2 * a2 * (-0.25) * 0.25) * dt;
    const double scale = (a1 * a1 + a2 * a2 * 0.0625) * dt;  // ~marginal var
    CHECK(std::abs(cov - target) <= 4.0 * scale / std::sqrt(n_samples) * 2.0);
  }
}

TEST_CASE("apply_gamma") {
  Eigen::VectorXd u(4), dw(4);
  u << -3.0, 0.0, 0.5, 40.0;
  dw << 1.0, -2.0, 0.25, 0.1;

  SUBCASE("h == 1 returns the increment unchanged") {
    NoiseSpec spec;
    spec.family = NoiseFamily::Constant;
    spec.sigma = 1.0;
    Eigen::VectorXd out = apply_gamma(spec, u, dw);
    CHECK((out - dw).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("h == 0 kills the increment") {
    NoiseSpec spec;
    spec.sigma = 0.0;
    Eigen::VectorXd out = apply_gamma(spec, u, dw);
    CHECK(out.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("saturating family obeys the growth bound everywhere") {
    NoiseSpec spec;
    spec.family = NoiseFamily::Saturating;
    spec.sigma = 0.8;
    spec.growth_ratio = 3.0 / 5.0;
    Eigen::VectorXd big(6);
    big << -1e6, -50.0, -1.0, 2.0, 300.0, 1e8;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
    Eigen::VectorXd out = apply_gamma(spec, big, ones);
    for (Eigen::Index k = 0; k < big.size(); ++k)
      CHECK(std::abs(out[k]) <=
            spec.sigma * std::pow(1.0 + std::abs(big[k]), spec.growth_ratio) +
                1e-12);
  }
  SUBCASE("linear family is truncated to the growth envelope") {
    NoiseSpec spec;
    spec.family = NoiseFamily::Linear;
    spec.sigma = 2.0;
    spec.growth_ratio = 0.5;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    Eigen::VectorXd big(4);
    big << 0.5, -0.5, 100.0, -100.0;
    Eigen::VectorXd out = apply_gamma(spec, big, ones);
    CHECK(out[0] == doctest::Approx(2.0 * 0.5));  // below envelope: linear
    CHECK(out[1] == doctest::Approx(-2.0 * 0.5));
    for (Eigen::Index k = 2; k < 4; ++k)
      CHECK(std::abs(out[k]) <=
            spec.sigma * std::pow(1.0 + std::abs(big[k]), spec.growth_ratio) +
                1e-12);
  }
}
