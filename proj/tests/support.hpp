#pragma once

// Shared builders for the test and acceptance suites.

#include <random>
#include <vector>

#include "graphsde/graph.hpp"

namespace graphsde::testing {

/// M = diag(-1, ..., -1): every row sum is -1, trivially valid.
inline Eigen::MatrixXd robin_coupling(std::size_t n, double value = -1.0) {
  return value * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                           static_cast<Eigen::Index>(n));
}

inline MetricGraph single_edge(double length = 1.0, double m_diag = -1.0) {
  MetricGraph g;
  g.vertices = {"a", "b"};
  Edge e;
  e.id = "e1";
  e.from = 0;
  e.to = 1;
  e.length = length;
  g.edges = {e};
  g.coupling = robin_coupling(2, m_diag);
  return g;
}

/// a -- b -- c, unit lengths.
inline MetricGraph path_graph() {
  MetricGraph g;
  g.vertices = {"a", "b", "c"};
  Edge e1{"e1", 0, 1, 1.0, Profile::constant(1.0), Profile::constant(0.0),
          Profile::constant(0.0)};
  Edge e2{"e2", 1, 2, 1.0, Profile::constant(1.0), Profile::constant(0.0),
          Profile::constant(0.0)};
  g.edges = {e1, e2};
  g.coupling = robin_coupling(3);
  return g;
}

/// Center vertex 0 with three legs; lengths default to 1.
inline MetricGraph star_graph(std::vector<double> lengths = {1.0, 1.0, 1.0}) {
  MetricGraph g;
  g.vertices = {"c", "l1", "l2", "l3"};
  for (std::size_t i = 0; i < 3; ++i) {
    Edge e;
    e.id = "e" + std::to_string(i + 1);
    e.from = 0;
    e.to = i + 1;
    e.length = lengths.at(i);
    g.edges.push_back(e);
  }
  g.coupling = robin_coupling(4);
  return g;
}

/// Valid coupling matrix: nonnegative off-diagonal entries on random pairs,
/// diagonal set so every row sum is strictly negative.
inline Eigen::MatrixXd random_coupling(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index k = i + 1; k < ni; ++k)
      if (unif(gen) < 0.4) {
        const double b = unif(gen);
        m(i, k) = b;
        m(k, i) = b;
      }
  for (Eigen::Index i = 0; i < ni; ++i) {
    double off = m.row(i).sum();
    m(i, i) = -off - 0.2 - unif(gen);
  }
  return m;
}

/// Connected simple graph with m_target edges (>= n-1 tree edges first),
/// random lengths in [0.6, 1.8], constant coefficient profiles with
/// c in [c_low, 2], p in [0, p_max], d = 0.
inline MetricGraph random_graph(std::mt19937_64& gen, std::size_t m_target,
                                double c_low = 0.8, double p_max = 1.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n = 2 + static_cast<std::size_t>(
                                unif(gen) * static_cast<double>(m_target - 1));
  MetricGraph g;
  for (std::size_t v = 0; v < n; ++v)
    g.vertices.push_back("v" + std::to_string(v));

  std::vector<std::pair<VertexIndex, VertexIndex>> pairs;
  for (VertexIndex v = 1; v < n; ++v) {
    const auto parent =
        static_cast<VertexIndex>(unif(gen) * static_cast<double>(v));
    pairs.emplace_back(std::min(parent, v), std::max(parent, v));
  }
  // Extra edges on unused vertex pairs, up to m_target total.
  std::vector<std::pair<VertexIndex, VertexIndex>> candidates;
  for (VertexIndex a = 0; a < n; ++a)
    for (VertexIndex b = a + 1; b < n; ++b)
      if (std::find(pairs.begin(), pairs.end(), std::make_pair(a, b)) ==
          pairs.end())
        candidates.emplace_back(a, b);
  std::shuffle(candidates.begin(), candidates.end(), gen);
  for (const auto& c : candidates) {
    if (pairs.size() >= m_target) break;
    pairs.push_back(c);
  }

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Edge e;
    e.id = "e" + std::to_string(i);
    e.from = pairs[i].first;
    e.to = pairs[i].second;
    e.length = 0.6 + 1.2 * unif(gen);
    e.diffusion = Profile::constant(c_low + (2.0 - c_low) * unif(gen));
    e.potential = Profile::constant(p_max * unif(gen));
    g.edges.push_back(e);
  }
  g.coupling = random_coupling(gen, n);
  return g;
}

}  // namespace graphsde::testing
