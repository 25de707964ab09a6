#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "graphsde/graph.hpp"

namespace graphsde {

/// Odd-degree polynomial drift on one edge,
///   f_e(x, eta) = -a_e(x) eta^(2k+1) + sum_{j=0}^{2k} a_{e,j}(x) eta^j,
/// with positive leading coefficient profile and bounded lower coefficients.
struct EdgeReaction {
  unsigned k = 1;                              // degree parameter, deg = 2k+1
  Profile leading = Profile::constant(1.0);    // a_e, 0 < c <= a_e <= C
  std::vector<Profile> lower;                  // a_{e,j}, j = 0 .. 2k
};

/// How stochastic coefficients are realized: a per-edge multiplicative factor
/// on the leading coefficient, drawn uniformly from [low, high] (0 < low)
/// out of the path's own seed stream, at path start or refreshed every step.
enum class Modulation { None, PerPath, PerStep };

struct ReactionSpec {
  std::vector<EdgeReaction> edges;  // one entry per graph edge; empty => f == 0
  Modulation modulation = Modulation::None;
  double modulation_low = 1.0;
  double modulation_high = 1.0;

  bool trivial() const { return edges.empty(); }

  static ReactionSpec zero() { return {}; }
  /// f(eta) = -eta^3 + beta^2 eta on every edge.
  static ReactionSpec allen_cahn(std::size_t num_edges, double beta);
  /// f(eta) = eta (eta - 1)(a - eta) = -eta^3 + (1+a) eta^2 - a eta.
  static ReactionSpec fitzhugh_nagumo(std::size_t num_edges, double a);

  /// Horner evaluation of f_e at (x, eta); leading_factor scales a_e only.
  double eval(EdgeIndex e, double x, double eta,
              double leading_factor = 1.0) const;

  /// (k, K) = (2 k_min + 1, 2 k_max + 1) over the edges.
  std::pair<unsigned, unsigned> exponents() const;

  /// Threshold eta_0 such that sign(eta) f_e(x, eta) < 0 whenever
  /// |eta| >= eta_0, from the coefficient bounds scanned over the profiles.
  double dissipativity_threshold(const MetricGraph& g) const;
};

}  // namespace graphsde
