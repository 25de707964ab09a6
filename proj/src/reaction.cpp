#include "graphsde/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphsde {

ReactionSpec ReactionSpec::allen_cahn(std::size_t num_edges, double beta) {
  ReactionSpec spec;
  EdgeReaction r;
  r.k = 1;
  r.leading = Profile::constant(1.0);
  r.lower = {Profile::constant(0.0), Profile::constant(beta * beta),
             Profile::constant(0.0)};
  spec.edges.assign(num_edges, r);
  return spec;
}

ReactionSpec ReactionSpec::fitzhugh_nagumo(std::size_t num_edges, double a) {
  ReactionSpec spec;
  EdgeReaction r;
  r.k = 1;
  r.leading = Profile::constant(1.0);
  r.lower = {Profile::constant(0.0), Profile::constant(-a),
             Profile::constant(1.0 + a)};
  spec.edges.assign(num_edges, r);
  return spec;
}

double ReactionSpec::eval(EdgeIndex e, double x, double eta,
                          double leading_factor) const {
  if (edges.empty()) return 0.0;
  const EdgeReaction& r = edges.at(e);
  double acc = -leading_factor * r.leading(x);
  // Missing trailing lower coefficients count as zero.
  for (std::size_t j = 2 * r.k + 1; j-- > 0;)
    acc = acc * eta + (j < r.lower.size() ? r.lower[j](x) : 0.0);
  return acc;
}

std::pair<unsigned, unsigned> ReactionSpec::exponents() const {
  if (edges.empty())
    throw std::logic_error("exponents: reaction has no edge entries");
  unsigned kmin = edges.front().k, kmax = edges.front().k;
  for (const EdgeReaction& r : edges) {
    kmin = std::min(kmin, r.k);
    kmax = std::max(kmax, r.k);
  }
  return {2 * kmin + 1, 2 * kmax + 1};
}

double ReactionSpec::dissipativity_threshold(const MetricGraph& g) const {
  if (edges.empty()) return 0.0;
  double eta0 = 1.0;
  for (EdgeIndex e = 0; e < edges.size(); ++e) {
    const EdgeReaction& r = edges[e];
    const double len = g.edges.at(e).length;
    double lead_min = r.leading.min_on(len) * std::min(1.0, modulation_low);
    if (!(lead_min > 0.0))
      throw std::domain_error(
          "dissipativity_threshold: leading coefficient not positive");
    double coeff_max = 0.0;
    for (const Profile& p : r.lower)
      coeff_max = std::max(
          {coeff_max, std::abs(p.min_on(len)), std::abs(p.max_on(len))});
    // sign(eta) f <= -c |eta|^(2k+1) + C (2k+1) max(1,|eta|)^(2k): negative
    // once |eta| > C (2k+1) / c and |eta| >= 1.
    const double bound =
        coeff_max * static_cast<double>(2 * r.k + 1) / lead_min;
    eta0 = std::max(eta0, bound * (1.0 + 1e-9) + 1e-12);
  }
  return eta0;
}

}  // namespace graphsde
