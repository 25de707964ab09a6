#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "graphsde/profile.hpp"

namespace graphsde {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

/// Which end of an edge a vertex sits at. Fixes the local coordinate:
/// x = 0 at Left, x = length at Right. Edges are undirected; the derivative
/// direction "into the edge" is derived from the side, never from the
/// stored endpoint order.
enum class EndpointSide { Left, Right };

struct Edge {
  std::string id;
  VertexIndex from = 0;  // local coordinate x = 0 here
  VertexIndex to = 0;    // x = length here
  double length = 1.0;
  Profile diffusion = Profile::constant(1.0);   // c_e, continuous, > 0
  Profile drift = Profile::constant(0.0);       // d_e, Lipschitz
  Profile potential = Profile::constant(0.0);   // p_e, bounded, >= 0
};

/// Finite metric graph with vertex coupling matrix M. Immutable once built;
/// safe to share across worker threads.
struct MetricGraph {
  std::vector<std::string> vertices;  // size n
  std::vector<Edge> edges;            // size m
  Eigen::MatrixXd coupling;           // n x n matrix M

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_edges() const { return edges.size(); }

  std::size_t degree(VertexIndex v) const;
  VertexIndex endpoint(EdgeIndex e, EndpointSide side) const {
    return side == EndpointSide::Left ? edges[e].from : edges[e].to;
  }
};

struct Violation {
  std::string code;     // machine-readable, e.g. "coupling.row_sum_not_negative"
  std::string message;  // human-readable detail
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  bool has(const std::string& code) const;
};

struct ValidationOptions {
  /// Row sums must satisfy b_ii + sum_{k != i} b_ik <= -row_sum_margin.
  double row_sum_margin = 1e-12;
};

/// Checks every standing assumption: simple graph, positive lengths,
/// coefficient signs, and the coupling matrix conditions (real symmetric,
/// nonnegative off-diagonal, strictly negative row sums). Never throws;
/// returns the full list of violations. Pure: repeated calls give identical
/// reports.
ValidationReport validate_graph(const MetricGraph& g,
                                const ValidationOptions& opts = {});

struct VertexConditionCount {
  std::size_t continuity = 0;  // sum_v (d_v - 1) = 2m - n
  std::size_t kirchhoff = 0;   // n
  std::size_t total = 0;       // 2m
};

VertexConditionCount vertex_condition_count(const MetricGraph& g);

struct IncidentEdge {
  EdgeIndex edge;
  EndpointSide side;
};

/// Per-vertex lists of incident (edge, side) pairs; entry v has length d_v
/// and every edge appears at exactly two vertices in total.
std::vector<std::vector<IncidentEdge>> incidence_maps(const MetricGraph& g);

/// Smallest eigenvalue of -M; positive for every valid coupling matrix
/// (strict diagonal dominance of -M with positive diagonal).
double min_eigenvalue_neg_coupling(const Eigen::MatrixXd& coupling);

}  // namespace graphsde
