#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "graphsde/graph.hpp"

namespace graphsde {

/// Per-edge uniform grids glued at the vertices. Global DOF layout: the n
/// vertex DOFs come first (index = vertex index), followed by the interior
/// nodes of each edge in edge order. Edge-endpoint nodes at the same vertex
/// share one DOF, so the continuity condition I_v U(v) = 0 is built into the
/// index map and holds exactly for every grid function.
class Mesh {
public:
  Mesh(const MetricGraph& graph, double target_h);
  Mesh(MetricGraph&&, double) = delete;  // the graph must outlive the mesh

  const MetricGraph& graph() const { return *graph_; }
  std::size_t num_dofs() const { return num_dofs_; }
  std::size_t num_cells(EdgeIndex e) const { return cells_[e]; }
  double cell_width(EdgeIndex e) const { return widths_[e]; }
  /// Max cell width over all edges.
  double resolution() const;

  /// Global DOF of node j on edge e, j in [0, N_e]. Node 0 is the 'from'
  /// vertex, node N_e the 'to' vertex.
  std::size_t dof(EdgeIndex e, std::size_t node) const;
  std::size_t vertex_dof(VertexIndex v) const { return v; }
  double node_coord(EdgeIndex e, std::size_t node) const {
    return widths_[e] * static_cast<double>(node);
  }

  /// DOF of the grid node nearest to coordinate x on edge e.
  std::size_t nearest_dof(EdgeIndex e, double x) const;

private:
  const MetricGraph* graph_;
  std::vector<std::size_t> cells_;     // N_e per edge
  std::vector<double> widths_;         // l_e / N_e
  std::vector<std::size_t> interior_;  // first interior DOF per edge
  std::size_t num_dofs_ = 0;
};

/// A function on the graph sampled at the mesh nodes, stored per global DOF.
/// Vertex values are single-valued by construction (discrete analogue of the
/// space of continuous functions on the graph).
struct GridFunction {
  const Mesh* mesh = nullptr;
  Eigen::VectorXd values;

  GridFunction() = default;
  explicit GridFunction(const Mesh& m)
      : mesh(&m),
        values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_dofs()))) {}

  double operator[](std::size_t dof) const {
    return values[static_cast<Eigen::Index>(dof)];
  }
  double& operator[](std::size_t dof) {
    return values[static_cast<Eigen::Index>(dof)];
  }

  /// Nodal values along edge e, node 0 .. N_e.
  std::vector<double> edge_values(EdgeIndex e) const;
  double sup_norm() const {
    return values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  }
  bool all_finite() const { return values.allFinite(); }
};

/// Samples a per-edge scalar field f(e, x) at the mesh nodes; the value at a
/// shared vertex is taken from the lowest-index incident edge (callers use
/// this for continuous data).
GridFunction sample_on_mesh(const Mesh& mesh,
                            const std::function<double(EdgeIndex, double)>& f);

/// Rejects target_h <= 0; each edge gets N_e = max(ceil(l_e / target_h), 2)
/// uniform cells.
inline Mesh build_mesh(const MetricGraph& g, double target_h) {
  return Mesh(g, target_h);
}
Mesh build_mesh(MetricGraph&&, double) = delete;

/// One evaluation site of a DOF on an edge. Interior DOFs have a single site
/// with share 1; a vertex DOF has one site per incident edge, weighted by the
/// lumped-mass share h_e/2 of that edge's end cell. Per-edge nodal data
/// (reaction terms, noise coefficients) is combined through these shares so
/// the shared vertex value stays single-valued.
struct NodalSite {
  EdgeIndex edge;
  double x;
  double share;
};

std::vector<std::vector<NodalSite>> nodal_sites(const Mesh& mesh);

}  // namespace graphsde
