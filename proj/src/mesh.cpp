#include "graphsde/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphsde {

Mesh::Mesh(const MetricGraph& graph, double target_h) : graph_(&graph) {
  if (!(target_h > 0.0))
    throw std::invalid_argument("build_mesh: target_h must be positive");
  const std::size_t m = graph.num_edges();
  cells_.resize(m);
  widths_.resize(m);
  interior_.resize(m);
  std::size_t next = graph.num_vertices();
  for (EdgeIndex e = 0; e < m; ++e) {
    const double len = graph.edges[e].length;
    std::size_t ne =
        std::max<std::size_t>(2, static_cast<std::size_t>(
                                     std::ceil(len / target_h - 1e-12)));
    cells_[e] = ne;
    widths_[e] = len / static_cast<double>(ne);
    interior_[e] = next;
    next += ne - 1;
  }
  num_dofs_ = next;
}

double Mesh::resolution() const {
  return *std::max_element(widths_.begin(), widths_.end());
}

std::size_t Mesh::dof(EdgeIndex e, std::size_t node) const {
  if (node == 0) return graph_->edges[e].from;
  if (node == cells_[e]) return graph_->edges[e].to;
  return interior_[e] + node - 1;
}

std::size_t Mesh::nearest_dof(EdgeIndex e, double x) const {
  const double h = widths_[e];
  auto node = static_cast<std::size_t>(
      std::clamp(std::llround(x / h), 0ll, static_cast<long long>(cells_[e])));
  return dof(e, node);
}

std::vector<double> GridFunction::edge_values(EdgeIndex e) const {
  const std::size_t ne = mesh->num_cells(e);
  std::vector<double> out(ne + 1);
  for (std::size_t j = 0; j <= ne; ++j) out[j] = (*this)[mesh->dof(e, j)];
  return out;
}

GridFunction sample_on_mesh(const Mesh& mesh,
                            const std::function<double(EdgeIndex, double)>& f) {
  GridFunction u(mesh);
  // Later edges overwrite shared vertex values; coincides for continuous f.
  for (EdgeIndex e = mesh.graph().num_edges(); e-- > 0;)
    for (std::size_t j = 0; j <= mesh.num_cells(e); ++j)
      u[mesh.dof(e, j)] = f(e, mesh.node_coord(e, j));
  return u;
}

std::vector<std::vector<NodalSite>> nodal_sites(const Mesh& mesh) {
  const MetricGraph& g = mesh.graph();
  std::vector<std::vector<NodalSite>> sites(mesh.num_dofs());
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const double half = 0.5 * mesh.cell_width(e);
    const std::size_t ne = mesh.num_cells(e);
    sites[mesh.dof(e, 0)].push_back({e, 0.0, half});
    sites[mesh.dof(e, ne)].push_back({e, g.edges[e].length, half});
    for (std::size_t j = 1; j < ne; ++j)
      sites[mesh.dof(e, j)].push_back({e, mesh.node_coord(e, j), 1.0});
  }
  for (auto& list : sites) {
    double total = 0.0;
    for (const NodalSite& s : list) total += s.share;
    for (NodalSite& s : list) s.share /= total;
  }
  return sites;
}

}  // namespace graphsde
