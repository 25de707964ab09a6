#include "graphsde/graph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <set>
#include <sstream>

namespace graphsde {

std::size_t MetricGraph::degree(VertexIndex v) const {
  std::size_t d = 0;
  for (const Edge& e : edges) d += (e.from == v) + (e.to == v);
  return d;
}

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

namespace {

void add(ValidationReport& r, std::string code, std::string msg) {
  r.violations.push_back({std::move(code), std::move(msg)});
}

std::string edge_label(const Edge& e, EdgeIndex idx) {
  std::ostringstream os;
  os << "edge " << (e.id.empty() ? std::to_string(idx) : e.id);
  return os.str();
}

}  // namespace

ValidationReport validate_graph(const MetricGraph& g,
                                const ValidationOptions& opts) {
  ValidationReport report;
  const std::size_t n = g.num_vertices();
  const std::size_t m = g.num_edges();

  if (n == 0) add(report, "graph.no_vertices", "graph has no vertices");
  if (m == 0) add(report, "graph.no_edges", "graph has no edges");

  std::set<std::pair<VertexIndex, VertexIndex>> seen;
  for (EdgeIndex i = 0; i < m; ++i) {
    const Edge& e = g.edges[i];
    const std::string label = edge_label(e, i);

    if (e.from >= n || e.to >= n) {
      add(report, "edge.endpoint_unknown",
          label + " references a vertex outside the vertex list");
      continue;
    }
    if (e.from == e.to)
      add(report, "graph.loop", label + " is a loop at vertex " +
                                    g.vertices[e.from]);
    auto key = std::minmax(e.from, e.to);
    if (!seen.insert(key).second)
      add(report, "graph.multi_edge",
          label + " duplicates a vertex pair (graph must be simple)");

    if (!(e.length > 0.0))
      add(report, "edge.length_nonpositive",
          label + " has nonpositive length");
    if (!e.diffusion.covers(e.length) || !e.drift.covers(e.length) ||
        !e.potential.covers(e.length))
      add(report, "edge.profile_incomplete",
          label + " has a tabulated profile not covering [0, length]");
    if (e.length > 0.0) {
      if (!(e.diffusion.min_on(e.length) > 0.0))
        add(report, "edge.diffusion_nonpositive",
            label + " has diffusion coefficient c_e <= 0 somewhere");
      if (e.potential.min_on(e.length) < 0.0)
        add(report, "edge.potential_negative",
            label + " has potential p_e < 0 somewhere");
    }
  }

  for (VertexIndex v = 0; v < n; ++v)
    if (g.degree(v) == 0)
      add(report, "vertex.isolated",
          "vertex " + g.vertices[v] + " has degree 0");

  const Eigen::MatrixXd& M = g.coupling;
  if (static_cast<std::size_t>(M.rows()) != n ||
      static_cast<std::size_t>(M.cols()) != n) {
    add(report, "coupling.dimension_mismatch",
        "coupling matrix is not n x n");
    return report;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (!std::isfinite(M(i, k))) {
        add(report, "coupling.not_finite",
            "coupling matrix has a non-finite entry");
        return report;
      }
  bool symmetric = true;
  for (std::size_t i = 0; i < n && symmetric; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      if (M(i, k) != M(k, i)) {  // exact, as stored
        symmetric = false;
        break;
      }
  if (!symmetric)
    add(report, "coupling.not_symmetric",
        "coupling matrix is not symmetric as stored");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (i != k && M(i, k) < 0.0) {
        std::ostringstream os;
        os << "coupling entry (" << i << "," << k << ") = " << M(i, k)
           << " is negative off-diagonal";
        add(report, "coupling.offdiagonal_negative", os.str());
      }
  for (std::size_t i = 0; i < n; ++i) {
    double row = M.row(static_cast<Eigen::Index>(i)).sum();
    if (!(row <= -opts.row_sum_margin)) {
      std::ostringstream os;
      os << "coupling row " << i << " sums to " << row
         << ", not strictly negative";
      add(report, "coupling.row_sum_not_negative", os.str());
    }
  }
  return report;
}

VertexConditionCount vertex_condition_count(const MetricGraph& g) {
  VertexConditionCount c;
  for (VertexIndex v = 0; v < g.num_vertices(); ++v)
    c.continuity += g.degree(v) - 1;
  c.kirchhoff = g.num_vertices();
  c.total = c.continuity + c.kirchhoff;
  return c;
}

std::vector<std::vector<IncidentEdge>> incidence_maps(const MetricGraph& g) {
  std::vector<std::vector<IncidentEdge>> maps(g.num_vertices());
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    maps[g.edges[e].from].push_back({e, EndpointSide::Left});
    maps[g.edges[e].to].push_back({e, EndpointSide::Right});
  }
  return maps;
}

double min_eigenvalue_neg_coupling(const Eigen::MatrixXd& coupling) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-coupling);
  return es.eigenvalues().minCoeff();
}

}  // namespace graphsde
