#include "graphsde/assembly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace graphsde {

namespace {
// 2-point Gauss on [0,1].
constexpr double kGaussOffset = 0.28867513459481287;  // 1/(2 sqrt 3)
}  // namespace

DiscreteOperator assemble(const MetricGraph& g, const Mesh& mesh) {
  const auto n_dofs = static_cast<Eigen::Index>(mesh.num_dofs());
  std::vector<Eigen::Triplet<double>> t_mass, t_stiff, t_conv;
  const std::size_t cells_total = [&] {
    std::size_t c = 0;
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) c += mesh.num_cells(e);
    return c;
  }();
  t_mass.reserve(4 * cells_total);
  t_stiff.reserve(4 * cells_total + g.num_vertices() * g.num_vertices());
  t_conv.reserve(4 * cells_total);

  bool has_drift = false;
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edges[e];
    const double h = mesh.cell_width(e);
    const double dphi[2] = {-1.0 / h, 1.0 / h};
    for (std::size_t cell = 0; cell < mesh.num_cells(e); ++cell) {
      const double x0 = mesh.node_coord(e, cell);
      const Eigen::Index dof[2] = {
          static_cast<Eigen::Index>(mesh.dof(e, cell)),
          static_cast<Eigen::Index>(mesh.dof(e, cell + 1))};
      double mloc[2][2] = {{0, 0}, {0, 0}};
      double sloc[2][2] = {{0, 0}, {0, 0}};
      double cloc[2][2] = {{0, 0}, {0, 0}};
      for (int q = 0; q < 2; ++q) {
        const double xi = 0.5 + (q == 0 ? -kGaussOffset : kGaussOffset);
        const double xq = x0 + h * xi;
        const double w = 0.5 * h;
        const double phi[2] = {1.0 - xi, xi};
        const double c = edge.diffusion(xq);
        const double p = edge.potential(xq);
        const double d = edge.drift(xq);
        if (d != 0.0) has_drift = true;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            mloc[a][b] += w * phi[a] * phi[b];
            sloc[a][b] += w * (c * dphi[a] * dphi[b] + p * phi[a] * phi[b]);
            cloc[a][b] += w * d * dphi[b] * phi[a];
          }
      }
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          t_mass.emplace_back(dof[a], dof[b], mloc[a][b]);
          t_stiff.emplace_back(dof[a], dof[b], sloc[a][b]);
          if (cloc[a][b] != 0.0) t_conv.emplace_back(dof[a], dof[b], cloc[a][b]);
        }
    }
  }

  // Vertex coupling: the -<M Lu, Lv> term contributes -b_ik at DOF (i, k).
  const std::size_t n = g.num_vertices();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double b = g.coupling(static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(k));
      if (b != 0.0)
        t_stiff.emplace_back(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(k), -b);
    }

  DiscreteOperator op;
  op.mesh = &mesh;
  op.mass.resize(n_dofs, n_dofs);
  op.stiffness.resize(n_dofs, n_dofs);
  op.convection.resize(n_dofs, n_dofs);
  op.mass.setFromTriplets(t_mass.begin(), t_mass.end());
  op.stiffness.setFromTriplets(t_stiff.begin(), t_stiff.end());
  op.convection.setFromTriplets(t_conv.begin(), t_conv.end());
  op.lumped_mass = op.mass * Eigen::VectorXd::Ones(n_dofs);
  op.resolution = mesh.resolution();
  op.has_drift = has_drift;
  return op;
}

GridFunction generator_apply(const DiscreteOperator& op,
                             const GridFunction& u) {
  if (u.mesh != op.mesh)
    throw std::invalid_argument("generator_apply: mesh mismatch");
  Eigen::VectorXd rhs = -(op.stiffness * u.values);
  if (op.has_drift) rhs += op.convection * u.values;
  Eigen::SimplicialLDLT<SparseMat> solver(op.mass);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("generator_apply: singular mass matrix");
  GridFunction out(*op.mesh);
  out.values = solver.solve(rhs);
  return out;
}

GridFunction solve_generator(const DiscreteOperator& op,
                             const GridFunction& f) {
  if (f.mesh != op.mesh)
    throw std::invalid_argument("solve_generator: mesh mismatch");
  Eigen::VectorXd rhs = -(op.mass * f.values);
  GridFunction out(*op.mesh);
  if (!op.has_drift) {
    Eigen::SimplicialLDLT<SparseMat> solver(op.stiffness);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("solve_generator: factorization failed");
    out.values = solver.solve(rhs);
  } else {
    SparseMat lhs = op.stiffness - op.convection;
    Eigen::SparseLU<SparseMat> solver(lhs);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("solve_generator: factorization failed");
    out.values = solver.solve(rhs);
  }
  return out;
}

std::vector<double> kirchhoff_residual(const DiscreteOperator& op,
                                       const GridFunction& u) {
  const Mesh& mesh = *op.mesh;
  const MetricGraph& g = mesh.graph();
  const std::size_t n = g.num_vertices();

  // Vertex values are single-valued; Lu is just the first n DOFs.
  Eigen::VectorXd lu = u.values.head(static_cast<Eigen::Index>(n));
  Eigen::VectorXd res = g.coupling * lu;

  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edges[e];
    const double h = mesh.cell_width(e);
    const std::size_t ne = mesh.num_cells(e);
    // Second-order one-sided differences for the derivative into the edge.
    const double d_from = (-3.0 * u[mesh.dof(e, 0)] + 4.0 * u[mesh.dof(e, 1)] -
                           u[mesh.dof(e, 2)]) /
                          (2.0 * h);
    const double d_to = (-3.0 * u[mesh.dof(e, ne)] +
                         4.0 * u[mesh.dof(e, ne - 1)] - u[mesh.dof(e, ne - 2)]) /
                        (2.0 * h);
    res[static_cast<Eigen::Index>(edge.from)] += edge.diffusion(0.0) * d_from;
    res[static_cast<Eigen::Index>(edge.to)] += edge.diffusion(edge.length) * d_to;
  }
  return {res.data(), res.data() + res.size()};
}

EigenPairs generalized_eigenpairs(const DiscreteOperator& op) {
  Eigen::MatrixXd a = Eigen::MatrixXd(op.stiffness);
  Eigen::MatrixXd b = Eigen::MatrixXd(op.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("generalized_eigenpairs: solver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

std::vector<double> spectrum(const DiscreteOperator& op, std::size_t count) {
  EigenPairs pairs = generalized_eigenpairs(op);
  const auto total = static_cast<std::size_t>(pairs.pencil_eigenvalues.size());
  count = std::min(count, total);
  std::vector<double> out(count);
  // Generator eigenvalues -lambda_k; the `count` closest to zero, ascending.
  for (std::size_t i = 0; i < count; ++i)
    out[i] = -pairs.pencil_eigenvalues[static_cast<Eigen::Index>(count - 1 - i)];
  return out;
}

}  // namespace graphsde
