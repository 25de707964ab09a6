#pragma once

#include <Eigen/Sparse>

#include <cstddef>
#include <vector>

#include "graphsde/mesh.hpp"

namespace graphsde {

using SparseMat = Eigen::SparseMatrix<double>;

/// Sparse matrices realizing the generator at mesh resolution h, assembled
/// with piecewise-linear elements from the bilinear form
///   a(u,v) = sum_e int c_e u' v' + sum_e int p_e u v - <M Lu, Lv>.
/// The Kirchhoff condition M Lu + Cu = 0 enters as the natural condition
/// through the -<M Lu, Lv> block; continuity is hard-coded in the DOF map.
struct DiscreteOperator {
  const Mesh* mesh = nullptr;
  SparseMat mass;        // Gram matrix of hat functions, SPD
  SparseMat stiffness;   // the form a(u,v); symmetric, PSD for valid M
  SparseMat convection;  // sum_e int (d_e u') v, nonsymmetric
  Eigen::VectorXd lumped_mass;  // row sums of mass
  double resolution = 0.0;      // max cell width
  bool has_drift = false;       // any d_e not identically zero

  std::size_t num_dofs() const { return mesh->num_dofs(); }

  double mass_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return u.dot(mass * v);
  }
  double mass_norm(const Eigen::VectorXd& u) const {
    return std::sqrt(std::max(0.0, mass_inner(u, u)));
  }
};

/// Element integrals of c_e, p_e, d_e by 2-point Gauss quadrature per cell;
/// exact for linear elements with linear coefficient data, and symmetric
/// contributions are assembled bitwise symmetrically.
DiscreteOperator assemble(const MetricGraph& g, const Mesh& mesh);

/// Discrete A_p u = mass^{-1} (-stiffness u + convection u).
GridFunction generator_apply(const DiscreteOperator& op, const GridFunction& u);

/// Solves A u = f (both grid functions), i.e. (stiffness - convection) u =
/// -mass f. Requires a valid coupling matrix so the form is definite.
GridFunction solve_generator(const DiscreteOperator& op, const GridFunction& f);

/// Diagnostic residual of the natural vertex condition: for each vertex v,
///   (M Lu)_v + sum_{e in E_v} c_e(v) * (one-sided second-order difference
///   derivative of u_e taken into the edge).
/// The weak form enforces this only in the limit; on stationary solves the
/// max residual decays at least at O(h).
std::vector<double> kirchhoff_residual(const DiscreteOperator& op,
                                       const GridFunction& u);

/// Generalized symmetric eigenpairs of stiffness w = lambda mass w with
/// eigenvectors mass-normalized (w^T mass w = 1), lambda ascending.
struct EigenPairs {
  Eigen::VectorXd pencil_eigenvalues;  // lambda_0 <= lambda_1 <= ...
  Eigen::MatrixXd vectors;             // column k pairs with lambda_k
};

/// Dense generalized solve; the operators here are desk-scale.
/// pre: drift-free (convection assembled from d == 0).
EigenPairs generalized_eigenpairs(const DiscreteOperator& op);

/// The `count` generator eigenvalues (-lambda) closest to zero, ascending,
/// so the last entry is the leading eigenvalue. All are <= 0; strictly < 0
/// when -M is positive definite.
std::vector<double> spectrum(const DiscreteOperator& op, std::size_t count);

}  // namespace graphsde
