#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "graphsde/assembly.hpp"
#include "graphsde/mesh.hpp"
#include "graphsde/rng.hpp"

namespace graphsde {

enum class NoiseKind { White, Coloured };

/// Built-in coefficient families h(t, x, eta). All satisfy the growth bound
/// |h| <= sigma (1 + |eta|)^growth_ratio by construction, where growth_ratio
/// is k/K from the reaction exponents.
enum class NoiseFamily {
  Constant,    // sigma
  Linear,      // sigma eta, truncated to the growth envelope
  Saturating,  // sigma eta / (1 + |eta|)^(1 - k/K)
};

/// One spatial mode of a finite-rank coloured kernel, living on a single
/// edge: the profile sampled on that edge's grid, scaled by amplitude, driven
/// by one scalar Brownian motion.
struct ColouredMode {
  EdgeIndex edge = 0;
  Profile profile = Profile::constant(1.0);
  double amplitude = 0.0;
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::White;
  NoiseFamily family = NoiseFamily::Constant;
  double sigma = 0.0;
  double growth_ratio = 1.0;  // k/K
  std::vector<ColouredMode> modes;

  bool trivial() const {
    return sigma == 0.0 && (kind == NoiseKind::White || modes.empty());
  }

  double coefficient(double eta) const;
};

/// Mass-lumped projection of the per-edge cylindrical increments onto the
/// hat-function basis: per-DOF Gaussians, independent across DOFs, with
/// variance dt/m_i (m_i = lumped mass). Vertex DOFs carry the lumped share of
/// all incident edge cells.
struct NoiseIncrement {
  Eigen::VectorXd values;
};

/// Increment over one step of width n_substeps * dt_sub, assembled as the sum
/// of the n_substeps fine-level draws starting at substep index first_substep.
/// A coarse run at 2 dt therefore reproduces exactly the summed increments of
/// the coupled dt run.
NoiseIncrement sample_white_increment(const Eigen::VectorXd& lumped_mass,
                                      double dt_sub, std::uint64_t first_substep,
                                      std::size_t n_substeps,
                                      const rng::Stream& stream);

/// Coloured kernel resolved on a mesh: mode vectors on the global DOF set.
class PreparedKernel {
public:
  PreparedKernel() = default;
  /// Samples each mode's profile on its edge grid (finite-rank R_e).
  PreparedKernel(const std::vector<ColouredMode>& modes, const Mesh& mesh);
  /// Modes given directly as DOF vectors with amplitudes.
  PreparedKernel(std::vector<Eigen::VectorXd> vectors,
                 std::vector<double> amplitudes);

  std::size_t rank() const { return amplitudes_.size(); }
  const Eigen::VectorXd& mode(std::size_t r) const { return vectors_[r]; }
  double amplitude(std::size_t r) const { return amplitudes_[r]; }

  /// increment = sum_r amplitude_r * mode_r * Normal(0, dt), with the same
  /// substep-sum structure as the white sampler.
  NoiseIncrement sample(double dt_sub, std::uint64_t first_substep,
                        std::size_t n_substeps,
                        const rng::Stream& stream) const;

private:
  std::vector<Eigen::VectorXd> vectors_;
  std::vector<double> amplitudes_;
  Eigen::Index dofs_ = 0;
};

/// Nodewise multiplication operator: (Gamma(u) dW)_i = h(u_i) dW_i. Vertex
/// DOFs are single-valued, so every incident edge sees the same u(v); the
/// built-in families share one coefficient across edges.
Eigen::VectorXd apply_gamma(const NoiseSpec& spec, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& dw);

}  // namespace graphsde
