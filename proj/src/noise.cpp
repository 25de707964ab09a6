#include "graphsde/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace graphsde {

double NoiseSpec::coefficient(double eta) const {
  switch (family) {
    case NoiseFamily::Constant:
      return sigma;
    case NoiseFamily::Linear: {
      const double envelope = std::pow(1.0 + std::abs(eta), growth_ratio);
      const double mag = std::min(std::abs(eta), envelope);
      return sigma * (eta < 0.0 ? -mag : mag);
    }
    case NoiseFamily::Saturating:
      return sigma * eta / std::pow(1.0 + std::abs(eta), 1.0 - growth_ratio);
  }
  return 0.0;
}

NoiseIncrement sample_white_increment(const Eigen::VectorXd& lumped_mass,
                                      double dt_sub,
                                      std::uint64_t first_substep,
                                      std::size_t n_substeps,
                                      const rng::Stream& stream) {
  if (!(dt_sub > 0.0))
    throw std::invalid_argument("sample_white_increment: dt must be positive");
  NoiseIncrement inc;
  inc.values = Eigen::VectorXd::Zero(lumped_mass.size());
  for (Eigen::Index i = 0; i < lumped_mass.size(); ++i) {
    double z = 0.0;
    for (std::size_t s = 0; s < n_substeps; ++s)
      z += stream.normal(rng::Domain::WhiteNoise, first_substep + s,
                         static_cast<std::uint64_t>(i));
    inc.values[i] = z * std::sqrt(dt_sub / lumped_mass[i]);
  }
  return inc;
}

PreparedKernel::PreparedKernel(const std::vector<ColouredMode>& modes,
                               const Mesh& mesh)
    : dofs_(static_cast<Eigen::Index>(mesh.num_dofs())) {
  for (const ColouredMode& m : modes) {
    Eigen::VectorXd v =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_dofs()));
    for (std::size_t j = 0; j <= mesh.num_cells(m.edge); ++j)
      v[static_cast<Eigen::Index>(mesh.dof(m.edge, j))] =
          m.profile(mesh.node_coord(m.edge, j));
    vectors_.push_back(std::move(v));
    amplitudes_.push_back(m.amplitude);
  }
}

PreparedKernel::PreparedKernel(std::vector<Eigen::VectorXd> vectors,
                               std::vector<double> amplitudes)
    : vectors_(std::move(vectors)), amplitudes_(std::move(amplitudes)) {
  if (vectors_.size() != amplitudes_.size())
    throw std::invalid_argument("PreparedKernel: rank mismatch");
  dofs_ = vectors_.empty() ? 0 : vectors_.front().size();
}

NoiseIncrement PreparedKernel::sample(double dt_sub,
                                      std::uint64_t first_substep,
                                      std::size_t n_substeps,
                                      const rng::Stream& stream) const {
  if (!(dt_sub > 0.0))
    throw std::invalid_argument("PreparedKernel::sample: dt must be positive");
  NoiseIncrement inc;
  inc.values = Eigen::VectorXd::Zero(dofs_);  // empty kernel => zero increment
  const double scale = std::sqrt(dt_sub);
  for (std::size_t r = 0; r < vectors_.size(); ++r) {
    double z = 0.0;
    for (std::size_t s = 0; s < n_substeps; ++s)
      z += stream.normal(rng::Domain::ColouredNoise, first_substep + s,
                         static_cast<std::uint64_t>(r));
    inc.values += amplitudes_[r] * (z * scale) * vectors_[r];
  }
  return inc;
}

Eigen::VectorXd apply_gamma(const NoiseSpec& spec, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& dw) {
  if (u.size() != dw.size())
    throw std::invalid_argument("apply_gamma: size mismatch");
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    out[i] = spec.coefficient(u[i]) * dw[i];
  return out;
}

}  // namespace graphsde
