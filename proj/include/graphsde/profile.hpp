#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace graphsde {

/// Spatial coefficient profile on one edge: constant, polynomial in x, or a
/// table of samples with linear interpolation. Profiles are stored
/// symbolically and sampled at assembly time, so the same edge data can be
/// meshed at several resolutions.
class Profile {
public:
  enum class Kind { Constant, Polynomial, Table };

  Profile() : kind_(Kind::Constant), poly_{0.0} {}

  static Profile constant(double value);
  /// coeffs[j] multiplies x^j.
  static Profile polynomial(std::vector<double> coeffs);
  /// Samples (x_i, v_i), strictly increasing in x; must cover the endpoints
  /// of the edge the profile is attached to.
  static Profile table(std::vector<double> xs, std::vector<double> values);

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  double constant_value() const { return poly_[0]; }
  const std::vector<double>& coefficients() const { return poly_; }
  const std::vector<double>& table_xs() const { return table_x_; }
  const std::vector<double>& table_values() const { return table_v_; }

  /// Minimum over a scan grid plus the table/end points; used by validation.
  double min_on(double length, std::size_t scan = 64) const;
  double max_on(double length, std::size_t scan = 64) const;

  /// True when the table form has >= 2 samples, x strictly increasing, and
  /// [x_front, x_back] covers [0, length].
  bool covers(double length) const;

  std::string describe() const;

  bool operator==(const Profile& other) const = default;

private:
  Kind kind_;
  std::vector<double> poly_;     // Constant / Polynomial coefficients
  std::vector<double> table_x_;  // Table knots
  std::vector<double> table_v_;
};

}  // namespace graphsde
