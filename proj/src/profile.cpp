#include "graphsde/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "graphsde/text.hpp"

namespace graphsde {

Profile Profile::constant(double value) {
  Profile p;
  p.kind_ = Kind::Constant;
  p.poly_ = {value};
  return p;
}

Profile Profile::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  Profile p;
  p.kind_ = Kind::Polynomial;
  p.poly_ = std::move(coeffs);
  return p;
}

Profile Profile::table(std::vector<double> xs, std::vector<double> values) {
  if (xs.size() != values.size())
    throw std::invalid_argument("profile table: xs and values differ in size");
  if (xs.size() < 2)
    throw std::invalid_argument("profile table needs at least 2 samples");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument("profile table: x not strictly increasing");
  Profile p;
  p.kind_ = Kind::Table;
  p.table_x_ = std::move(xs);
  p.table_v_ = std::move(values);
  return p;
}

double Profile::operator()(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return poly_[0];
    case Kind::Polynomial: {
      double acc = 0.0;
      for (std::size_t j = poly_.size(); j-- > 0;) acc = acc * x + poly_[j];
      return acc;
    }
    case Kind::Table: {
      if (x <= table_x_.front()) return table_v_.front();
      if (x >= table_x_.back()) return table_v_.back();
      auto it = std::upper_bound(table_x_.begin(), table_x_.end(), x);
      std::size_t hi = static_cast<std::size_t>(it - table_x_.begin());
      std::size_t lo = hi - 1;
      double t = (x - table_x_[lo]) / (table_x_[hi] - table_x_[lo]);
      return (1.0 - t) * table_v_[lo] + t * table_v_[hi];
    }
  }
  return 0.0;
}

double Profile::min_on(double length, std::size_t scan) const {
  double m = (*this)(0.0);
  for (std::size_t i = 1; i <= scan; ++i)
    m = std::min(m, (*this)(length * static_cast<double>(i) / scan));
  if (kind_ == Kind::Table)
    for (double v : table_v_) m = std::min(m, v);
  return m;
}

double Profile::max_on(double length, std::size_t scan) const {
  double m = (*this)(0.0);
  for (std::size_t i = 1; i <= scan; ++i)
    m = std::max(m, (*this)(length * static_cast<double>(i) / scan));
  if (kind_ == Kind::Table)
    for (double v : table_v_) m = std::max(m, v);
  return m;
}

bool Profile::covers(double length) const {
  if (kind_ != Kind::Table) return true;
  return table_x_.front() <= 0.0 && table_x_.back() >= length;
}

std::string Profile::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant:
      os << fmt_g17(poly_[0]);
      break;
    case Kind::Polynomial:
      os << "poly:";
      for (std::size_t j = 0; j < poly_.size(); ++j)
        os << (j ? "," : "") << fmt_g17(poly_[j]);
      break;
    case Kind::Table:
      os << "table:";
      for (std::size_t j = 0; j < table_x_.size(); ++j)
        os << (j ? "," : "") << fmt_g17(table_x_[j]) << ":"
           << fmt_g17(table_v_[j]);
      break;
  }
  return os.str();
}

}  // namespace graphsde
