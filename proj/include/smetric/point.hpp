#pragma once

#include <boost/container/small_vector.hpp>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>

#include "smetric/error.hpp"

namespace smetric {

/// A point of the ground set: a finite-dimensional real vector with finite
/// coordinates. The dimension is fixed at construction and is at least 1 for
/// any point built through the public constructors; the default constructor
/// exists only so containers can hold slots before assignment.
class Point {
 public:
  using Storage = boost::container::small_vector<double, 4>;

  Point() = default;

  Point(std::initializer_list<double> coords) : c_(coords) { validate(); }

  explicit Point(Storage coords) : c_(std::move(coords)) { validate(); }

  static Point zero(int dim) {
    if (dim < 1) throw DomainError("point dimension must be >= 1");
    return Point(Storage(static_cast<std::size_t>(dim), 0.0));
  }

  int dim() const { return static_cast<int>(c_.size()); }

  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }

  const double* begin() const { return c_.data(); }
  const double* end() const { return c_.data() + c_.size(); }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.c_.size() != b.c_.size()) return false;
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  void validate() const {
    if (c_.empty()) throw DomainError("point dimension must be >= 1");
    for (double v : c_)
      if (!std::isfinite(v)) throw DomainError("point coordinate is not finite");
  }

  Storage c_;
};

inline void require_same_dim(const Point& a, const Point& b) {
  if (a.dim() != b.dim())
    throw DimensionError("points have dimensions " + std::to_string(a.dim()) +
                         " and " + std::to_string(b.dim()));
}

inline Point operator-(const Point& a, const Point& b) {
  require_same_dim(a, b);
  Point::Storage out;
  out.reserve(static_cast<std::size_t>(a.dim()));
  for (int i = 0; i < a.dim(); ++i) out.push_back(a[i] - b[i]);
  return Point(std::move(out));
}

inline Point operator+(const Point& a, const Point& b) {
  require_same_dim(a, b);
  Point::Storage out;
  out.reserve(static_cast<std::size_t>(a.dim()));
  for (int i = 0; i < a.dim(); ++i) out.push_back(a[i] + b[i]);
  return Point(std::move(out));
}

inline Point operator*(double s, const Point& a) {
  Point::Storage out;
  out.reserve(static_cast<std::size_t>(a.dim()));
  for (int i = 0; i < a.dim(); ++i) out.push_back(s * a[i]);
  return Point(std::move(out));
}

inline double norm_l1(const Point& a) {
  double s = 0;
  for (double v : a) s += std::fabs(v);
  return s;
}

inline double norm_l2(const Point& a) {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

inline double norm_linf(const Point& a) {
  double s = 0;
  for (double v : a) s = std::max(s, std::fabs(v));
  return s;
}

std::string to_string(const Point& p);

}  // namespace smetric
