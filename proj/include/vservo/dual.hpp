#pragma once

// Forward-mode automatic differentiation scalar. A Dual carries a value and
// a vector of partial derivatives with respect to a declared set of active
// parameters; arithmetic propagates the chain rule exactly.
//
// Partials live in a fixed-capacity Eigen vector so evaluation never touches
// the heap. An empty partials vector means "constant": it behaves as a zero
// vector of whatever size the other operand carries, which keeps promotion
// of plain double literals cheap.

#include <Eigen/Core>

#include <cmath>

#include "vservo/errors.hpp"

namespace vservo {

inline constexpr int kMaxPartials = 160;

class Dual {
 public:
  using Partials = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxPartials, 1>;

  Dual() : v_(0.0) {}
  Dual(double v) : v_(v) {}  // NOLINT: implicit promotion of constants
  Dual(double v, Partials d) : v_(v), d_(std::move(d)) {}

  /// Active variable: value v, derivative slot `index` of `active_count`.
  static Dual seeded(double v, int active_count, int index) {
    if (active_count > kMaxPartials) {
      throw DimensionMismatch("Dual: active parameter count exceeds kMaxPartials");
    }
    Dual x(v);
    x.d_.setZero(active_count);
    x.d_(index) = 1.0;
    return x;
  }

  double value() const { return v_; }
  const Partials& partials() const { return d_; }
  bool is_constant() const { return d_.size() == 0; }

  Dual operator-() const { return {-v_, Partials(-d_)}; }

  Dual& operator+=(const Dual& o) {
    v_ += o.v_;
    add_scaled(o.d_, 1.0);
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v_ -= o.v_;
    add_scaled(o.d_, -1.0);
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    if (o.d_.size() != 0) {
      if (d_.size() == 0) {
        d_ = v_ * o.d_;
      } else {
        d_ = o.v_ * d_ + v_ * o.d_;
      }
    } else {
      d_ *= o.v_;
    }
    v_ *= o.v_;
    return *this;
  }
  Dual& operator/=(const Dual& o) { return *this *= reciprocal(o); }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v_ < b.v_; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.v_ >= b.v_; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Dual& a, const Dual& b) { return a.v_ != b.v_; }

  /// Chain rule for a unary function: g(v), g'(v).
  friend Dual apply_unary(const Dual& x, double value, double slope) {
    return {value, Partials(slope * x.d_)};
  }

  friend Dual reciprocal(const Dual& x) {
    const double inv = 1.0 / x.v_;
    return apply_unary(x, inv, -inv * inv);
  }

 private:
  void add_scaled(const Partials& other, double sign) {
    if (other.size() == 0) return;
    if (d_.size() == 0) {
      d_ = sign * other;
    } else {
      d_ += sign * other;
    }
  }

  double v_;
  Partials d_;
};

inline double value_of(const Dual& x) { return x.value(); }

inline Dual sin(const Dual& x) { return apply_unary(x, std::sin(x.value()), std::cos(x.value())); }
inline Dual cos(const Dual& x) { return apply_unary(x, std::cos(x.value()), -std::sin(x.value())); }
inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return apply_unary(x, s, 0.5 / s);
}
inline Dual exp(const Dual& x) {
  const double e = std::exp(x.value());
  return apply_unary(x, e, e);
}
inline Dual log(const Dual& x) { return apply_unary(x, std::log(x.value()), 1.0 / x.value()); }
inline Dual abs(const Dual& x) { return x.value() < 0.0 ? -x : x; }
inline Dual abs2(const Dual& x) { return x * x; }
inline bool isfinite(const Dual& x) { return std::isfinite(x.value()); }

}  // namespace vservo

namespace Eigen {

template <>
struct NumTraits<vservo::Dual> : NumTraits<double> {
  using Real = vservo::Dual;
  using NonInteger = vservo::Dual;
  using Nested = vservo::Dual;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 8,
    MulCost = 16,
  };
  static inline Real epsilon() { return vservo::Dual(NumTraits<double>::epsilon()); }
  static inline Real dummy_precision() { return vservo::Dual(NumTraits<double>::dummy_precision()); }
  static inline Real highest() { return vservo::Dual(NumTraits<double>::highest()); }
  static inline Real lowest() { return vservo::Dual(NumTraits<double>::lowest()); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<vservo::Dual, double, BinaryOp> {
  using ReturnType = vservo::Dual;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, vservo::Dual, BinaryOp> {
  using ReturnType = vservo::Dual;
};

}  // namespace Eigen
