#pragma once

#include <Eigen/Dense>

#include <compare>
#include <limits>
#include <stdexcept>

namespace zerofpr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A value in R ∪ {+∞}. Nonsmooth terms may be infinite (indicators), so
/// every value that comes out of a NonsmoothOracle is carried in this form.
/// There is deliberately no arithmetic on the infinite branch: callers have
/// to test `is_finite()` and unwrap.
class ExtendedReal {
public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {
    if (!(v == v) || v == std::numeric_limits<double>::infinity() ||
        v == -std::numeric_limits<double>::infinity()) {
      throw std::domain_error("ExtendedReal: finite branch requires a finite double");
    }
  }

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.finite_ = false;
    return r;
  }

  constexpr bool is_finite() const { return finite_; }

  /// Unwraps the finite branch; throws on +∞.
  constexpr double value() const {
    if (!finite_) throw std::domain_error("ExtendedReal: value() on +inf");
    return value_;
  }

  /// +∞ maps to the IEEE infinity, for printing and comparisons only.
  constexpr double to_double() const {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
  }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }
  friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a,
                                                     const ExtendedReal& b) {
    return a.to_double() <=> b.to_double();
  }

private:
  double value_ = 0.0;
  bool finite_ = true;
};

} // namespace zerofpr
