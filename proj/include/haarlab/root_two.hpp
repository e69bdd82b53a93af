#pragma once

#include <cstdint>
#include <string>

#include "haarlab/dyadic.hpp"

namespace haarlab {

/// Exact element (a + b*sqrt(2)) / 2^scale of the ring Z[sqrt 2][1/2].
/// Values of Haar functions, their products and the coefficients of the fork
/// relations all live here, so identities between them can be tested with ==.
class RootTwoDyadic {
public:
  constexpr RootTwoDyadic() = default;
  constexpr RootTwoDyadic(std::int64_t rational, std::int64_t root_two, int scale = 0)
      : a_(rational), b_(root_two), scale_(scale) {
    normalize();
  }

  static RootTwoDyadic from(const HaarValue& v) {
    if (v.sign == 0) return {};
    const std::int64_t mag = pow2(v.half_exponent / 2);
    return v.half_exponent % 2 == 0 ? RootTwoDyadic(v.sign * mag, 0) : RootTwoDyadic(0, v.sign * mag);
  }

  static constexpr RootTwoDyadic one() { return {1, 0}; }
  static constexpr RootTwoDyadic root_two() { return {0, 1}; }
  static constexpr RootTwoDyadic half() { return {1, 0, 1}; }
  /// 1/sqrt(2) == sqrt(2)/2
  static constexpr RootTwoDyadic inv_root_two() { return {0, 1, 1}; }

  std::int64_t rational_part() const { return a_; }
  std::int64_t root_two_part() const { return b_; }
  int scale() const { return scale_; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  double to_double() const {
    return (static_cast<double>(a_) + static_cast<double>(b_) * 1.4142135623730950488) /
           static_cast<double>(pow2(scale_));
  }

  friend RootTwoDyadic operator+(RootTwoDyadic x, RootTwoDyadic y) {
    const int s = x.scale_ > y.scale_ ? x.scale_ : y.scale_;
    return {(x.a_ << (s - x.scale_)) + (y.a_ << (s - y.scale_)),
            (x.b_ << (s - x.scale_)) + (y.b_ << (s - y.scale_)), s};
  }
  friend RootTwoDyadic operator-(RootTwoDyadic x) { return {-x.a_, -x.b_, x.scale_}; }
  friend RootTwoDyadic operator-(RootTwoDyadic x, RootTwoDyadic y) { return x + (-y); }
  friend RootTwoDyadic operator*(RootTwoDyadic x, RootTwoDyadic y) {
    return {x.a_ * y.a_ + 2 * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, x.scale_ + y.scale_};
  }
  RootTwoDyadic& operator+=(RootTwoDyadic y) { return *this = *this + y; }

  // Normalized representation is unique (sqrt 2 is irrational).
  friend bool operator==(const RootTwoDyadic&, const RootTwoDyadic&) = default;

  std::string str() const {
    return "(" + std::to_string(a_) + " + " + std::to_string(b_) + "*sqrt2)/2^" + std::to_string(scale_);
  }

private:
  constexpr void normalize() {
    if (a_ == 0 && b_ == 0) {
      scale_ = 0;
      return;
    }
    while (scale_ > 0 && a_ % 2 == 0 && b_ % 2 == 0) {
      a_ /= 2;
      b_ /= 2;
      --scale_;
    }
    // Negative scales are folded into the integers.
    while (scale_ < 0) {
      a_ *= 2;
      b_ *= 2;
      ++scale_;
    }
  }

  std::int64_t a_ = 0;
  std::int64_t b_ = 0;
  int scale_ = 0;
};

}  // namespace haarlab
