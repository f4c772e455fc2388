#pragma once

#include <complex>
#include <string>

namespace csofp {

using Complex = std::complex<double>;

bool is_finite(Complex z) noexcept;

/// Locations closer than this (relative to max(1, |z|)) are treated as the same point.
inline constexpr double kLocationTolerance = 1e-12;

bool same_point(Complex a, Complex b, double rel_tol = kLocationTolerance) noexcept;

std::string to_string(Complex z);

/// Affine contraction z -> s (z - z_fix) + z_fix = s z + t with |s| < 1.
///
/// A rate of exactly zero is admitted: the map is then the constant z -> t,
/// whose fixed point is t itself.
class AffineMap {
 public:
  AffineMap(Complex rate, Complex fixed_point);

  static AffineMap from_rate_offset(Complex rate, Complex offset);
  static AffineMap constant(Complex value);

  Complex rate() const noexcept { return rate_; }
  Complex fixed_point() const noexcept { return fixed_point_; }
  /// t = alpha(0) = z_fix (1 - s).
  Complex offset() const noexcept { return offset_; }
  bool is_degenerate() const noexcept { return rate_ == Complex{0.0, 0.0}; }

  Complex operator()(Complex z) const noexcept { return rate_ * z + offset_; }

  /// Unique w with alpha(w) = z. Snaps to the fixed point when z is (numerically) fixed.
  Complex preimage(Complex z) const;

  bool fixes(Complex z) const noexcept;

  /// (*this) o inner.
  AffineMap after(const AffineMap& inner) const;

  bool approx_equal(const AffineMap& other, double rel_tol = kLocationTolerance) const noexcept;

 private:
  AffineMap(Complex rate, Complex fixed_point, Complex offset);

  Complex rate_;
  Complex fixed_point_;
  Complex offset_;
};

}  // namespace csofp
