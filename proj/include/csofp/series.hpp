#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "csofp/affine_map.hpp"

namespace csofp {

/// Number of stored coefficients c_0 .. c_127 unless a caller asks otherwise.
inline constexpr std::size_t kDefaultOrder = 128;

/// Truncated power series about 0 on the open disc D_R, normed by
///
///     ||f||_R = sum_n |c_n| R^n  (+ tail_bound),
///
/// where tail_bound is a conservative l1 bound on everything that was discarded
/// (coefficients beyond the stored ones, expansion remainders). Every
/// operation below propagates it, so norms and point values carry an error
/// envelope.
///
/// Values are immutable; all operations return new series.
class DiscSeries {
 public:
  /// Validates radius > 0, finite coefficients and a finite nonnegative tail.
  DiscSeries(std::vector<Complex> coeffs, double radius, double tail_bound = 0.0);

  static DiscSeries zero(double radius, std::size_t size = 1);
  /// Z_n, the basis function z^n.
  static DiscSeries monomial(std::size_t n, double radius);
  static DiscSeries constant(Complex value, double radius);

  double radius() const noexcept { return radius_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  /// c_n, or 0 beyond the stored range.
  Complex coeff(std::size_t n) const noexcept { return n < coeffs_.size() ? coeffs_[n] : Complex{}; }
  double tail_bound() const noexcept { return tail_bound_; }

  /// sum |c_n| R^n over stored coefficients only.
  double polynomial_norm() const noexcept;
  double l1_norm() const noexcept { return polynomial_norm() + tail_bound_; }

  DiscSeries scaled(Complex w) const;
  /// Same coefficients with `extra` added to the tail bound.
  DiscSeries with_added_tail(double extra) const;
  /// Same coefficients, tail bound dropped: the exact polynomial part.
  DiscSeries polynomial_part() const;
  /// Keeps c_0..c_{n-1}; the l1 mass of dropped coefficients moves into the tail.
  DiscSeries truncated(std::size_t n) const;
  /// Zero-pads to at least n coefficients.
  DiscSeries padded(std::size_t n) const;

 private:
  std::vector<Complex> coeffs_;
  double radius_;
  double tail_bound_;
};

DiscSeries make_series(std::span<const Complex> coeffs, double radius);

double l1_norm(const DiscSeries& f) noexcept;

/// sum_k w_k f_k. All inputs must share one radius; the result keeps the
/// longest coefficient range and tail sum_k |w_k| tail_k.
DiscSeries linear_combine(std::span<const std::pair<Complex, DiscSeries>> pairs);

DiscSeries operator+(const DiscSeries& a, const DiscSeries& b);
DiscSeries operator-(const DiscSeries& a, const DiscSeries& b);
DiscSeries operator*(Complex w, const DiscSeries& f);

/// f o map about 0 on D_{out_radius}. Requires |s| out_radius + |t| < f.radius().
///
/// The composition of a degree-N polynomial with an affine map is again of
/// degree N, so no coefficients are lost; the tail bound carries over
/// unchanged because ||h o map||_r <= ||h||_R whenever |s| r + |t| <= R.
DiscSeries compose_affine(const DiscSeries& f, const AffineMap& map, double out_radius);

/// Termwise derivative on the same disc.
///
/// The discarded tail has no l1 bound on the same radius, so it is inflated by
/// the Cauchy factor 1 / delta^2 (m = 1) for an inner margin delta. A
/// nonpositive `inner_margin` selects delta = R / 10.
DiscSeries differentiate(const DiscSeries& f, double inner_margin = 0.0);

/// I f(z) = int_0^z f(w) dw. Grows the stored range by one coefficient.
DiscSeries integrate_from_zero(const DiscSeries& f);

/// Principal-branch log(a + b z) on D_radius. Requires |b| radius < |a|.
DiscSeries log_affine(Complex a, Complex b, double radius, std::size_t size = kDefaultOrder);

/// (a + b z)^(-k), k >= 1, on D_radius. Requires |b| radius < |a|.
DiscSeries inverse_power_affine(Complex a, Complex b, int k, double radius,
                                std::size_t size = kDefaultOrder);

/// Horner evaluation of the stored polynomial; requires |z| < radius. The true
/// value differs by at most tail_bound().
Complex eval_at(const DiscSeries& f, Complex z);

}  // namespace csofp
