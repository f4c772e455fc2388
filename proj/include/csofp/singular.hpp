#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "csofp/affine_map.hpp"
#include "csofp/series.hpp"

namespace csofp {

enum class SingularKind { Log, Pole };

/// weight * log(z - location)           (Log, principal branch)
/// weight * (z - location)^(-order)     (Pole, order >= 1)
struct SingularTerm {
  SingularKind kind = SingularKind::Log;
  Complex location{};
  int order = 0;  // 0 for Log
  Complex weight{1.0, 0.0};

  static SingularTerm log(Complex location, Complex weight = 1.0);
  static SingularTerm pole(Complex location, int order, Complex weight = 1.0);

  Complex value(Complex z) const;
  /// Same kind, order and (numerically) location.
  bool same_shape(const SingularTerm& other) const noexcept;
};

/// A function analytic on D_R apart from finitely many log and pole
/// singularities: sum of singular terms plus a DiscSeries regular part.
///
/// Terms are kept normalized: pairwise distinct shapes, no zero weights, all
/// locations strictly inside the disc of the regular part. Branch-dependent
/// additive constants live in the regular part, so identities between two
/// representations hold modulo 2 pi i times the log weights.
class SingularFunction {
 public:
  /// Validates and normalizes. Duplicate shapes and out-of-disc locations are errors.
  SingularFunction(std::vector<SingularTerm> terms, DiscSeries regular);

  static SingularFunction regular_only(DiscSeries regular);

  const std::vector<SingularTerm>& terms() const noexcept { return terms_; }
  const DiscSeries& regular() const noexcept { return regular_; }
  double radius() const noexcept { return regular_.radius(); }
  bool is_regular() const noexcept { return terms_.empty(); }

 private:
  struct Trusted {};
  SingularFunction(Trusted, std::vector<SingularTerm> terms, DiscSeries regular);
  friend class SingularSum;
  friend SingularFunction add_regular(const SingularFunction& f, const DiscSeries& g);

  std::vector<SingularTerm> terms_;
  DiscSeries regular_;
};

SingularFunction make_singular(std::vector<SingularTerm> terms, DiscSeries regular);

/// Principal-branch value; requires |z| < R and z away from every singular location.
Complex eval_singular(const SingularFunction& f, Complex z);

/// Locations of the nonzero terms; coincident locations of different kinds appear once.
std::vector<Complex> unbounded_set(const SingularFunction& f);

/// Accumulates singular terms anywhere in the plane, constants and regular
/// series on one disc, cancelling matching shapes as they arrive. finish()
/// keeps the terms inside D_R symbolic and expands those outside into the
/// regular part.
class SingularSum {
 public:
  SingularSum(double radius, std::size_t size, double margin = kRegularityMargin);

  /// Relative gap required between an expanded singularity and the disc boundary.
  static constexpr double kRegularityMargin = 1e-6;

  void add_term(const SingularTerm& term);
  void add_constant(Complex c);
  void add_series(Complex weight, const DiscSeries& f);
  void add(Complex weight, const SingularFunction& f);
  /// weight * (term o map), exactly: transported singularity, constant, or both.
  void add_pullback(Complex weight, const SingularTerm& term, const AffineMap& map);

  /// Terms remaining after cancellation, before expansion.
  std::vector<SingularTerm> pending_terms() const;

  SingularFunction finish() const;

 private:
  struct Entry {
    SingularTerm term;
    double mass;  // sum of |weight| of the contributions, for the cancellation test
  };

  double radius_;
  std::size_t size_;
  double margin_;
  std::vector<Entry> entries_;
  Complex constant_{};
  std::vector<std::pair<Complex, DiscSeries>> series_;
};

/// Exact representation of term o map on D_radius.
///
/// For a map with rate s != 0 the singularity moves to the preimage
/// w = map^{-1}(location): log(s z + t - z0) = log(z - w) + log s and
/// (s z + t - z0)^{-k} = s^{-k} (z - w)^{-k}. When the location is the map's
/// fixed point, w is the location itself. A preimage outside D_radius (with
/// the regularity margin) is expanded into the regular part; one inside stays
/// symbolic. A constant map contributes the constant term(constant value).
///
/// Errors when a constant map lands on the singular location, or when the
/// preimage sits on the disc boundary within the regularity margin.
SingularFunction pullback_term(const SingularTerm& term, const AffineMap& map, double radius,
                               std::size_t size = kDefaultOrder);

SingularFunction operator+(const SingularFunction& a, const SingularFunction& b);
SingularFunction operator-(const SingularFunction& a, const SingularFunction& b);
SingularFunction operator*(Complex w, const SingularFunction& f);

/// f with `g` added to its regular part.
SingularFunction add_regular(const SingularFunction& f, const DiscSeries& g);

}  // namespace csofp
