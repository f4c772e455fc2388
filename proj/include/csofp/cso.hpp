#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csofp/affine_map.hpp"
#include "csofp/series.hpp"
#include "csofp/singular.hpp"

namespace csofp {

struct CsoTerm {
  Complex coefficient;
  AffineMap map;
};

/// Affine composition sum operator T f = sum_i a_i f(alpha_i(z)).
///
/// Coefficients are nonzero and maps pairwise distinct. Degenerate (constant)
/// maps are allowed; pinned and projected operators are built from them.
class AffineCso {
 public:
  explicit AffineCso(std::vector<CsoTerm> terms);

  std::span<const CsoTerm> terms() const noexcept { return terms_; }
  const CsoTerm& term(std::size_t i) const { return terms_.at(i); }
  std::size_t length() const noexcept { return terms_.size(); }
  /// max_i |s_i|
  double max_rate() const noexcept;

 private:
  std::vector<CsoTerm> terms_;
};

AffineCso make_cso(std::vector<CsoTerm> terms);

/// |s_i| R + |t_i| < R for all i: every alpha_i(D_R) sits strictly inside D_R.
bool maps_disc_into_itself(const AffineCso& T, double R) noexcept;

DiscSeries apply_series(const AffineCso& T, const DiscSeries& f, double out_radius);

/// T applied to a singular function on its own disc. Singularities are
/// transported to their preimages (see pullback_term); the regular part is
/// composed termwise. Expansions keep as many coefficients as f's regular part.
SingularFunction apply_singular(const AffineCso& T, const SingularFunction& f);

/// Coefficients of T Z_n = sum_i a_i (s_i z + t_i)^n, degree n.
std::vector<Complex> monomial_image(const AffineCso& T, std::size_t n);

/// ||T Z_n||_R, computed exactly from the binomial expansion.
double basis_image_norm(const AffineCso& T, std::size_t n, double R);

/// ||T Z_n||_R / R^n, evaluated in scaled form to avoid overflow.
double basis_ratio(const AffineCso& T, std::size_t n, double R);

/// sum_i |a_i| (|s_i| + |t_i| / R)^n, the analytic bound on basis_ratio.
double basis_ratio_bound(const AffineCso& T, std::size_t n, double R);

inline constexpr std::size_t kDefaultRatioCount = 200;

struct ContractionReport {
  double mu = 0.0;
  double radius = 0.0;
  /// max_i |t_i| / (mu - |s_i|): beyond it |s_i| + |t_i|/R < mu for all i.
  double R0 = 0.0;
  /// First index from which the analytic bound stays below mu^n; -1 when R <= R0.
  long N = -1;
  /// basis_ratio for n = 0 .. n_max.
  std::vector<double> ratios;
  /// basis_ratio_bound at n_max + 1; it dominates every later ratio when all
  /// |s_i| + |t_i|/R < 1, otherwise it is reported as +inf.
  double tail_ratio = 0.0;
  /// Certified operator norm on G_R: max(ratios, tail_ratio).
  double rate = 0.0;
  bool is_contraction = false;
};

/// Basis-function contraction diagnostics on G_R. Requires max_i |s_i| < mu <= 1.
ContractionReport contraction_report(const AffineCso& T, double mu, double R,
                                     std::size_t n_max = kDefaultRatioCount);

/// Operator norm bound on G_R without the mu bookkeeping: the rate of
/// contraction_report, found without evaluating ratios the analytic bound already covers.
double certified_rate(const AffineCso& T, double R, std::size_t n_max = kDefaultRatioCount);

/// Smallest R in [lo, hi] with basis_ratio(T, n, R) < 1, by bisection to
/// relative width tol. Requires the ratio to be >= 1 at lo and < 1 at hi.
double ratio_crossover_radius(const AffineCso& T, std::size_t n, double lo = 1e-3, double hi = 1e3,
                              double tol = 1e-12);

inline constexpr double kRelationTolerance = 1e-12;

struct PolyDegreeReport {
  /// Degrees m <= m_max with sum_i a_i s_i^m = 1 (relative tolerance).
  std::vector<std::size_t> degrees;
  /// sum_i |a_i| |s_i|^m < 1 for every m >= cutoff, so no degree beyond it qualifies.
  std::size_t cutoff = 0;
};

PolyDegreeReport poly_fp_degrees(const AffineCso& T, std::size_t m_max, double tol = kRelationTolerance);

/// Basis of ker(I - T) on polynomials of degree <= m, each as ascending
/// coefficients normalized to a unit leading coefficient. Singular values below
/// sv_tol * sigma_max count as zero.
std::vector<std::vector<Complex>> poly_fixed_points(const AffineCso& T, std::size_t m, double sv_tol = 1e-10);

/// Solves (I - T) p = q on polynomials of degree < q.size(). Throws when I - T
/// is singular there.
std::vector<Complex> solve_polynomial(const AffineCso& T, std::span<const Complex> q);

struct InducedOperator {
  AffineCso op;
  /// sum_i |a_i| |s_i|^m
  double norm_bound;
};

/// T^(m) g = sum_i a_i s_i^m g(alpha_i(z)). Terms whose coefficient vanishes
/// (constant maps once m >= 1) are dropped.
InducedOperator induced_m(const AffineCso& T, std::size_t m);

/// T_c f = T f - (T f)(c), with the constant terms materialized as degenerate maps.
/// Throws when every term cancels (T built from constant maps only).
AffineCso pinned(const AffineCso& T, Complex c);

/// T_j f = T f - (1/L) sum_{i != j} a_i (T f)(alpha_i(z_j)), L = sum_{i != j} a_i.
AffineCso projected_j(const AffineCso& T, std::size_t j);

/// z_i lies outside the closure of alpha_j(D_R) for every j != i.
bool fixed_point_independence(const AffineCso& T, std::size_t i, double R);

struct PointVerdict {
  Complex point;
  /// Indices of maps fixing the point.
  std::vector<std::size_t> fixed_by;
  /// (i, alpha_i(point)) where the image lands back in the set at a different point.
  std::vector<std::pair<std::size_t, Complex>> mapped_into_set;

  /// Conditions (i) and (ii): unstable action and at most one fixing map.
  bool simple() const noexcept { return mapped_into_set.empty() && fixed_by.size() <= 1; }
  /// Simple and fixed by exactly one map: the only places a simple seed may be singular.
  bool seedable() const noexcept { return simple() && fixed_by.size() == 1; }
  std::string describe() const;
};

std::vector<PointVerdict> simplicity_check(const AffineCso& T, std::span<const Complex> points);

struct Admissibility {
  bool admissible = false;
  std::size_t index = 0;  // the map fixing the term's location
  std::string condition;  // "a = 1" or "a = s^k"
  double mismatch = 0.0;  // |a - 1| or |a - s^k|
  std::string describe() const;
};

/// Log at z_i is a seed iff a_i = 1; a pole of order k iff a_i = s_i^k.
/// Throws when no map, or more than one, fixes the location.
Admissibility seed_admissibility(const AffineCso& T, const SingularTerm& term, double tol = kRelationTolerance);

}  // namespace csofp
