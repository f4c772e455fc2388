#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "csofp/affine_map.hpp"
#include "csofp/cso.hpp"
#include "csofp/fixpoint.hpp"

namespace csofp::golden {

struct GoldenConstants {
  double omega;
  AffineMap phi1;  // s = -omega, fixes 0
  AffineMap phi2;  // s = omega^2, fixes 1
  Complex c1;      // phi1(1) = -omega
  Complex c2;      // phi2(0) = omega
};

const GoldenConstants& constants();

/// M f(z) = f(-omega z) + f(omega^2 z + omega).
AffineCso make_M();

inline constexpr std::size_t kDefaultDepth = 18;

/// Runs `visit(level, s, t)` for every composed map phi_{i_1} o ... o phi_{i_n},
/// 0 <= n <= depth, depth first. Level 0 is the identity word.
template <typename Visit>
void for_each_word(std::size_t depth, Visit&& visit);

/// Word-expansion partial sum of f_1 (which = 1) or f_2 (which = 2) at z,
/// levels 0..depth, principal branches termwise.
Complex word_fixed_point(int which, std::size_t depth, Complex z);

/// Values at several points from one pass over the words; `threads` > 1
/// splits the points across workers (results are identical either way).
std::vector<Complex> word_fixed_point(int which, std::size_t depth, std::span<const Complex> zs,
                                      unsigned threads = 1);

/// Partial sums for depths 0..depth at one point.
std::vector<Complex> word_fixed_point_partials(int which, std::size_t depth, Complex z);

/// Partial sums for depths 0..depth at each point, one pass over the words.
std::vector<std::vector<Complex>> word_fixed_point_partials(int which, std::size_t depth, std::span<const Complex> zs,
                                                            unsigned threads = 1);

/// omega^2 + omega^4: asymptotic ratio of successive word levels.
double level_decay();

/// partials[d] plus the geometric remainder implied by the last increment.
Complex tail_corrected(std::span<const Complex> partials);

/// P_d, the product over all words of length <= depth of
/// (1 + omega phi(omega)) / (1 + omega phi(-omega)). Tends to 1 + omega.
double identity_partial_product(std::size_t depth);

/// P_0 .. P_depth.
std::vector<double> identity_partial_products(std::size_t depth);

/// Both sides of the multiplicative form of M g = g for g = log(z / (z - 1)).
struct RatioSides {
  Complex lhs;  // (-omega z)/(-omega z - 1) * (omega^2 z + omega)/(omega^2 z + omega - 1)
  Complex rhs;  // z / (z - 1)
};

RatioSides log_ratio_sides(Complex z);

/// Largest |lhs - rhs| / |rhs| over the samples.
double log_ratio_invariance(std::span<const Complex> samples);

struct FigureRow {
  double x;
  double re_exp_f1;
  double re_exp_f2;
  /// |exp f1 / (kappa exp f2) - x / (x - 1)| / max(1, |x / (x - 1)|); 0 where exp f2 vanishes.
  double ratio_dev;
};

struct FigureTable {
  std::size_t depth;
  std::vector<FigureRow> rows;
  /// omega * P_depth: the constant exp f1 / exp f2 carries on top of x / (x - 1).
  double kappa;
  /// |kappa - 1|, the truncation gap of that constant.
  double kappa_gap;
  double max_ratio_dev;
};

/// 401 points evenly spaced on [-1.5, 1.5].
std::vector<double> default_figure_grid();

/// exp f1 and exp f2 on real points as word products. The removable zeros at
/// x = 0 (f1) and x = 1 (f2) come out as exact zeros.
FigureTable figure_data(std::span<const double> grid, std::size_t depth = kDefaultDepth, unsigned threads = 1);

using Rational = boost::rational<long long>;

struct SfsSpectrum {
  std::size_t n;
  /// Column m holds the coefficients of T x^m on 1, x, ..., x^(2n-1).
  std::vector<std::vector<Rational>> matrix;
  /// Sorted by decreasing real part.
  std::vector<Complex> eigenvalues;
};

/// Exact matrix of T c(x) = c((x - 1)/2) - c((1 - x)/2) on polynomials of degree <= 2n - 1.
std::vector<std::vector<Rational>> sfs_matrix(std::size_t n);

SfsSpectrum sfs_spectrum(std::size_t n);

/// matrix * v in exact arithmetic; v holds ascending coefficients.
std::vector<Rational> sfs_apply(const std::vector<std::vector<Rational>>& matrix, std::span<const Rational> v);

/// sum_{i<a} f(-omega x - i) + f(omega^2 x + a omega) with omega^2 + a omega = 1.
AffineCso general_a_cso(int a);

/// Positive root of omega^2 + a omega = 1.
double general_a_omega(int a);

/// Engine construction of f_1 (Log seed at 0, pinned at -omega) or f_2 (Log
/// seed at 1, pinned at omega) through the generalized-seed route.
FixedPointResult engine_fixed_point(int which, double R, const SolverOptions& opts = {},
                                    std::size_t size = kDefaultOrder, const GeneralizedOptions& gen = {});

/// a - b with the imaginary part reduced to (-pi, pi].
Complex branch_difference(Complex a, Complex b);

// ---------------------------------------------------------------------------

template <typename Visit>
void for_each_word(std::size_t depth, Visit&& visit) {
  const GoldenConstants& g = constants();
  const double s1 = g.phi1.rate().real(), t1 = g.phi1.offset().real();
  const double s2 = g.phi2.rate().real(), t2 = g.phi2.offset().real();
  struct Frame {
    double s, t;
    std::size_t level;
  };
  std::vector<Frame> stack;
  stack.reserve(2 * depth + 2);
  stack.push_back({1.0, 0.0, 0});
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    visit(f.level, f.s, f.t);
    if (f.level == depth) continue;
    // Append a map on the inside: phi_w o phi_k.
    stack.push_back({f.s * s2, f.s * t2 + f.t, f.level + 1});
    stack.push_back({f.s * s1, f.s * t1 + f.t, f.level + 1});
  }
}

}  // namespace csofp::golden
