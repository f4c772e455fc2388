#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "csofp/cso.hpp"
#include "csofp/series.hpp"
#include "csofp/singular.hpp"

namespace csofp {

enum class RouteKind { Direct, GeneralizedSeed, DerivativeRoute };

struct Route {
  RouteKind kind = RouteKind::Direct;
  /// k for GeneralizedSeed, m for DerivativeRoute, 0 otherwise.
  std::size_t parameter = 0;

  std::string name() const;
};

struct FixedPointResult {
  SingularFunction fixed_point;
  /// ||T f - f||_R of the regular remainder, tail bounds included.
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  Route route;
  /// Certified contraction rate of the operator that was inverted.
  double rate = 0.0;
};

/// An admissible singular seed sitting at the fixed point of map `matched_index`.
struct SeedSpec {
  SingularTerm term;
  std::size_t matched_index = 0;
};

/// Checks admissibility and normalizes the weight to 1.
SeedSpec make_seed(const AffineCso& T, const SingularTerm& term, double tol = kRelationTolerance);

SingularFunction seed_function(const SeedSpec& seed, double R, std::size_t size = kDefaultOrder);

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  std::size_t ratio_count = kDefaultRatioCount;
};

struct NeumannResult {
  DiscSeries solution;
  std::size_t iterations = 0;
  double rate = 0.0;
  /// ||(I - T) h - g||_R for the polynomial parts, computed after the fact.
  double residual = 0.0;
};

/// h = sum_n T^n g, stopped once ||T^n g|| < tol (1 - K) for the certified rate K.
/// The solution's tail bound covers the input tail (times 1 / (1 - K)) and the
/// unsummed remainder.
NeumannResult neumann_inverse(const AffineCso& T, const DiscSeries& g, double R, double tol,
                              std::size_t max_iter = 10000, std::size_t ratio_count = kDefaultRatioCount);

/// The fixed point operator f -> f - (I - T)^{-1} (f - T f) on G_R.
///
/// Requires (I - T) f to be regular on the disc of f. When its norm is already
/// within opts.tol, f is returned unchanged; otherwise T must contract G_R.
FixedPointResult fixed_point_operator(const AffineCso& T, const SingularFunction& f,
                                      const SolverOptions& opts = {});

/// Regular part of f - T f, or nothing when singular terms survive.
std::optional<DiscSeries> regular_remainder(const AffineCso& T, const SingularFunction& f);

/// ||T f - f||_R; +inf when singular terms fail to cancel.
double fixed_point_residual(const AffineCso& T, const SingularFunction& f);

FixedPointResult seeded_fixed_point(const AffineCso& T, const SeedSpec& seed, double R,
                                    const SolverOptions& opts = {}, std::size_t size = kDefaultOrder);

struct GeneralizedOptions {
  std::size_t k_max = 8;
  /// Start the search here; any admissible k gives the same fixed point.
  std::size_t k_min = 0;
};

/// Iterates T on the seed until (I - T) T^k seed is regular on D_R and then
/// applies the fixed point operator to T^k seed = seed - f_k.
FixedPointResult generalized_seed_fixed_point(const AffineCso& T, const SeedSpec& seed, double R,
                                              const SolverOptions& opts = {}, const GeneralizedOptions& gen = {},
                                              std::size_t size = kDefaultOrder);

/// Log-type fixed point at the fixed point of map i via the m-th derivative:
/// fix T^(m) from the pole seed (m-1)! (-1)^(m-1) (z - z_i)^(-m), integrate m
/// times and remove the degree < m defect with a polynomial solve.
FixedPointResult derivative_route_fixed_point(const AffineCso& T, std::size_t i, std::size_t m, double R,
                                              const SolverOptions& opts = {}, std::size_t size = kDefaultOrder);

/// Smallest m >= 1 with sum_i |a_i| |s_i|^m < 1 and T^(m) contracting G_R, if any up to m_max.
std::optional<std::size_t> smallest_contracting_derivative(const AffineCso& T, double R, std::size_t m_max = 64);

}  // namespace csofp
