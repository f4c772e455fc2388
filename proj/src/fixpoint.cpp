#include "csofp/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "csofp/errors.hpp"

namespace csofp {

std::string Route::name() const {
  switch (kind) {
    case RouteKind::Direct:
      return "direct";
    case RouteKind::GeneralizedSeed:
      return "generalized(k=" + std::to_string(parameter) + ")";
    case RouteKind::DerivativeRoute:
      return "derivative(m=" + std::to_string(parameter) + ")";
  }
  return "unknown";
}

SeedSpec make_seed(const AffineCso& T, const SingularTerm& term, double tol) {
  const Admissibility adm = seed_admissibility(T, term, tol);
  if (!adm.admissible) {
    const CsoTerm& t = T.term(adm.index);
    std::ostringstream os;
    os.precision(17);
    os << "seed inadmissible: condition " << adm.condition << " fails for map " << adm.index
       << " (a = " << to_string(t.coefficient) << ", s = " << to_string(t.map.rate()) << ", mismatch "
       << adm.mismatch << ")";
    throw PreconditionFailed(os.str());
  }
  SingularTerm normalized = term;
  normalized.weight = 1.0;
  return {normalized, adm.index};
}

SingularFunction seed_function(const SeedSpec& seed, double R, std::size_t size) {
  return SingularFunction({seed.term}, DiscSeries::zero(R, size));
}

NeumannResult neumann_inverse(const AffineCso& T, const DiscSeries& g, double R, double tol, std::size_t max_iter,
                              std::size_t ratio_count) {
  if (g.radius() != R) throw InvalidArgument("neumann_inverse: right-hand side lives on a different disc");
  if (!(tol > 0.0)) throw InvalidArgument("neumann_inverse: tolerance must be positive");
  if (!maps_disc_into_itself(T, R))
    throw PreconditionFailed("neumann_inverse: the maps do not send D_R strictly into itself");
  const double K = certified_rate(T, R, std::max(ratio_count, g.size()));
  if (!(K < 1.0)) {
    std::ostringstream os;
    os << "neumann_inverse: operator is not a contraction on G_R (certified rate " << K << " at R = " << R << ")";
    throw PreconditionFailed(os.str());
  }
  const double stop = tol * (1.0 - K);
  DiscSeries term = g.polynomial_part();
  DiscSeries sum = term;
  std::size_t it = 0;
  while (term.polynomial_norm() >= stop) {
    if (it >= max_iter) {
      throw ConvergenceFailure("neumann_inverse: no convergence after " + std::to_string(max_iter) + " iterations");
    }
    term = apply_series(T, term, R);
    sum = sum + term;
    ++it;
  }
  const double tail = (g.tail_bound() + K * term.polynomial_norm()) / (1.0 - K);
  NeumannResult out{sum.with_added_tail(tail), it, K, 0.0};
  out.residual = (sum - apply_series(T, sum, R) - g.polynomial_part()).polynomial_norm();
  return out;
}

namespace {

SingularSum remainder_sum(const AffineCso& T, const SingularFunction& f) {
  const double R = f.radius();
  SingularSum sum(R, f.regular().size());
  sum.add(1.0, f);
  for (const CsoTerm& t : T.terms()) {
    for (const SingularTerm& term : f.terms()) sum.add_pullback(-t.coefficient, term, t.map);
    sum.add_series(-t.coefficient, compose_affine(f.regular(), t.map, R));
  }
  return sum;
}

}  // namespace

std::optional<DiscSeries> regular_remainder(const AffineCso& T, const SingularFunction& f) {
  const SingularSum sum = remainder_sum(T, f);
  const double reach = f.radius() * (1.0 + SingularSum::kRegularityMargin);
  for (const SingularTerm& t : sum.pending_terms()) {
    if (std::abs(t.location) <= reach) return std::nullopt;
  }
  return sum.finish().regular();
}

double fixed_point_residual(const AffineCso& T, const SingularFunction& f) {
  const auto rem = regular_remainder(T, f);
  return rem ? rem->l1_norm() : std::numeric_limits<double>::infinity();
}

FixedPointResult fixed_point_operator(const AffineCso& T, const SingularFunction& f, const SolverOptions& opts) {
  const auto rem = regular_remainder(T, f);
  if (!rem) {
    throw PreconditionFailed(
        "(I - T) f keeps singular terms inside the disc; f is not a seed on this disc "
        "(try the generalized-seed route)");
  }
  // Already fixed to within the tolerance: no correction, and no contraction needed.
  if (rem->l1_norm() <= opts.tol) {
    return {f, rem->l1_norm(), 0, {}, 0.0};
  }
  // The tail of h reappears in f* and, scaled by sum |a_i|, in T f*.
  double mass = 0.0;
  for (const CsoTerm& t : T.terms()) mass += std::abs(t.coefficient);
  const double inner_tol = opts.tol / (2.0 * (1.0 + mass));
  const NeumannResult inv = neumann_inverse(T, *rem, f.radius(), inner_tol, opts.max_iter, opts.ratio_count);
  SingularFunction fixed = add_regular(f, -1.0 * inv.solution);
  const double residual = fixed_point_residual(T, fixed);
  if (!(residual <= opts.tol)) {
    std::ostringstream os;
    os << "fixed point residual " << residual << " exceeds the tolerance " << opts.tol;
    throw ConvergenceFailure(os.str());
  }
  return {std::move(fixed), residual, inv.iterations, {}, inv.rate};
}

namespace {

void require_seed(const AffineCso& T, const SeedSpec& seed) {
  const SeedSpec checked = make_seed(T, seed.term);
  if (checked.matched_index != seed.matched_index) {
    throw PreconditionFailed("seed location is fixed by map " + std::to_string(checked.matched_index) +
                             ", not by map " + std::to_string(seed.matched_index));
  }
}

}  // namespace

FixedPointResult seeded_fixed_point(const AffineCso& T, const SeedSpec& seed, double R, const SolverOptions& opts,
                                    std::size_t size) {
  require_seed(T, seed);
  FixedPointResult r = fixed_point_operator(T, seed_function(seed, R, size), opts);
  r.route = {RouteKind::Direct, 0};
  return r;
}

FixedPointResult generalized_seed_fixed_point(const AffineCso& T, const SeedSpec& seed, double R,
                                              const SolverOptions& opts, const GeneralizedOptions& gen,
                                              std::size_t size) {
  require_seed(T, seed);
  SingularFunction current = seed_function(seed, R, size);
  for (std::size_t k = 0; k <= gen.k_max; ++k) {
    if (k >= gen.k_min && regular_remainder(T, current)) {
      FixedPointResult r = fixed_point_operator(T, current, opts);
      r.route = {RouteKind::GeneralizedSeed, k};
      return r;
    }
    current = apply_singular(T, current);
  }
  throw PreconditionFailed("generalized seed: (I - T) T^k seed is not regular on D_R for any k <= " +
                           std::to_string(gen.k_max));
}

FixedPointResult derivative_route_fixed_point(const AffineCso& T, std::size_t i, std::size_t m, double R,
                                              const SolverOptions& opts, std::size_t size) {
  if (i >= T.length()) throw InvalidArgument("derivative route: map index out of range");
  if (m < 1) throw InvalidArgument("derivative route: m must be >= 1");
  const CsoTerm& owner = T.term(i);
  if (std::abs(owner.coefficient - 1.0) > kRelationTolerance * std::max(1.0, std::abs(owner.coefficient)))
    throw PreconditionFailed("derivative route: a log seed needs a = 1 at map " + std::to_string(i));
  if (!fixed_point_independence(T, i, R))
    throw PreconditionFailed("derivative route: map " + std::to_string(i) + " is not fixed point independent on D_R");
  const PolyDegreeReport degrees = poly_fp_degrees(T, m - 1);
  if (!degrees.degrees.empty()) {
    throw PreconditionFailed("derivative route: T has a polynomial fixed point of degree " +
                             std::to_string(degrees.degrees.front()));
  }
  const InducedOperator induced = induced_m(T, m);
  if (!(induced.norm_bound < 1.0)) {
    std::ostringstream os;
    os << "derivative route: T^(" << m << ") has norm bound " << induced.norm_bound << " >= 1";
    throw PreconditionFailed(os.str());
  }

  const Complex zi = owner.map.fixed_point();
  double factorial = 1.0;
  for (std::size_t k = 2; k < m; ++k) factorial *= static_cast<double>(k);
  const double sign = (m - 1) % 2 == 0 ? 1.0 : -1.0;
  const SingularFunction pole_seed(
      {SingularTerm::pole(zi, static_cast<int>(m), factorial * sign)}, DiscSeries::zero(R, size));
  const FixedPointResult derived = fixed_point_operator(induced.op, pole_seed, opts);

  DiscSeries lifted = derived.fixed_point.regular();
  for (std::size_t k = 0; k < m; ++k) lifted = integrate_from_zero(lifted);
  const SingularFunction candidate({SingularTerm::log(zi)}, lifted);

  // T f - f is a polynomial of degree < m once the m-th derivative is fixed.
  const auto rem = regular_remainder(T, candidate);
  if (!rem) throw PreconditionFailed("derivative route: log seed is not a seed on D_R");
  std::vector<Complex> defect(m);
  for (std::size_t k = 0; k < m; ++k) defect[k] = -rem->coeff(k);
  const std::vector<Complex> correction = solve_polynomial(T, defect);

  SingularFunction fixed = add_regular(candidate, DiscSeries(correction, R));
  const double residual = fixed_point_residual(T, fixed);
  if (!(residual <= opts.tol)) {
    std::ostringstream os;
    os << "derivative route: residual " << residual << " exceeds the tolerance " << opts.tol;
    throw ConvergenceFailure(os.str());
  }
  return {std::move(fixed), residual, derived.iterations, {RouteKind::DerivativeRoute, m}, derived.rate};
}

std::optional<std::size_t> smallest_contracting_derivative(const AffineCso& T, double R, std::size_t m_max) {
  // With constant maps only, T^(m) vanishes and there is no log seed to start from.
  if (std::all_of(T.terms().begin(), T.terms().end(), [](const CsoTerm& t) { return t.map.is_degenerate(); }))
    return std::nullopt;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const InducedOperator induced = induced_m(T, m);
    if (induced.norm_bound < 1.0 && maps_disc_into_itself(induced.op, R) && certified_rate(induced.op, R) < 1.0)
      return m;
  }
  return std::nullopt;
}

}  // namespace csofp
