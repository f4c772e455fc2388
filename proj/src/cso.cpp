#include "csofp/cso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "csofp/errors.hpp"

namespace csofp {

namespace {

Complex int_power(Complex z, std::size_t n) {
  Complex result = 1.0;
  Complex base = z;
  while (n > 0) {
    if (n & 1U) result *= base;
    base *= base;
    n >>= 1U;
  }
  return result;
}

// Coefficients of sum_i a_i (s_i z + u_i)^n where u_i = t_i / scale. Terms are
// formed in log-polar form, so large n neither overflows nor loses 0^0 = 1.
std::vector<Complex> scaled_image(const AffineCso& T, std::size_t n, double scale) {
  // log C(n, r) built up from a table of log k.
  std::vector<double> log_k(n + 1, 0.0);
  for (std::size_t k = 2; k <= n; ++k) log_k[k] = std::log(static_cast<double>(k));
  std::vector<double> log_binom(n + 1, 0.0);
  for (std::size_t r = 0; r < n; ++r) log_binom[r + 1] = log_binom[r] + log_k[n - r] - log_k[r + 1];

  std::vector<Complex> c(n + 1);
  for (const CsoTerm& term : T.terms()) {
    const Complex s = term.map.rate();
    const Complex u = term.map.offset() / scale;
    const double ls = std::log(std::abs(s)), as = std::arg(s);
    const double lu = std::log(std::abs(u)), au = std::arg(u);
    for (std::size_t r = 0; r <= n; ++r) {
      // Zero factors with a positive exponent vanish.
      if ((r > 0 && s == Complex{}) || (n > r && u == Complex{})) continue;
      double log_mag = log_binom[r], phase = 0.0;
      if (r > 0) {
        log_mag += static_cast<double>(r) * ls;
        phase += static_cast<double>(r) * as;
      }
      if (n > r) {
        log_mag += static_cast<double>(n - r) * lu;
        phase += static_cast<double>(n - r) * au;
      }
      c[r] += term.coefficient * std::polar(std::exp(log_mag), phase);
    }
  }
  return c;
}

// Merges terms with numerically equal maps and drops those whose coefficients cancel.
std::vector<CsoTerm> merge_terms(const std::vector<CsoTerm>& raw) {
  struct Slot {
    CsoTerm term;
    double mass;
  };
  std::vector<Slot> slots;
  for (const CsoTerm& t : raw) {
    auto it = std::find_if(slots.begin(), slots.end(), [&](const Slot& s) { return s.term.map.approx_equal(t.map); });
    if (it == slots.end()) {
      slots.push_back({t, std::abs(t.coefficient)});
    } else {
      it->term.coefficient += t.coefficient;
      it->mass += std::abs(t.coefficient);
    }
  }
  std::vector<CsoTerm> out;
  for (const Slot& s : slots) {
    if (std::abs(s.term.coefficient) > 1e-14 * s.mass) out.push_back(s.term);
  }
  return out;
}

double term_radius(const CsoTerm& t, double R) {
  return std::abs(t.map.rate()) + std::abs(t.map.offset()) / R;
}

}  // namespace

AffineCso::AffineCso(std::vector<CsoTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw InvalidArgument("operator needs at least one term");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Complex a = terms_[i].coefficient;
    if (!is_finite(a)) throw InvalidArgument("term " + std::to_string(i) + ": coefficient is not finite");
    if (a == Complex{}) throw InvalidArgument("term " + std::to_string(i) + ": coefficient must be nonzero");
    for (std::size_t j = 0; j < i; ++j) {
      if (terms_[j].map.approx_equal(terms_[i].map))
        throw InvalidArgument("term " + std::to_string(i) + ": map duplicates term " + std::to_string(j));
    }
  }
}

double AffineCso::max_rate() const noexcept {
  double s = 0.0;
  for (const CsoTerm& t : terms_) s = std::max(s, std::abs(t.map.rate()));
  return s;
}

AffineCso make_cso(std::vector<CsoTerm> terms) { return AffineCso(std::move(terms)); }

bool maps_disc_into_itself(const AffineCso& T, double R) noexcept {
  return std::all_of(T.terms().begin(), T.terms().end(), [R](const CsoTerm& t) {
    return std::abs(t.map.rate()) * R + std::abs(t.map.offset()) < R;
  });
}

DiscSeries apply_series(const AffineCso& T, const DiscSeries& f, double out_radius) {
  std::vector<std::pair<Complex, DiscSeries>> parts;
  parts.reserve(T.length());
  for (const CsoTerm& t : T.terms()) parts.emplace_back(t.coefficient, compose_affine(f, t.map, out_radius));
  return linear_combine(parts);
}

SingularFunction apply_singular(const AffineCso& T, const SingularFunction& f) {
  const double R = f.radius();
  SingularSum sum(R, f.regular().size());
  for (const CsoTerm& t : T.terms()) {
    for (const SingularTerm& term : f.terms()) sum.add_pullback(t.coefficient, term, t.map);
    sum.add_series(t.coefficient, compose_affine(f.regular(), t.map, R));
  }
  return sum.finish();
}

std::vector<Complex> monomial_image(const AffineCso& T, std::size_t n) { return scaled_image(T, n, 1.0); }

double basis_ratio(const AffineCso& T, std::size_t n, double R) {
  if (!(R > 0.0)) throw InvalidArgument("basis_ratio: radius must be positive");
  // ||T Z_n||_R / R^n = sum_r |sum_i a_i C(n,r) s_i^r (t_i/R)^(n-r)|
  double sum = 0.0;
  for (const Complex& c : scaled_image(T, n, R)) sum += std::abs(c);
  return sum;
}

double basis_image_norm(const AffineCso& T, std::size_t n, double R) {
  return basis_ratio(T, n, R) * std::pow(R, static_cast<double>(n));
}

double basis_ratio_bound(const AffineCso& T, std::size_t n, double R) {
  double sum = 0.0;
  for (const CsoTerm& t : T.terms())
    sum += std::abs(t.coefficient) * std::pow(term_radius(t, R), static_cast<double>(n));
  return sum;
}

namespace {

double tail_ratio(const AffineCso& T, std::size_t n_max, double R) {
  const bool decays =
      std::all_of(T.terms().begin(), T.terms().end(), [R](const CsoTerm& t) { return term_radius(t, R) < 1.0; });
  return decays ? basis_ratio_bound(T, n_max + 1, R) : std::numeric_limits<double>::infinity();
}

}  // namespace

ContractionReport contraction_report(const AffineCso& T, double mu, double R, std::size_t n_max) {
  if (!(R > 0.0)) throw InvalidArgument("contraction_report: radius must be positive");
  if (n_max < 1) throw InvalidArgument("contraction_report: n_max must be >= 1");
  const double s = T.max_rate();
  if (!(mu > s) || mu > 1.0) {
    std::ostringstream os;
    os << "contraction_report: mu = " << mu << " must satisfy max|s_i| = " << s << " < mu <= 1";
    throw PreconditionFailed(os.str());
  }
  ContractionReport rep;
  rep.mu = mu;
  rep.radius = R;
  for (const CsoTerm& t : T.terms())
    rep.R0 = std::max(rep.R0, std::abs(t.map.offset()) / (mu - std::abs(t.map.rate())));

  rep.ratios.reserve(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) rep.ratios.push_back(basis_ratio(T, n, R));
  rep.tail_ratio = tail_ratio(T, n_max, R);
  rep.rate = std::max(*std::max_element(rep.ratios.begin(), rep.ratios.end()), rep.tail_ratio);
  rep.is_contraction = rep.rate < 1.0;

  const bool beyond_threshold =
      std::all_of(T.terms().begin(), T.terms().end(), [&](const CsoTerm& t) { return term_radius(t, R) < mu; });
  if (beyond_threshold) {
    // sum_i |a_i| (rho_i / mu)^n is decreasing, so the first n below 1 is the cutoff.
    long n = 0;
    for (;; ++n) {
      double b = 0.0;
      for (const CsoTerm& t : T.terms())
        b += std::abs(t.coefficient) * std::pow(term_radius(t, R) / mu, static_cast<double>(n));
      if (b < 1.0) break;
    }
    rep.N = n;
  }
  return rep;
}

double certified_rate(const AffineCso& T, double R, std::size_t n_max) {
  if (!(R > 0.0)) throw InvalidArgument("certified_rate: radius must be positive");
  const bool decays =
      std::all_of(T.terms().begin(), T.terms().end(), [R](const CsoTerm& t) { return term_radius(t, R) < 1.0; });
  double rate = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    // The analytic bound decreases in n and dominates every later ratio.
    if (decays && basis_ratio_bound(T, n, R) <= rate) return rate;
    rate = std::max(rate, basis_ratio(T, n, R));
  }
  return std::max(rate, tail_ratio(T, n_max, R));
}

PolyDegreeReport poly_fp_degrees(const AffineCso& T, std::size_t m_max, double tol) {
  PolyDegreeReport rep;
  for (std::size_t m = 0; m <= m_max; ++m) {
    Complex lambda{};
    double mass = 0.0;
    for (const CsoTerm& t : T.terms()) {
      const Complex p = int_power(t.map.rate(), m);
      lambda += t.coefficient * p;
      mass += std::abs(t.coefficient) * std::abs(p);
    }
    if (std::abs(lambda - 1.0) <= tol * std::max(1.0, mass)) rep.degrees.push_back(m);
  }
  for (std::size_t m = 0;; ++m) {
    double mass = 0.0;
    for (const CsoTerm& t : T.terms()) mass += std::abs(t.coefficient) * std::pow(std::abs(t.map.rate()), double(m));
    if (mass < 1.0) {
      rep.cutoff = m;
      break;
    }
  }
  return rep;
}

namespace {

Eigen::MatrixXcd identity_minus_t(const AffineCso& T, std::size_t size) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t n = 0; n < size; ++n) {
    const std::vector<Complex> col = monomial_image(T, n);
    for (std::size_t r = 0; r <= n; ++r) A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n)) -= col[r];
  }
  return A;
}

}  // namespace

std::vector<std::vector<Complex>> poly_fixed_points(const AffineCso& T, std::size_t m, double sv_tol) {
  const std::size_t size = m + 1;
  const Eigen::MatrixXcd A = identity_minus_t(T, size);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double cut = sv_tol * std::max(sigma(0), std::numeric_limits<double>::min());
  std::vector<std::vector<Complex>> basis;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > cut) continue;
    const auto v = svd.matrixV().col(k);
    basis.emplace_back(v.data(), v.data() + v.size());
  }
  // Reduce to echelon form from the top degree down, so each vector has its own
  // unit leading coefficient.
  std::vector<bool> used(basis.size(), false);
  for (std::size_t col = size; col-- > 0;) {
    std::size_t pivot = basis.size();
    double best = 1e-9;
    for (std::size_t r = 0; r < basis.size(); ++r) {
      if (!used[r] && std::abs(basis[r][col]) > best) {
        best = std::abs(basis[r][col]);
        pivot = r;
      }
    }
    if (pivot == basis.size()) continue;
    used[pivot] = true;
    const Complex lead = basis[pivot][col];
    for (Complex& x : basis[pivot]) x /= lead;
    for (std::size_t r = 0; r < basis.size(); ++r) {
      if (r == pivot) continue;
      const Complex f = basis[r][col];
      for (std::size_t k = 0; k < size; ++k) basis[r][k] -= f * basis[pivot][k];
    }
  }
  for (auto& v : basis) {
    for (Complex& x : v) {
      if (std::abs(x) < 1e-14) x = 0.0;
    }
    std::size_t deg = v.size();
    while (deg > 1 && v[deg - 1] == Complex{}) --deg;
    v.resize(deg);
  }
  std::sort(basis.begin(), basis.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return basis;
}

std::vector<Complex> solve_polynomial(const AffineCso& T, std::span<const Complex> q) {
  const std::size_t size = q.size();
  if (size == 0) return {};
  const Eigen::MatrixXcd A = identity_minus_t(T, size);
  for (Eigen::Index n = 0; n < A.rows(); ++n) {
    if (std::abs(A(n, n)) < kRelationTolerance) {
      throw PreconditionFailed("I - T is singular on polynomials of degree " + std::to_string(n) +
                               " (a polynomial fixed point exists)");
    }
  }
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(size));
  for (std::size_t k = 0; k < size; ++k) rhs(static_cast<Eigen::Index>(k)) = q[k];
  const Eigen::VectorXcd p = A.triangularView<Eigen::Upper>().solve(rhs);
  return std::vector<Complex>(p.data(), p.data() + p.size());
}

InducedOperator induced_m(const AffineCso& T, std::size_t m) {
  std::vector<CsoTerm> terms;
  double bound = 0.0;
  for (const CsoTerm& t : T.terms()) {
    const Complex a = t.coefficient * int_power(t.map.rate(), m);
    bound += std::abs(a);
    if (a != Complex{}) terms.push_back({a, t.map});
  }
  if (terms.empty()) throw PreconditionFailed("induced operator of order " + std::to_string(m) + " vanishes");
  return {AffineCso(std::move(terms)), bound};
}

AffineCso pinned(const AffineCso& T, Complex c) {
  if (!is_finite(c)) throw InvalidArgument("pinned: pinning point must be finite");
  std::vector<CsoTerm> terms(T.terms().begin(), T.terms().end());
  for (const CsoTerm& t : T.terms()) terms.push_back({-t.coefficient, AffineMap::constant(t.map(c))});
  auto merged = merge_terms(terms);
  if (merged.empty()) throw PreconditionFailed("pinned: every term cancels, T f - (T f)(c) is identically zero");
  return AffineCso(std::move(merged));
}

AffineCso projected_j(const AffineCso& T, std::size_t j) {
  if (j >= T.length()) throw InvalidArgument("projected_j: index out of range");
  Complex L{};
  double mass = 0.0;
  for (std::size_t i = 0; i < T.length(); ++i) {
    if (i == j) continue;
    L += T.term(i).coefficient;
    mass += std::abs(T.term(i).coefficient);
  }
  if (std::abs(L) <= kRelationTolerance * std::max(1.0, mass))
    throw PreconditionFailed("projected_j: L = sum of the other coefficients vanishes");
  const Complex zj = T.term(j).map.fixed_point();
  std::vector<CsoTerm> terms(T.terms().begin(), T.terms().end());
  for (std::size_t i = 0; i < T.length(); ++i) {
    if (i == j) continue;
    const Complex point = T.term(i).map(zj);
    for (const CsoTerm& k : T.terms())
      terms.push_back({-T.term(i).coefficient * k.coefficient / L, AffineMap::constant(k.map(point))});
  }
  return AffineCso(merge_terms(terms));
}

bool fixed_point_independence(const AffineCso& T, std::size_t i, double R) {
  if (i >= T.length()) throw InvalidArgument("fixed_point_independence: index out of range");
  if (!(R > 0.0)) throw InvalidArgument("fixed_point_independence: radius must be positive");
  const Complex zi = T.term(i).map.fixed_point();
  for (std::size_t j = 0; j < T.length(); ++j) {
    if (j == i) continue;
    const AffineMap& m = T.term(j).map;
    if (!(std::abs(zi - m.offset()) > std::abs(m.rate()) * R)) return false;
  }
  return true;
}

std::string PointVerdict::describe() const {
  std::ostringstream os;
  os << to_string(point) << ": ";
  if (fixed_by.empty()) os << "fixed by no map";
  else if (fixed_by.size() == 1) os << "fixed by map " << fixed_by.front();
  else {
    os << "fixed by several maps (";
    for (std::size_t k = 0; k < fixed_by.size(); ++k) os << (k ? "," : "") << fixed_by[k];
    os << ")";
  }
  for (const auto& [i, image] : mapped_into_set) os << "; map " << i << " sends it to " << to_string(image);
  return os.str();
}

std::vector<PointVerdict> simplicity_check(const AffineCso& T, std::span<const Complex> points) {
  std::vector<PointVerdict> out;
  for (const Complex p : points) {
    PointVerdict v{p, {}, {}};
    for (std::size_t i = 0; i < T.length(); ++i) {
      const AffineMap& m = T.term(i).map;
      if (m.fixes(p)) {
        v.fixed_by.push_back(i);
        continue;
      }
      const Complex image = m(p);
      if (std::any_of(points.begin(), points.end(), [&](Complex q) { return same_point(q, image); }))
        v.mapped_into_set.emplace_back(i, image);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string Admissibility::describe() const {
  std::ostringstream os;
  os << (admissible ? "admissible" : "inadmissible") << " under map " << index << " (condition " << condition
     << ", mismatch " << mismatch << ")";
  return os.str();
}

Admissibility seed_admissibility(const AffineCso& T, const SingularTerm& term, double tol) {
  const Complex p[] = {term.location};
  const PointVerdict v = simplicity_check(T, p).front();
  if (v.fixed_by.empty())
    throw PreconditionFailed("seed location " + to_string(term.location) + " is fixed by no map");
  if (v.fixed_by.size() > 1)
    throw PreconditionFailed("seed location " + to_string(term.location) + " is fixed by several maps");
  Admissibility adm;
  adm.index = v.fixed_by.front();
  const CsoTerm& t = T.term(adm.index);
  if (term.kind == SingularKind::Log) {
    adm.condition = "a = 1";
    adm.mismatch = std::abs(t.coefficient - 1.0);
    adm.admissible = adm.mismatch <= tol * std::max(1.0, std::abs(t.coefficient));
  } else {
    adm.condition = "a = s^" + std::to_string(term.order);
    const Complex target = int_power(t.map.rate(), static_cast<std::size_t>(term.order));
    adm.mismatch = std::abs(t.coefficient - target);
    adm.admissible = adm.mismatch <= tol * std::max(std::abs(t.coefficient), std::abs(target));
  }
  return adm;
}

double ratio_crossover_radius(const AffineCso& T, std::size_t n, double lo, double hi, double tol) {
  if (!(lo > 0.0 && lo < hi)) throw InvalidArgument("ratio_crossover_radius: need 0 < lo < hi");
  if (!(basis_ratio(T, n, lo) >= 1.0) || !(basis_ratio(T, n, hi) < 1.0))
    throw PreconditionFailed("ratio_crossover_radius: the ratio does not cross 1 on [lo, hi]");
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (basis_ratio(T, n, mid) < 1.0 ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace csofp
