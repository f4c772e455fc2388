#include "csofp/singular.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csofp/errors.hpp"

namespace csofp {

namespace {

// Weights below this fraction of the contributing mass count as cancelled.
constexpr double kCancellation = 1e-12;

void check_term(const SingularTerm& t) {
  if (!is_finite(t.location) || !is_finite(t.weight)) throw InvalidArgument("singular term has non-finite data");
  if (t.kind == SingularKind::Pole && t.order < 1) throw InvalidArgument("pole order must be >= 1");
  if (t.kind == SingularKind::Log && t.order != 0) throw InvalidArgument("log term must have order 0");
}

std::string describe(const SingularTerm& t) {
  if (t.kind == SingularKind::Log) return "log at " + to_string(t.location);
  return "pole of order " + std::to_string(t.order) + " at " + to_string(t.location);
}

}  // namespace

SingularTerm SingularTerm::log(Complex location, Complex weight) {
  SingularTerm t{SingularKind::Log, location, 0, weight};
  check_term(t);
  return t;
}

SingularTerm SingularTerm::pole(Complex location, int order, Complex weight) {
  SingularTerm t{SingularKind::Pole, location, order, weight};
  check_term(t);
  return t;
}

Complex SingularTerm::value(Complex z) const {
  const Complex d = z - location;
  if (kind == SingularKind::Log) return weight * std::log(d);
  return weight * std::pow(d, -order);
}

bool SingularTerm::same_shape(const SingularTerm& other) const noexcept {
  return kind == other.kind && order == other.order && same_point(location, other.location);
}

SingularFunction::SingularFunction(Trusted, std::vector<SingularTerm> terms, DiscSeries regular)
    : terms_(std::move(terms)), regular_(std::move(regular)) {}

SingularFunction::SingularFunction(std::vector<SingularTerm> terms, DiscSeries regular)
    : regular_(std::move(regular)) {
  const double radius = regular_.radius();
  for (const SingularTerm& t : terms) {
    check_term(t);
    if (!(std::abs(t.location) < radius))
      throw InvalidArgument(describe(t) + " lies outside the disc of radius " + std::to_string(radius));
    for (const SingularTerm& kept : terms_) {
      if (kept.same_shape(t)) throw InvalidArgument("duplicate singular term: " + describe(t));
    }
    if (t.weight != Complex{}) terms_.push_back(t);
  }
}

SingularFunction SingularFunction::regular_only(DiscSeries regular) { return SingularFunction({}, std::move(regular)); }

SingularFunction make_singular(std::vector<SingularTerm> terms, DiscSeries regular) {
  return SingularFunction(std::move(terms), std::move(regular));
}

Complex eval_singular(const SingularFunction& f, Complex z) {
  Complex value = eval_at(f.regular(), z);
  for (const SingularTerm& t : f.terms()) {
    if (same_point(z, t.location))
      throw PreconditionFailed("eval_singular: point " + to_string(z) + " is a singular location");
    value += t.value(z);
  }
  return value;
}

std::vector<Complex> unbounded_set(const SingularFunction& f) {
  std::vector<Complex> points;
  for (const SingularTerm& t : f.terms()) {
    const bool seen = std::any_of(points.begin(), points.end(),
                                  [&](Complex p) { return same_point(p, t.location); });
    if (!seen) points.push_back(t.location);
  }
  return points;
}

SingularSum::SingularSum(double radius, std::size_t size, double margin)
    : radius_(radius), size_(std::max<std::size_t>(size, 1)), margin_(margin) {
  if (!(radius > 0.0)) throw InvalidArgument("SingularSum: radius must be positive");
}

void SingularSum::add_term(const SingularTerm& term) {
  check_term(term);
  if (term.weight == Complex{}) return;
  for (Entry& e : entries_) {
    if (e.term.same_shape(term)) {
      e.term.weight += term.weight;
      e.mass += std::abs(term.weight);
      return;
    }
  }
  entries_.push_back({term, std::abs(term.weight)});
}

void SingularSum::add_constant(Complex c) { constant_ += c; }

void SingularSum::add_series(Complex weight, const DiscSeries& f) {
  if (f.radius() != radius_) throw InvalidArgument("SingularSum: series radius does not match");
  series_.emplace_back(weight, f);
}

void SingularSum::add(Complex weight, const SingularFunction& f) {
  for (SingularTerm t : f.terms()) {
    t.weight *= weight;
    add_term(t);
  }
  add_series(weight, f.regular());
}

void SingularSum::add_pullback(Complex weight, const SingularTerm& term, const AffineMap& map) {
  const Complex w = weight * term.weight;
  if (w == Complex{}) return;
  if (map.is_degenerate()) {
    const Complex value = map.offset();
    if (same_point(value, term.location))
      throw PreconditionFailed("constant map lands on the singular location of " + describe(term));
    add_constant(weight * term.value(value));
    return;
  }
  const Complex s = map.rate();
  const Complex moved = map.preimage(term.location);
  if (term.kind == SingularKind::Log) {
    add_term(SingularTerm{SingularKind::Log, moved, 0, w});
    add_constant(w * std::log(s));
  } else {
    add_term(SingularTerm{SingularKind::Pole, moved, term.order, w * std::pow(s, -term.order)});
  }
}

std::vector<SingularTerm> SingularSum::pending_terms() const {
  std::vector<SingularTerm> out;
  for (const Entry& e : entries_) {
    if (std::abs(e.term.weight) > kCancellation * e.mass) out.push_back(e.term);
  }
  return out;
}

SingularFunction SingularSum::finish() const {
  std::vector<SingularTerm> inside;
  std::vector<std::pair<Complex, DiscSeries>> parts = series_;
  for (const SingularTerm& t : pending_terms()) {
    const double distance = std::abs(t.location);
    if (distance < radius_) {
      inside.push_back(t);
    } else if (distance > radius_ * (1.0 + margin_)) {
      if (t.kind == SingularKind::Log)
        parts.emplace_back(t.weight, log_affine(-t.location, 1.0, radius_, size_));
      else
        parts.emplace_back(t.weight, inverse_power_affine(-t.location, 1.0, t.order, radius_, size_));
    } else {
      throw PreconditionFailed(describe(t) + " sits on the boundary of the disc of radius " +
                               std::to_string(radius_) + " (within the regularity margin)");
    }
  }
  parts.emplace_back(1.0, DiscSeries::constant(constant_, radius_));
  DiscSeries regular = linear_combine(parts);
  if (regular.size() < size_) regular = regular.padded(size_);
  return SingularFunction(SingularFunction::Trusted{}, std::move(inside), std::move(regular));
}

SingularFunction pullback_term(const SingularTerm& term, const AffineMap& map, double radius, std::size_t size) {
  SingularSum sum(radius, size);
  sum.add_pullback(1.0, term, map);
  return sum.finish();
}

SingularFunction operator+(const SingularFunction& a, const SingularFunction& b) {
  SingularSum sum(a.radius(), std::max(a.regular().size(), b.regular().size()));
  sum.add(1.0, a);
  sum.add(1.0, b);
  return sum.finish();
}

SingularFunction operator-(const SingularFunction& a, const SingularFunction& b) {
  SingularSum sum(a.radius(), std::max(a.regular().size(), b.regular().size()));
  sum.add(1.0, a);
  sum.add(-1.0, b);
  return sum.finish();
}

SingularFunction operator*(Complex w, const SingularFunction& f) {
  SingularSum sum(f.radius(), f.regular().size());
  sum.add(w, f);
  return sum.finish();
}

SingularFunction add_regular(const SingularFunction& f, const DiscSeries& g) {
  return SingularFunction(SingularFunction::Trusted{}, f.terms(), f.regular() + g);
}

}  // namespace csofp
