#include "csofp/affine_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csofp/errors.hpp"

namespace csofp {

bool is_finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool same_point(Complex a, Complex b, double rel_tol) noexcept {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= rel_tol * scale;
}

std::string to_string(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

namespace {

void check_rate(Complex rate) {
  if (!is_finite(rate)) throw InvalidArgument("affine map rate must be finite");
  if (std::abs(rate) >= 1.0)
    throw InvalidArgument("affine map rate " + to_string(rate) + " is not a contraction (|s| >= 1)");
}

}  // namespace

AffineMap::AffineMap(Complex rate, Complex fixed_point, Complex offset)
    : rate_(rate), fixed_point_(fixed_point), offset_(offset) {}

AffineMap::AffineMap(Complex rate, Complex fixed_point)
    : rate_(rate), fixed_point_(fixed_point), offset_(fixed_point * (1.0 - rate)) {
  check_rate(rate);
  if (!is_finite(fixed_point)) throw InvalidArgument("affine map fixed point must be finite");
}

AffineMap AffineMap::from_rate_offset(Complex rate, Complex offset) {
  check_rate(rate);
  if (!is_finite(offset)) throw InvalidArgument("affine map offset must be finite");
  return AffineMap(rate, offset / (1.0 - rate), offset);
}

AffineMap AffineMap::constant(Complex value) { return from_rate_offset(0.0, value); }

Complex AffineMap::preimage(Complex z) const {
  if (is_degenerate()) throw PreconditionFailed("constant map has no preimage");
  if (fixes(z)) return fixed_point_;
  return (z - offset_) / rate_;
}

bool AffineMap::fixes(Complex z) const noexcept { return same_point((*this)(z), z); }

AffineMap AffineMap::after(const AffineMap& inner) const {
  return from_rate_offset(rate_ * inner.rate_, rate_ * inner.offset_ + offset_);
}

bool AffineMap::approx_equal(const AffineMap& other, double rel_tol) const noexcept {
  return same_point(rate_, other.rate_, rel_tol) && same_point(offset_, other.offset_, rel_tol);
}

}  // namespace csofp
