#include "csofp/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csofp/errors.hpp"

namespace csofp {

namespace {

void check_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidArgument("series radius must be positive and finite, got " + std::to_string(radius));
}

}  // namespace

DiscSeries::DiscSeries(std::vector<Complex> coeffs, double radius, double tail_bound)
    : coeffs_(std::move(coeffs)), radius_(radius), tail_bound_(tail_bound) {
  check_radius(radius);
  if (!(tail_bound >= 0.0) || !std::isfinite(tail_bound))
    throw InvalidArgument("series tail bound must be finite and nonnegative");
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    if (!is_finite(coeffs_[n])) throw InvalidArgument("series coefficient " + std::to_string(n) + " is not finite");
  }
  if (coeffs_.empty()) coeffs_.push_back(Complex{});
}

DiscSeries DiscSeries::zero(double radius, std::size_t size) {
  return DiscSeries(std::vector<Complex>(std::max<std::size_t>(size, 1)), radius);
}

DiscSeries DiscSeries::monomial(std::size_t n, double radius) {
  std::vector<Complex> c(n + 1);
  c[n] = 1.0;
  return DiscSeries(std::move(c), radius);
}

DiscSeries DiscSeries::constant(Complex value, double radius) { return DiscSeries({value}, radius); }

double DiscSeries::polynomial_norm() const noexcept {
  double sum = 0.0;
  double power = 1.0;
  for (const Complex& c : coeffs_) {
    sum += std::abs(c) * power;
    power *= radius_;
  }
  return sum;
}

DiscSeries DiscSeries::scaled(Complex w) const {
  std::vector<Complex> c(coeffs_);
  for (Complex& x : c) x *= w;
  return DiscSeries(std::move(c), radius_, std::abs(w) * tail_bound_);
}

DiscSeries DiscSeries::with_added_tail(double extra) const {
  return DiscSeries(coeffs_, radius_, tail_bound_ + extra);
}

DiscSeries DiscSeries::polynomial_part() const { return DiscSeries(coeffs_, radius_, 0.0); }

DiscSeries DiscSeries::truncated(std::size_t n) const {
  if (n >= coeffs_.size()) return *this;
  n = std::max<std::size_t>(n, 1);
  double dropped = 0.0;
  double power = std::pow(radius_, static_cast<double>(n));
  for (std::size_t k = n; k < coeffs_.size(); ++k) {
    dropped += std::abs(coeffs_[k]) * power;
    power *= radius_;
  }
  return DiscSeries(std::vector<Complex>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(n)),
                    radius_, tail_bound_ + dropped);
}

DiscSeries DiscSeries::padded(std::size_t n) const {
  if (n <= coeffs_.size()) return *this;
  std::vector<Complex> c(coeffs_);
  c.resize(n);
  return DiscSeries(std::move(c), radius_, tail_bound_);
}

DiscSeries make_series(std::span<const Complex> coeffs, double radius) {
  return DiscSeries(std::vector<Complex>(coeffs.begin(), coeffs.end()), radius);
}

double l1_norm(const DiscSeries& f) noexcept { return f.l1_norm(); }

DiscSeries linear_combine(std::span<const std::pair<Complex, DiscSeries>> pairs) {
  if (pairs.empty()) throw InvalidArgument("linear_combine needs at least one term");
  const double radius = pairs.front().second.radius();
  std::size_t size = 0;
  for (const auto& [w, f] : pairs) {
    if (f.radius() != radius) throw InvalidArgument("linear_combine: mismatched radii");
    if (!is_finite(w)) throw InvalidArgument("linear_combine: non-finite weight");
    size = std::max(size, f.size());
  }
  std::vector<Complex> c(size);
  double tail = 0.0;
  for (const auto& [w, f] : pairs) {
    const auto fc = f.coeffs();
    for (std::size_t n = 0; n < fc.size(); ++n) c[n] += w * fc[n];
    tail += std::abs(w) * f.tail_bound();
  }
  return DiscSeries(std::move(c), radius, tail);
}

DiscSeries operator+(const DiscSeries& a, const DiscSeries& b) {
  const std::pair<Complex, DiscSeries> p[] = {{1.0, a}, {1.0, b}};
  return linear_combine(p);
}

DiscSeries operator-(const DiscSeries& a, const DiscSeries& b) {
  const std::pair<Complex, DiscSeries> p[] = {{1.0, a}, {-1.0, b}};
  return linear_combine(p);
}

DiscSeries operator*(Complex w, const DiscSeries& f) { return f.scaled(w); }

DiscSeries compose_affine(const DiscSeries& f, const AffineMap& map, double out_radius) {
  check_radius(out_radius);
  const Complex s = map.rate();
  const Complex t = map.offset();
  const double reach = std::abs(s) * out_radius + std::abs(t);
  if (!(reach < f.radius())) {
    throw PreconditionFailed("compose_affine: image disc of radius " + std::to_string(out_radius) +
                             " reaches " + std::to_string(reach) + ", outside the domain disc of radius " +
                             std::to_string(f.radius()));
  }
  const auto c = f.coeffs();
  const std::size_t size = c.size();
  // Taylor shift f(w + t) by repeated synthetic division, then w = s z scales
  // coefficient k by s^k. Split real and imaginary parts keep the inner loop
  // free of the library's complex-multiply special cases.
  std::vector<double> re(size), im(size);
  for (std::size_t k = 0; k < size; ++k) {
    re[k] = c[k].real();
    im[k] = c[k].imag();
  }
  const double tr = t.real(), ti = t.imag();
  if (tr != 0.0 || ti != 0.0) {
    for (std::size_t i = 0; i + 1 < size; ++i) {
      for (std::size_t j = size - 1; j-- > i;) {
        const double r = re[j + 1], q = im[j + 1];
        re[j] += tr * r - ti * q;
        im[j] += tr * q + ti * r;
      }
    }
  }
  std::vector<Complex> g(size);
  Complex power = 1.0;
  for (std::size_t k = 0; k < size; ++k) {
    g[k] = power * Complex(re[k], im[k]);
    power *= s;
  }
  return DiscSeries(std::move(g), out_radius, f.tail_bound());
}

DiscSeries differentiate(const DiscSeries& f, double inner_margin) {
  const double delta = inner_margin > 0.0 ? inner_margin : f.radius() / 10.0;
  const auto c = f.coeffs();
  std::vector<Complex> d(std::max<std::size_t>(c.size(), 2) - 1);
  for (std::size_t n = 1; n < c.size(); ++n) d[n - 1] = static_cast<double>(n) * c[n];
  return DiscSeries(std::move(d), f.radius(), f.tail_bound() / (delta * delta));
}

DiscSeries integrate_from_zero(const DiscSeries& f) {
  const auto c = f.coeffs();
  std::vector<Complex> g(c.size() + 1);
  for (std::size_t n = 0; n < c.size(); ++n) g[n + 1] = c[n] / static_cast<double>(n + 1);
  // Discarded coefficients sit at index >= size, so each gains a factor R / (n + 1) <= R / (size + 1).
  const double tail = f.tail_bound() * f.radius() / static_cast<double>(c.size() + 1);
  return DiscSeries(std::move(g), f.radius(), tail);
}

namespace {

double expansion_ratio(Complex a, Complex b, double radius, const char* what) {
  check_radius(radius);
  if (!is_finite(a) || !is_finite(b)) throw InvalidArgument(std::string(what) + ": non-finite parameters");
  if (a == Complex{}) throw PreconditionFailed(std::string(what) + ": singularity at the disc centre");
  const double q = std::abs(b) * radius / std::abs(a);
  if (!(q < 1.0)) {
    throw PreconditionFailed(std::string(what) + ": singularity " + to_string(-a / b) +
                             " lies inside the closed disc of radius " + std::to_string(radius));
  }
  return q;
}

}  // namespace

DiscSeries log_affine(Complex a, Complex b, double radius, std::size_t size) {
  const double q = expansion_ratio(a, b, radius, "log_affine");
  size = std::max<std::size_t>(size, 1);
  std::vector<Complex> c(size);
  c[0] = std::log(a);
  const Complex ratio = b / a;
  Complex power = 1.0;
  for (std::size_t n = 1; n < size; ++n) {
    power *= -ratio;
    c[n] = -power / static_cast<double>(n);
  }
  // sum_{n >= size} q^n / n <= q^size / (size (1 - q))
  const double tail = q == 0.0 ? 0.0 : std::pow(q, static_cast<double>(size)) / (static_cast<double>(size) * (1.0 - q));
  return DiscSeries(std::move(c), radius, tail);
}

DiscSeries inverse_power_affine(Complex a, Complex b, int k, double radius, std::size_t size) {
  if (k < 1) throw InvalidArgument("inverse_power_affine: order must be >= 1");
  const double q = expansion_ratio(a, b, radius, "inverse_power_affine");
  size = std::max<std::size_t>(size, 1);
  std::vector<Complex> c(size);
  const Complex ratio = -b / a;
  c[0] = std::pow(a, -k);
  double magnitude = std::pow(std::abs(a), -static_cast<double>(k));  // |c_n| R^n
  for (std::size_t n = 1; n < size; ++n) {
    const double growth = static_cast<double>(n + static_cast<std::size_t>(k) - 1) / static_cast<double>(n);
    c[n] = c[n - 1] * ratio * growth;
    magnitude *= q * growth;
  }
  double tail = 0.0;
  if (q > 0.0) {
    // Successive tail terms shrink by q (n + k) / (n + 1), which decreases towards q.
    const double first = magnitude * q * static_cast<double>(size + static_cast<std::size_t>(k) - 1) /
                         static_cast<double>(size);
    const double rho = q * static_cast<double>(size + static_cast<std::size_t>(k)) / static_cast<double>(size + 1);
    if (!(rho < 1.0)) {
      throw PreconditionFailed("inverse_power_affine: " + std::to_string(size) +
                               " coefficients are too few to bound the expansion tail");
    }
    tail = first / (1.0 - rho);
  }
  return DiscSeries(std::move(c), radius, tail);
}

Complex eval_at(const DiscSeries& f, Complex z) {
  if (!is_finite(z)) throw InvalidArgument("eval_at: non-finite point");
  if (!(std::abs(z) < f.radius()))
    throw PreconditionFailed("eval_at: point " + to_string(z) + " is outside the open disc of radius " +
                             std::to_string(f.radius()));
  const auto c = f.coeffs();
  Complex value{};
  for (std::size_t n = c.size(); n-- > 0;) value = value * z + c[n];
  return value;
}

}  // namespace csofp
