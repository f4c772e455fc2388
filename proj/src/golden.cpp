#include "csofp/golden.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include <Eigen/Eigenvalues>

#include "csofp/errors.hpp"

namespace csofp::golden {

namespace {

// Compensated accumulator.
template <typename T>
struct Kahan {
  T sum{};
  T carry{};

  void add(T x) {
    const T y = x - carry;
    const T next = sum + y;
    carry = (next - sum) - y;
    sum = next;
  }
};

struct ComplexKahan {
  Kahan<double> re, im;
  void add(Complex x) {
    re.add(x.real());
    im.add(x.imag());
  }
  Complex value() const { return {re.sum, im.sum}; }
};

void check_which(int which) {
  if (which != 1 && which != 2) throw InvalidArgument("fixed point selector must be 1 or 2");
}

// Runs body(begin, end) over [0, count) split into `threads` contiguous chunks.
template <typename Body>
void split_work(std::size_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (std::thread& t : pool) t.join();
}

// Per-point, per-level sums of the word terms, leading log excluded.
// Small terms are multiplied in blocks and logged once per block; with |u| < kSmallU
// and at most kBlock factors the arguments sum to well under pi, so the principal
// log of the product equals the sum of the principal logs.
std::vector<std::vector<Complex>> level_sums(int which, std::size_t depth, std::span<const Complex> zs) {
  constexpr double kSmallU = 0.05;
  constexpr int kBlock = 16;
  struct Block {
    double re = 1.0, im = 0.0;
    int count = 0;
  };
  const double omega = constants().omega;
  const double ref = which == 1 ? -omega : omega;
  std::vector<std::vector<ComplexKahan>> acc(zs.size(), std::vector<ComplexKahan>(depth + 1));
  std::vector<std::vector<Block>> blocks(zs.size(), std::vector<Block>(depth + 1));
  const auto flush = [&](std::size_t p, std::size_t level) {
    Block& b = blocks[p][level];
    if (b.count == 0) return;
    acc[p][level].add({0.5 * std::log(b.re * b.re + b.im * b.im), std::atan2(b.im, b.re)});
    b = Block{};
  };
  for_each_word(depth, [&](std::size_t level, double s, double t) {
    // (1 + omega phi(z)) / (1 + omega phi(ref)) = 1 + u with u = omega s (z - ref) / den.
    const double scale = omega * s / (1.0 + omega * (s * ref + t));
    for (std::size_t p = 0; p < zs.size(); ++p) {
      const double ur = scale * (zs[p].real() - ref);
      const double ui = scale * zs[p].imag();
      if (ur * ur + ui * ui < kSmallU * kSmallU) {
        Block& b = blocks[p][level];
        const double re = b.re * (1.0 + ur) - b.im * ui;
        b.im = b.re * ui + b.im * (1.0 + ur);
        b.re = re;
        if (++b.count == kBlock) flush(p, level);
        continue;
      }
      if (ur == -1.0 && ui == 0.0) {
        throw PreconditionFailed("word expansion: " + to_string(zs[p]) + " hits a pulled-back singularity");
      }
      acc[p][level].add({0.5 * std::log1p(ur * (2.0 + ur) + ui * ui), std::atan2(ui, 1.0 + ur)});
    }
  });
  std::vector<std::vector<Complex>> out(zs.size(), std::vector<Complex>(depth + 1));
  for (std::size_t p = 0; p < zs.size(); ++p)
    for (std::size_t n = 0; n <= depth; ++n) {
      flush(p, n);
      out[p][n] = acc[p][n].value();
    }
  return out;
}

Complex leading_log(int which, Complex z) {
  const double omega = constants().omega;
  if (which == 1) {
    if (z == Complex{}) throw PreconditionFailed("f_1 is singular at 0");
    return std::log(z / Complex(-omega));
  }
  if (z == Complex(1.0)) throw PreconditionFailed("f_2 is singular at 1");
  return std::log((z - 1.0) / Complex(omega - 1.0));
}

void check_point(Complex z) {
  if (!is_finite(z)) throw InvalidArgument("evaluation point must be finite");
}

}  // namespace

const GoldenConstants& constants() {
  static const GoldenConstants g = [] {
    const double omega = (std::sqrt(5.0) - 1.0) / 2.0;
    return GoldenConstants{omega, AffineMap(-omega, 0.0), AffineMap(omega * omega, 1.0), Complex(-omega),
                           Complex(omega)};
  }();
  return g;
}

AffineCso make_M() {
  const GoldenConstants& g = constants();
  return AffineCso({{1.0, g.phi1}, {1.0, g.phi2}});
}

std::vector<Complex> word_fixed_point_partials(int which, std::size_t depth, Complex z) {
  const Complex zs[] = {z};
  return word_fixed_point_partials(which, depth, zs).front();
}

std::vector<std::vector<Complex>> word_fixed_point_partials(int which, std::size_t depth, std::span<const Complex> zs,
                                                            unsigned threads) {
  check_which(which);
  std::vector<std::vector<Complex>> out(zs.size(), std::vector<Complex>(depth + 1));
  std::vector<Complex> lead(zs.size());
  for (std::size_t p = 0; p < zs.size(); ++p) {
    check_point(zs[p]);
    lead[p] = leading_log(which, zs[p]);
  }
  split_work(zs.size(), threads, [&](std::size_t begin, std::size_t end) {
    const auto levels = level_sums(which, depth, zs.subspan(begin, end - begin));
    for (std::size_t p = begin; p < end; ++p) {
      ComplexKahan running;
      running.add(lead[p]);
      for (std::size_t n = 0; n <= depth; ++n) {
        running.add(levels[p - begin][n]);
        out[p][n] = running.value();
      }
    }
  });
  return out;
}

std::vector<Complex> word_fixed_point(int which, std::size_t depth, std::span<const Complex> zs, unsigned threads) {
  const auto partials = word_fixed_point_partials(which, depth, zs, threads);
  std::vector<Complex> out;
  out.reserve(partials.size());
  for (const auto& p : partials) out.push_back(p.back());
  return out;
}

double level_decay() {
  const double w2 = constants().omega * constants().omega;
  return w2 + w2 * w2;
}

Complex tail_corrected(std::span<const Complex> partials) {
  if (partials.empty()) throw InvalidArgument("tail_corrected: no partial sums");
  if (partials.size() == 1) return partials.front();
  const double lambda = level_decay();
  const Complex last = partials[partials.size() - 1];
  return last + (last - partials[partials.size() - 2]) * (lambda / (1.0 - lambda));
}

Complex word_fixed_point(int which, std::size_t depth, Complex z) {
  const Complex zs[] = {z};
  return word_fixed_point(which, depth, zs).front();
}

std::vector<double> identity_partial_products(std::size_t depth) {
  const double omega = constants().omega;
  std::vector<Kahan<double>> levels(depth + 1);
  for_each_word(depth, [&](std::size_t level, double s, double t) {
    const double num = 1.0 + omega * (s * omega + t);
    const double den = 1.0 + omega * (-s * omega + t);
    levels[level].add(std::log(num / den));
  });
  std::vector<double> out(depth + 1);
  Kahan<double> running;
  for (std::size_t n = 0; n <= depth; ++n) {
    running.add(levels[n].sum);
    out[n] = std::exp(running.sum);
  }
  return out;
}

double identity_partial_product(std::size_t depth) { return identity_partial_products(depth).back(); }

RatioSides log_ratio_sides(Complex z) {
  check_point(z);
  const double omega = constants().omega;
  const double scale = std::max(1.0, std::abs(z));
  const Complex a = -omega * z;
  const Complex b = omega * omega * z + omega;
  if (std::abs(z) <= 1e-12 || std::abs(z - 1.0) <= 1e-12 * scale || std::abs(a - 1.0) <= 1e-12 * scale ||
      std::abs(b) <= 1e-12 * scale) {
    throw PreconditionFailed("log ratio sample " + to_string(z) + " is singular");
  }
  return {(a / (a - 1.0)) * (b / (b - 1.0)), z / (z - 1.0)};
}

double log_ratio_invariance(std::span<const Complex> samples) {
  double worst = 0.0;
  for (const Complex& z : samples) {
    const RatioSides r = log_ratio_sides(z);
    worst = std::max(worst, std::abs(r.lhs - r.rhs) / std::abs(r.rhs));
  }
  return worst;
}

std::vector<double> default_figure_grid() {
  std::vector<double> grid(401);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = -1.5 + 3.0 * static_cast<double>(k) / 400.0;
  return grid;
}

FigureTable figure_data(std::span<const double> grid, std::size_t depth, unsigned threads) {
  const double omega = constants().omega;
  for (double x : grid) {
    if (!std::isfinite(x)) throw InvalidArgument("figure grid contains a non-finite point");
  }
  std::vector<double> e1(grid.size()), e2(grid.size());
  split_work(grid.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      e1[p] = grid[p] / -omega;
      e2[p] = (grid[p] - 1.0) / (omega - 1.0);
    }
    for_each_word(depth, [&](std::size_t, double s, double t) {
      const double den1 = 1.0 + omega * (-s * omega + t);
      const double den2 = 1.0 + omega * (s * omega + t);
      for (std::size_t p = begin; p < end; ++p) {
        const double num = 1.0 + omega * (s * grid[p] + t);
        e1[p] *= num / den1;
        e2[p] *= num / den2;
      }
    });
  });

  FigureTable table{depth, {}, omega * identity_partial_product(depth), 0.0, 0.0};
  table.kappa_gap = std::abs(table.kappa - 1.0);
  table.rows.reserve(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x = grid[p];
    double dev = 0.0;
    if (e2[p] != 0.0) {
      const double expected = x / (x - 1.0);
      dev = std::abs(e1[p] / (table.kappa * e2[p]) - expected) / std::max(1.0, std::abs(expected));
    }
    table.max_ratio_dev = std::max(table.max_ratio_dev, dev);
    table.rows.push_back({x, e1[p], e2[p], dev});
  }
  return table;
}

std::vector<std::vector<Rational>> sfs_matrix(std::size_t n) {
  if (n < 1) throw InvalidArgument("sfs: n must be >= 1");
  const std::size_t dim = 2 * n;
  if (dim > 60) throw InvalidArgument("sfs: n too large for exact 64-bit rationals");
  std::vector<std::vector<Rational>> matrix(dim, std::vector<Rational>(dim));
  for (std::size_t m = 0; m < dim; ++m) {
    // ((x - 1)/2)^m - ((1 - x)/2)^m, expanded binomially.
    const Rational half_power(1, 1LL << m);
    long long binom = 1;
    for (std::size_t k = 0; k <= m; ++k) {
      const long long first = ((m - k) % 2 == 0) ? 1 : -1;
      const long long second = (k % 2 == 0) ? 1 : -1;
      matrix[k][m] = half_power * Rational(binom * (first - second));
      binom = binom * static_cast<long long>(m - k) / static_cast<long long>(k + 1);
    }
  }
  return matrix;
}

std::vector<Rational> sfs_apply(const std::vector<std::vector<Rational>>& matrix, std::span<const Rational> v) {
  if (v.size() != matrix.size()) throw InvalidArgument("sfs_apply: vector length does not match the matrix");
  std::vector<Rational> out(matrix.size());
  for (std::size_t r = 0; r < matrix.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) out[r] += matrix[r][c] * v[c];
  return out;
}

SfsSpectrum sfs_spectrum(std::size_t n) {
  SfsSpectrum out{n, sfs_matrix(n), {}};
  const std::size_t dim = out.matrix.size();
  Eigen::MatrixXd a(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = boost::rational_cast<double>(out.matrix[r][c]);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("sfs: eigenvalue solver failed");
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) out.eigenvalues.push_back(solver.eigenvalues()(k));
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](Complex x, Complex y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  return out;
}

double general_a_omega(int a) {
  if (a < 1) throw InvalidArgument("general_a_cso: a must be >= 1");
  const double ad = static_cast<double>(a);
  return (-ad + std::sqrt(ad * ad + 4.0)) / 2.0;
}

AffineCso general_a_cso(int a) {
  const double omega = general_a_omega(a);
  std::vector<CsoTerm> terms;
  for (int i = 0; i < a; ++i)
    terms.push_back({1.0, AffineMap::from_rate_offset(-omega, -static_cast<double>(i))});
  terms.push_back({1.0, AffineMap::from_rate_offset(omega * omega, static_cast<double>(a) * omega)});
  return AffineCso(std::move(terms));
}

FixedPointResult engine_fixed_point(int which, double R, const SolverOptions& opts, std::size_t size,
                                    const GeneralizedOptions& gen) {
  check_which(which);
  const GoldenConstants& g = constants();
  const AffineCso T = pinned(make_M(), which == 1 ? g.c1 : g.c2);
  const SeedSpec seed = make_seed(T, SingularTerm::log(which == 1 ? 0.0 : 1.0));
  return generalized_seed_fixed_point(T, seed, R, opts, gen, size);
}

Complex branch_difference(Complex a, Complex b) {
  const Complex d = a - b;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return {d.real(), d.imag() - two_pi * std::round(d.imag() / two_pi)};
}

}  // namespace csofp::golden
