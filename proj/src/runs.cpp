#include "csofp/runs.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>
#include <openssl/evp.h>

#include "csofp/errors.hpp"
#include "csofp/fixpoint.hpp"

namespace csofp {

namespace {

using Json = nlohmann::ordered_json;

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json config_json(const OperatorConfig& config) { return Json::parse(serialize_config(config)); }

Json report(const std::string& command, const Json& arguments, const std::string& digest_input) {
  Json doc;
  doc["command"] = command;
  doc["arguments"] = arguments;
  doc["inputs_sha256"] = sha256_hex(command + "\n" + arguments.dump() + "\n" + digest_input);
  return doc;
}

Json choice_json(const OperatorChoice& choice) {
  Json j = Json::object();
  if (choice.pin) j["pin"] = complex_json(*choice.pin);
  if (choice.project) j["project"] = *choice.project;
  return j;
}

struct ChosenOperator {
  AffineCso op;
  std::string source;
};

ChosenOperator choose(const AffineCso& T, const OperatorChoice& choice) {
  if (choice.pin && choice.project) throw InvalidArgument("choose at most one of pin and project");
  if (choice.pin) return {pinned(T, *choice.pin), "pinned at " + to_string(*choice.pin)};
  if (choice.project) {
    if (*choice.project >= T.length()) throw InvalidArgument("project index out of range");
    return {projected_j(T, *choice.project), "projected j = " + std::to_string(*choice.project)};
  }
  return {T, "config"};
}

Json term_json(const SingularTerm& t) {
  Json j;
  j["kind"] = t.kind == SingularKind::Log ? "log" : "pole";
  j["location"] = complex_json(t.location);
  j["order"] = t.order;
  j["weight"] = complex_json(t.weight);
  return j;
}

Json series_json(const DiscSeries& f) {
  Json j;
  j["radius"] = f.radius();
  Json coeffs = Json::array();
  for (const Complex& c : f.coeffs()) coeffs.push_back(complex_json(c));
  j["coefficients"] = std::move(coeffs);
  j["tail_bound"] = f.tail_bound();
  return j;
}

Json singular_json(const SingularFunction& f) {
  Json j;
  Json terms = Json::array();
  for (const SingularTerm& t : f.terms()) terms.push_back(term_json(t));
  j["terms"] = std::move(terms);
  j["regular"] = series_json(f.regular());
  return j;
}

// Relative rounding envelope quoted next to values computed in closed form.
constexpr double kRoundingTol = 1e-12;

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw InvalidArgument("format_double: conversion failed");
  return std::string(buffer, end);
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw InvalidArgument("sha256: digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::vector<Complex> golden_sample_points(int which, std::size_t count, std::uint64_t seed) {
  if (which != 1 && which != 2) throw InvalidArgument("fixed point selector must be 1 or 2");
  const Complex avoid = which == 1 ? 0.0 : 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Complex> out;
  while (out.size() < count) {
    const double r = 0.9 * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    const Complex z = std::polar(r, theta);
    if (std::abs(z - avoid) >= 0.2) out.push_back(z);
  }
  return out;
}

std::string run_diagnose(const OperatorConfig& config, const DiagnoseOptions& options) {
  const AffineCso base = to_operator(config);
  const ChosenOperator chosen = choose(base, options.choice);
  const AffineCso& T = chosen.op;
  const double R = options.radius.value_or(config.radius);

  Json args;
  args["radius"] = R;
  args["n_max"] = options.n_max;
  args["m_max"] = options.m_max;
  args["operator_choice"] = choice_json(options.choice);
  Json doc = report("diagnose", args, serialize_config(config));

  Json out;
  out["operator"] = {{"source", chosen.source}, {"config", config_json(from_operator(T, R, config.mu, config.truncation))}};
  out["radius"] = R;

  const ContractionReport cr = contraction_report(T, config.mu, R, options.n_max);
  Json c;
  c["mu"] = cr.mu;
  c["R0"] = cr.R0;
  c["N"] = cr.N;
  c["ratios"] = cr.ratios;
  c["tail_ratio"] = std::isfinite(cr.tail_ratio) ? Json(cr.tail_ratio) : Json(nullptr);
  c["rate"] = std::isfinite(cr.rate) ? Json(cr.rate) : Json(nullptr);
  c["is_contraction"] = cr.is_contraction;
  c["relative_tol"] = kRoundingTol;
  out["contraction"] = std::move(c);

  try {
    out["n1_crossover_radius"] = {{"value", ratio_crossover_radius(T, 1)}, {"relative_tol", 1e-12}};
  } catch (const PreconditionFailed&) {
    out["n1_crossover_radius"] = nullptr;
  }

  const PolyDegreeReport degrees = poly_fp_degrees(T, options.m_max);
  out["polynomial_fixed_points"] = {{"degrees", degrees.degrees},
                                    {"cutoff", degrees.cutoff},
                                    {"m_max", options.m_max},
                                    {"relative_tol", kRelationTolerance}};

  Json independence = Json::array();
  std::vector<Complex> fixed_points;
  for (std::size_t i = 0; i < T.length(); ++i) {
    const AffineMap& map = T.term(i).map;
    if (map.is_degenerate()) continue;
    fixed_points.push_back(map.fixed_point());
    independence.push_back({{"index", i},
                            {"fixed_point", complex_json(map.fixed_point())},
                            {"independent", fixed_point_independence(T, i, R)}});
  }
  out["fixed_point_independence"] = std::move(independence);

  Json simplicity = Json::array();
  for (const PointVerdict& v : simplicity_check(T, fixed_points)) {
    simplicity.push_back({{"point", complex_json(v.point)},
                          {"fixed_by", v.fixed_by},
                          {"simple", v.simple()},
                          {"detail", v.describe()}});
  }
  out["simplicity"] = std::move(simplicity);

  Json seeds = Json::array();
  for (std::size_t i = 0; i < T.length(); ++i) {
    if (T.term(i).map.is_degenerate()) continue;
    try {
      const Admissibility a = seed_admissibility(T, SingularTerm::log(T.term(i).map.fixed_point()));
      seeds.push_back({{"index", i}, {"log_admissible", a.admissible}, {"mismatch", a.mismatch}});
    } catch (const PreconditionFailed& e) {
      seeds.push_back({{"index", i}, {"log_admissible", false}, {"detail", e.what()}});
    }
  }
  out["log_seeds"] = std::move(seeds);

  const auto m = smallest_contracting_derivative(T, R);
  out["smallest_contracting_derivative"] = m ? Json(*m) : Json(nullptr);

  doc["outputs"] = std::move(out);
  return doc.dump(2) + "\n";
}

namespace {

// Default operator for the fixed point constructions: T itself when it
// contracts, otherwise the projection that keeps T's fixed points.
ChosenOperator default_operator(const AffineCso& T, std::size_t index, double R) {
  if (maps_disc_into_itself(T, R) && certified_rate(T, R) < 1.0) return {T, "config"};
  auto unit = [&](std::size_t j) {
    return std::abs(T.term(j).coefficient - 1.0) <= kRelationTolerance * std::abs(T.term(j).coefficient);
  };
  if (T.length() == 2 && unit(1 - index)) return {projected_j(T, 1 - index), "projected j = " + std::to_string(1 - index)};
  if (unit(index) && T.length() > 1) return {projected_j(T, index), "projected j = " + std::to_string(index)};
  return {T, "config"};
}

const char* route_json_name(RouteKind kind) {
  switch (kind) {
    case RouteKind::Direct:
      return "direct";
    case RouteKind::GeneralizedSeed:
      return "generalized";
    case RouteKind::DerivativeRoute:
      return "derivative";
  }
  return "unknown";
}

}  // namespace

std::string run_fixpoint(const OperatorConfig& config, const FixpointOptions& options) {
  const AffineCso base = to_operator(config);
  const double R = options.radius.value_or(config.radius);
  if (options.index >= base.length()) throw InvalidArgument("seed index out of range");
  if (options.seed == SeedKind::Pole && options.order < 1) throw InvalidArgument("pole order must be >= 1");
  if (options.route == RouteChoice::Derivative && options.seed != SeedKind::Log)
    throw InvalidArgument("the derivative route builds log fixed points only");

  const Complex location = base.term(options.index).map.fixed_point();
  const SingularTerm term =
      options.seed == SeedKind::Log ? SingularTerm::log(location) : SingularTerm::pole(location, options.order);
  (void)make_seed(base, term);  // names the violated condition for the original operator

  const bool explicit_choice = options.choice.pin || options.choice.project;
  ChosenOperator chosen = explicit_choice ? choose(base, options.choice)
                          : options.route == RouteChoice::Derivative ? ChosenOperator{base, "config"}
                                                                      : default_operator(base, options.index, R);
  const SolverOptions solver{options.tol, options.max_iter, kDefaultRatioCount};
  const std::size_t size = config.truncation;

  FixedPointResult result = [&] {
    switch (options.route) {
      case RouteChoice::Direct:
        return seeded_fixed_point(chosen.op, make_seed(chosen.op, term), R, solver, size);
      case RouteChoice::Generalized:
        return generalized_seed_fixed_point(chosen.op, make_seed(chosen.op, term), R, solver, {options.k_max, 0},
                                            size);
      case RouteChoice::Derivative: {
        std::size_t m = options.m;
        if (m == 0) {
          const auto found = smallest_contracting_derivative(chosen.op, R);
          if (!found) throw PreconditionFailed("no m <= 64 makes T^(m) a contraction on G_R");
          m = *found;
        }
        return derivative_route_fixed_point(chosen.op, options.index, m, R, solver, size);
      }
      case RouteChoice::Auto:
        break;
    }
    const SeedSpec seed = make_seed(chosen.op, term);
    if (regular_remainder(chosen.op, seed_function(seed, R, size)))
      return seeded_fixed_point(chosen.op, seed, R, solver, size);
    return generalized_seed_fixed_point(chosen.op, seed, R, solver, {options.k_max, 0}, size);
  }();

  Json args;
  args["seed"] = options.seed == SeedKind::Log ? "log" : "pole";
  args["index"] = options.index;
  if (options.seed == SeedKind::Pole) args["order"] = options.order;
  static constexpr const char* kRoutes[] = {"auto", "direct", "generalized", "derivative"};
  args["route"] = kRoutes[static_cast<int>(options.route)];
  if (options.route == RouteChoice::Derivative) args["m"] = options.m;
  args["operator_choice"] = choice_json(options.choice);
  args["radius"] = R;
  args["tol"] = options.tol;
  args["k_max"] = options.k_max;
  args["max_iter"] = options.max_iter;
  Json doc = report("fixpoint", args, serialize_config(config));

  Json out;
  out["operator"] = {{"source", chosen.source}, {"config", config_json(from_operator(chosen.op, R, config.mu, size))}};
  out["seed"] = {{"term", term_json(term)}, {"matched_index", options.index}};
  out["route"] = {{"kind", route_json_name(result.route.kind)},
                  {"parameter", result.route.parameter},
                  {"name", result.route.name()}};
  out["residual"] = {{"value", result.residual_norm}, {"tol", options.tol}};
  if (chosen.source != "config") {
    // Fixed points of the projection are fixed points of the configured operator.
    const double original = fixed_point_residual(base, result.fixed_point);
    if (chosen.source.rfind("projected", 0) == 0) {
      if (!(original <= options.tol)) {
        throw ConvergenceFailure("residual " + format_double(original) +
                                 " for the configured operator exceeds the tolerance");
      }
      out["configured_operator_residual"] = {{"value", original}, {"tol", options.tol}};
    }
  }
  out["iterations"] = result.iterations;
  out["rate"] = {{"value", result.rate}, {"relative_tol", kRoundingTol}};
  out["fixed_point"] = singular_json(result.fixed_point);
  doc["outputs"] = std::move(out);
  return doc.dump(2) + "\n";
}

std::string run_polyfix(const OperatorConfig& config, const PolyfixOptions& options) {
  const AffineCso T = to_operator(config);
  Json args;
  args["m_max"] = options.m_max;
  Json doc = report("polyfix", args, serialize_config(config));

  const PolyDegreeReport degrees = poly_fp_degrees(T, options.m_max);
  Json basis = Json::array();
  for (const auto& p : poly_fixed_points(T, options.m_max)) {
    // Coefficient l1 norm of T p - p.
    std::vector<Complex> image(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      const auto mk = monomial_image(T, k);
      for (std::size_t r = 0; r < mk.size(); ++r) image[r] += p[k] * mk[r];
    }
    double residual = 0.0;
    for (std::size_t r = 0; r < p.size(); ++r) residual += std::abs(image[r] - p[r]);
    Json coeffs = Json::array();
    for (const Complex& c : p) coeffs.push_back(complex_json(c));
    basis.push_back({{"degree", p.size() - 1}, {"coefficients", std::move(coeffs)}, {"kernel_residual", residual}});
  }
  Json out;
  out["degrees"] = degrees.degrees;
  out["cutoff"] = degrees.cutoff;
  out["relative_tol"] = kRelationTolerance;
  out["kernel_basis"] = std::move(basis);
  out["singular_value_tol"] = 1e-10;
  doc["outputs"] = std::move(out);
  return doc.dump(2) + "\n";
}

std::string run_golden_fp(const GoldenOptions& options) {
  Json args;
  args["depth"] = options.depth;
  args["radius"] = options.radius;
  args["tol"] = options.tol;
  args["samples"] = options.samples;
  args["seed"] = options.seed;
  Json doc = report("golden fp", args, "");

  const golden::GoldenConstants& g = golden::constants();
  Json out = Json::array();
  for (int which : {1, 2}) {
    const FixedPointResult engine = golden::engine_fixed_point(which, options.radius, {options.tol});
    const auto points = golden_sample_points(which, options.samples, options.seed);
    const auto partials = golden::word_fixed_point_partials(which, options.depth, points, options.threads);
    Json rows = Json::array();
    double worst = 0.0, worst_corrected = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const Complex e = eval_singular(engine.fixed_point, points[p]);
      const Complex w = partials[p].back();
      const double diff = std::abs(golden::branch_difference(e, w));
      const double corrected = std::abs(golden::branch_difference(e, golden::tail_corrected(partials[p])));
      worst = std::max(worst, diff);
      worst_corrected = std::max(worst_corrected, corrected);
      rows.push_back({{"z", complex_json(points[p])},
                      {"engine", complex_json(e)},
                      {"word", complex_json(w)},
                      {"difference", diff},
                      {"difference_tail_corrected", corrected}});
    }
    const Complex c = which == 1 ? g.c1 : g.c2;
    const Complex pin_word = golden::word_fixed_point(which, options.depth, c);
    Json block;
    block["which"] = which;
    block["route"] = engine.route.name();
    block["residual"] = {{"value", engine.residual_norm}, {"tol", options.tol}};
    block["pin_point"] = complex_json(c);
    block["engine_value_at_pin"] = complex_json(eval_singular(engine.fixed_point, c));
    block["word_value_at_pin"] = complex_json(pin_word);
    // f(c) = 0 holds modulo 2 pi i: each log term takes its principal branch.
    block["engine_pin_residual"] = std::abs(golden::branch_difference(eval_singular(engine.fixed_point, c), 0.0));
    block["word_pin_residual"] = std::abs(golden::branch_difference(pin_word, 0.0));
    block["max_difference"] = worst;
    block["max_difference_tail_corrected"] = worst_corrected;
    block["rows"] = std::move(rows);
    out.push_back(std::move(block));
  }
  doc["outputs"] = {{"comparisons", std::move(out)}, {"level_decay", golden::level_decay()}};
  return doc.dump(2) + "\n";
}

std::string run_golden_identity(const GoldenOptions& options) {
  Json args;
  args["depth"] = options.depth;
  Json doc = report("golden identity", args, "");
  const double limit = 1.0 + golden::constants().omega;
  const auto products = golden::identity_partial_products(options.depth);
  Json rows = Json::array();
  for (std::size_t d = 0; d < products.size(); ++d)
    rows.push_back({{"depth", d}, {"value", products[d]}, {"error", std::abs(products[d] - limit)}});
  doc["outputs"] = {{"limit", limit}, {"relative_tol", kRoundingTol}, {"partial_products", std::move(rows)}};
  return doc.dump(2) + "\n";
}

std::string figure_csv(const golden::FigureTable& table) {
  std::string csv = "x,re_exp_f1,re_exp_f2,ratio_dev\n";
  for (const golden::FigureRow& r : table.rows) {
    csv += format_double(r.x) + "," + format_double(r.re_exp_f1) + "," + format_double(r.re_exp_f2) + "," +
           format_double(r.ratio_dev) + "\n";
  }
  return csv;
}

std::string run_golden_figure(const GoldenOptions& options) {
  Json args;
  args["depth"] = options.depth;
  args["out"] = options.csv_path;
  Json doc = report("golden figure", args, "");
  const auto grid = golden::default_figure_grid();
  const golden::FigureTable table = golden::figure_data(grid, options.depth, options.threads);
  Json out;
  out["rows"] = table.rows.size();
  out["kappa"] = table.kappa;
  out["kappa_gap"] = table.kappa_gap;
  out["max_ratio_dev"] = table.max_ratio_dev;
  out["relative_tol"] = kRoundingTol;
  if (!options.csv_path.empty()) {
    std::ofstream file(options.csv_path, std::ios::binary);
    if (!file) throw InvalidArgument("cannot write " + options.csv_path);
    file << figure_csv(table);
    out["csv"] = options.csv_path;
  } else {
    Json rows = Json::array();
    for (const golden::FigureRow& r : table.rows) rows.push_back({r.x, r.re_exp_f1, r.re_exp_f2, r.ratio_dev});
    out["table"] = std::move(rows);
  }
  doc["outputs"] = std::move(out);
  return doc.dump(2) + "\n";
}

std::string run_golden_sfs(const GoldenOptions& options) {
  Json args;
  args["n"] = options.n;
  Json doc = report("golden sfs", args, "");
  const golden::SfsSpectrum spectrum = golden::sfs_spectrum(options.n);
  Json matrix = Json::array();
  for (const auto& row : spectrum.matrix) {
    Json r = Json::array();
    for (const golden::Rational& q : row)
      r.push_back(q.denominator() == 1 ? std::to_string(q.numerator())
                                       : std::to_string(q.numerator()) + "/" + std::to_string(q.denominator()));
    matrix.push_back(std::move(r));
  }
  Json eigenvalues = Json::array();
  for (const Complex& e : spectrum.eigenvalues) eigenvalues.push_back(complex_json(e));

  std::vector<golden::Rational> shifted(spectrum.matrix.size());
  shifted[0] = -1;
  shifted[1] = 1;
  const bool fixes = golden::sfs_apply(spectrum.matrix, shifted) == shifted;

  doc["outputs"] = {{"matrix", std::move(matrix)},
                    {"eigenvalues", std::move(eigenvalues)},
                    {"eigenvalue_tol", 1e-10},
                    {"fixes_x_minus_1", fixes}};
  return doc.dump(2) + "\n";
}

}  // namespace csofp
