#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "csofp/config.hpp"
#include "csofp/golden.hpp"

namespace csofp {

/// Which operator the constructions work with.
struct OperatorChoice {
  /// Replace T by pinned(T, c).
  std::optional<Complex> pin;
  /// Replace T by projected_j(T, j).
  std::optional<std::size_t> project;
};

struct DiagnoseOptions {
  std::optional<double> radius;  // defaults to the config radius
  std::size_t n_max = kDefaultRatioCount;
  std::size_t m_max = 50;
  OperatorChoice choice;
};

enum class SeedKind { Log, Pole };
enum class RouteChoice { Auto, Direct, Generalized, Derivative };

struct FixpointOptions {
  SeedKind seed = SeedKind::Log;
  /// The seed sits at the fixed point of this map (0-based).
  std::size_t index = 0;
  int order = 1;  // pole order
  RouteChoice route = RouteChoice::Auto;
  std::size_t m = 0;  // derivative order; 0 picks the smallest contracting one
  OperatorChoice choice;
  std::optional<double> radius;
  double tol = 1e-10;
  std::size_t k_max = 8;
  std::size_t max_iter = 10000;
};

struct PolyfixOptions {
  std::size_t m_max = 10;
};

struct GoldenOptions {
  std::size_t depth = golden::kDefaultDepth;
  double radius = 2.0;
  double tol = 1e-8;
  std::size_t samples = 20;
  std::uint64_t seed = 1;
  std::size_t n = 3;  // sfs
  unsigned threads = 1;
  /// figure: CSV destination; empty keeps the rows in the report only.
  std::string csv_path;
};

/// Reports are JSON documents with the command, its arguments, a SHA-256
/// digest of config plus arguments, and an "outputs" object. They are
/// deterministic: no timing or host data.
std::string run_diagnose(const OperatorConfig& config, const DiagnoseOptions& options = {});
std::string run_fixpoint(const OperatorConfig& config, const FixpointOptions& options = {});
std::string run_polyfix(const OperatorConfig& config, const PolyfixOptions& options = {});
std::string run_golden_fp(const GoldenOptions& options = {});
std::string run_golden_identity(const GoldenOptions& options = {});
std::string run_golden_figure(const GoldenOptions& options = {});
std::string run_golden_sfs(const GoldenOptions& options = {});

/// Header row and lines of the figure CSV.
std::string figure_csv(const golden::FigureTable& table);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double value);

std::string sha256_hex(const std::string& data);

/// Deterministic sample of `count` points with |z| <= 0.9 and |z - p| >= 0.2,
/// where p is the singular point of f_which (0 or 1).
std::vector<Complex> golden_sample_points(int which, std::size_t count, std::uint64_t seed);

}  // namespace csofp
