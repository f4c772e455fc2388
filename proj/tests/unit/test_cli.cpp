#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "csofp/config.hpp"
#include "csofp/errors.hpp"
#include "csofp/runs.hpp"
#include "json.hpp"
#include "test_helpers.hpp"

using namespace csofp;
using namespace csofp::testing;
using nlohmann::json;

namespace {

std::string config_path(const std::string& name) { return std::string(CSOFP_CONFIG_DIR) + "/" + name; }

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("cli: shipped configs") {
  const OperatorConfig m = load_config(config_path("golden_m.json"));
  CHECK(m.radius == 1.9009);
  const AffineCso T = to_operator(m);
  const AffineCso ref = golden::make_M();
  REQUIRE(T.length() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(T.term(i).coefficient == ref.term(i).coefficient);
    CHECK(T.term(i).map.approx_equal(ref.term(i).map));
  }
  CHECK(load_config(config_path("pole_test.json")).radius == 4.0);
  CHECK(to_operator(load_config(config_path("halving.json"))).length() == 2);
}

TEST_CASE("cli: config errors name the field") {
  const std::string zero_a =
      R"({"terms": [{"a": [1, 0], "s": [0.5, 0], "fix": [0, 0]}, {"a": [0, 0], "s": [0.5, 0], "fix": [1, 0]}], "radius": 2})";
  CHECK(error_of(zero_a).find("terms[1].a") != std::string::npos);
  const std::string no_radius = R"({"terms": [{"a": [1, 0], "s": [0.5, 0], "fix": [0, 0]}]})";
  CHECK(error_of(no_radius).find("radius") != std::string::npos);
  CHECK_FALSE(error_of("{").empty());
  CHECK_FALSE(error_of(R"({"terms": [], "radius": 2})").empty());
  const std::string extra = R"({"terms": [{"a": [1, 0], "s": [0.5, 0], "fix": [0, 0]}], "radius": 2, "colour": 1})";
  CHECK(error_of(extra).find("colour") != std::string::npos);
  const std::string expanding = R"({"terms": [{"a": [1, 0], "s": [1.5, 0], "fix": [0, 0]}], "radius": 2})";
  CHECK_FALSE(error_of(expanding).empty());
  CHECK_THROWS_AS(load_config(config_path("missing.json")), InvalidArgument);
}

TEST_CASE("cli: diagnose reports") {
  const json r = json::parse(run_diagnose(load_config(config_path("golden_m.json"))));
  CHECK(r["command"] == "diagnose");
  CHECK(r["inputs_sha256"].get<std::string>().size() == 64);
  const json& ratios = r["outputs"]["contraction"]["ratios"];
  CHECK(ratios[0].get<double>() == doctest::Approx(2.0));
  for (std::size_t n = 1; n < ratios.size(); ++n) CHECK(ratios[n].get<double>() < 1.0);

  DiagnoseOptions pin;
  pin.choice.pin = kOmega;
  pin.radius = 2.0;
  const json p = json::parse(run_diagnose(load_config(config_path("golden_m.json")), pin));
  for (const auto& x : p["outputs"]["contraction"]["ratios"]) CHECK(x.get<double>() < 1.0);

  const json t = json::parse(run_diagnose(load_config(config_path("pole_test.json"))));
  CHECK(t["outputs"]["polynomial_fixed_points"]["degrees"].empty());
  for (const auto& x : t["outputs"]["fixed_point_independence"]) CHECK(x["independent"].get<bool>());
}

TEST_CASE("cli: fixpoint reports") {
  FixpointOptions pole;
  pole.seed = SeedKind::Pole;
  const json r = json::parse(run_fixpoint(load_config(config_path("pole_test.json")), pole));
  CHECK(r["outputs"]["residual"]["value"].get<double>() <= 1e-10);
  CHECK_THROWS_AS(run_fixpoint(load_config(config_path("golden_m.json")), pole), PreconditionFailed);

  FixpointOptions log1;
  log1.index = 1;
  log1.radius = 2.0;
  log1.tol = 1e-8;
  const json m = json::parse(run_fixpoint(load_config(config_path("golden_m.json")), log1));
  CHECK(m["outputs"]["residual"]["value"].get<double>() <= 1e-8);
}

TEST_CASE("cli: polyfix reports") {
  const json r = json::parse(run_polyfix(load_config(config_path("halving.json"))));
  CHECK(r["outputs"]["degrees"] == json::array({1}));
}

TEST_CASE("cli: golden reports") {
  GoldenOptions o;
  o.depth = 16;
  const json id = json::parse(run_golden_identity(o));
  const json& products = id["outputs"]["partial_products"];
  REQUIRE(products.size() == 17);
  CHECK(std::abs(products[16]["value"].get<double>() - 1.6180339887) < 1e-4);

  o.n = 3;
  const json s = json::parse(run_golden_sfs(o));
  const double expected[] = {1.0, 0.25, 0.0625, 0.0, 0.0, 0.0};
  const json& ev = s["outputs"]["eigenvalues"];
  REQUIRE(ev.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(ev[i][0].get<double>() == doctest::Approx(expected[i]));
  CHECK(s["outputs"]["fixes_x_minus_1"].get<bool>());

  const std::string csv = std::string(CSOFP_BINARY_DIR) + "/unit_figure.csv";
  o.depth = 12;
  o.csv_path = csv;
  run_golden_figure(o);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,re_exp_f1,re_exp_f2,ratio_dev");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 401);
  std::remove(csv.c_str());
}

TEST_CASE("cli: number formatting and digests") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto pts = golden_sample_points(2, 20, 5);
  REQUIRE(pts.size() == 20);
  for (const Complex z : pts) {
    CHECK(std::abs(z) <= 0.9);
    CHECK(std::abs(z - 1.0) >= 0.2);
  }
  CHECK(golden_sample_points(2, 20, 5) == pts);
}

TEST_CASE("cli: properties") { check_module_properties("cli", 20); }
