#include "csofp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csofp/errors.hpp"

namespace csofp {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& message) {
  throw InvalidArgument("config: " + field + ": " + message);
}

Complex read_complex(const json& node, const std::string& field) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number())
    field_error(field, "expected [re, im]");
  const Complex z(node[0].get<double>(), node[1].get<double>());
  if (!is_finite(z)) field_error(field, "must be finite");
  return z;
}

json write_complex(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

OperatorConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("config: top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "terms" && key != "radius" && key != "mu" && key != "truncation") field_error(key, "unknown field");
  }

  OperatorConfig config;
  if (!doc.contains("terms")) field_error("terms", "missing");
  const json& terms = doc["terms"];
  if (!terms.is_array() || terms.empty()) field_error("terms", "expected a nonempty array");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string prefix = "terms[" + std::to_string(i) + "]";
    const json& t = terms[i];
    if (!t.is_object()) field_error(prefix, "expected an object");
    for (const char* key : {"a", "s", "fix"}) {
      if (!t.contains(key)) field_error(prefix + "." + key, "missing");
    }
    for (const auto& [key, value] : t.items()) {
      if (key != "a" && key != "s" && key != "fix") field_error(prefix + "." + key, "unknown field");
    }
    TermConfig term{read_complex(t["a"], prefix + ".a"), read_complex(t["s"], prefix + ".s"),
                    read_complex(t["fix"], prefix + ".fix")};
    if (term.a == Complex{}) field_error(prefix + ".a", "coefficient must be nonzero");
    if (!(std::abs(term.s) < 1.0)) field_error(prefix + ".s", "rate must satisfy |s| < 1");
    config.terms.push_back(term);
  }

  if (!doc.contains("radius")) field_error("radius", "missing");
  if (!doc["radius"].is_number()) field_error("radius", "expected a number");
  config.radius = doc["radius"].get<double>();
  if (!(config.radius > 0.0) || !std::isfinite(config.radius)) field_error("radius", "must be positive and finite");

  if (doc.contains("mu")) {
    if (!doc["mu"].is_number()) field_error("mu", "expected a number");
    config.mu = doc["mu"].get<double>();
    if (!(config.mu > 0.0 && config.mu <= 1.0)) field_error("mu", "must lie in (0, 1]");
  }
  if (doc.contains("truncation")) {
    const json& n = doc["truncation"];
    if (!n.is_number_integer() || n.get<long long>() < 1) field_error("truncation", "expected a positive integer");
    config.truncation = n.get<std::size_t>();
  }

  try {
    (void)to_operator(config);
  } catch (const Error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return config;
}

OperatorConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const OperatorConfig& config) {
  nlohmann::ordered_json doc;
  doc["terms"] = nlohmann::ordered_json::array();
  for (const TermConfig& t : config.terms) {
    nlohmann::ordered_json term;
    term["a"] = write_complex(t.a);
    term["s"] = write_complex(t.s);
    term["fix"] = write_complex(t.fix);
    doc["terms"].push_back(term);
  }
  doc["radius"] = config.radius;
  doc["mu"] = config.mu;
  doc["truncation"] = config.truncation;
  return doc.dump(2) + "\n";
}

AffineCso to_operator(const OperatorConfig& config) {
  std::vector<CsoTerm> terms;
  terms.reserve(config.terms.size());
  for (const TermConfig& t : config.terms) terms.push_back({t.a, AffineMap(t.s, t.fix)});
  return AffineCso(std::move(terms));
}

OperatorConfig from_operator(const AffineCso& T, double radius, double mu, std::size_t truncation) {
  OperatorConfig config;
  for (const CsoTerm& t : T.terms()) config.terms.push_back({t.coefficient, t.map.rate(), t.map.fixed_point()});
  config.radius = radius;
  config.mu = mu;
  config.truncation = truncation;
  return config;
}

}  // namespace csofp
