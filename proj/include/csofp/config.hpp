#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "csofp/cso.hpp"

namespace csofp {

struct TermConfig {
  Complex a;
  Complex s;
  Complex fix;

  bool operator==(const TermConfig&) const = default;
};

/// JSON operator description:
///   {"terms": [{"a": [re, im], "s": [re, im], "fix": [re, im]}, ...],
///    "radius": R, "mu": 0.999, "truncation": 128}
struct OperatorConfig {
  std::vector<TermConfig> terms;
  double radius = 0.0;
  double mu = 0.999;
  std::size_t truncation = kDefaultOrder;

  bool operator==(const OperatorConfig&) const = default;
};

/// Parses and validates; errors name the offending field, e.g. "terms[1].a".
OperatorConfig parse_config(std::string_view text);

OperatorConfig load_config(const std::string& path);

/// Pretty-printed JSON that parses back to an equal config.
std::string serialize_config(const OperatorConfig& config);

AffineCso to_operator(const OperatorConfig& config);

/// Config describing T on the given disc; constant maps become s = 0 terms.
OperatorConfig from_operator(const AffineCso& T, double radius, double mu = 0.999,
                             std::size_t truncation = kDefaultOrder);

}  // namespace csofp
