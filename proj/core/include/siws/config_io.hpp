#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "siws/graph_model.hpp"

namespace siws {

/// Thrown on malformed configuration documents; the message carries the
/// offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a system configuration document:
///   { "shape": {"n","q","m","h"},
///     "viruses": [ { "schedule": "constant"|"periodic"|"explicit",
///                    "frames": [ {beta, delta, adjacency, beta_w, c_w,
///                                 alpha_w, delta_w, w_max?} ... ],
///                    "keys": [k...]  (explicit only) } ... ] }
/// Matrices are row-major arrays of arrays of decimals. A missing w_max is
/// derived as max_j sum_l c_w(j,l) / delta_w(j).
/// All viruses must agree on schedule kind and frame count.
ParameterSchedule parse_system(const nlohmann::json& doc, bool validate = true);

ParameterSchedule load_system_file(const std::string& path, bool validate = true);

nlohmann::json system_to_json(const ParameterSchedule& schedule);

}  // namespace siws
