#include "siws/config_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace siws {

namespace {

double require_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("config: " + path + " must be a number");
  return j.get<double>();
}

std::vector<double> parse_vector(const nlohmann::json& j, std::size_t len,
                                 const std::string& path) {
  if (j.is_number()) return std::vector<double>(len, j.get<double>());
  if (!j.is_array() || j.size() != len)
    throw ConfigError("config: " + path + " must be an array of length " +
                      std::to_string(len));
  std::vector<double> out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i)
    out.push_back(require_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

DenseMatrix parse_matrix(const nlohmann::json& j, std::size_t rows, std::size_t cols,
                         const std::string& path) {
  DenseMatrix m(rows, cols);
  if (j.is_number()) {
    const double v = j.get<double>();
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t c = 0; c < cols; ++c) m(i, c) = v;
    return m;
  }
  if (!j.is_array() || j.size() != rows)
    throw ConfigError("config: " + path + " must be a " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " array of arrays");
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = parse_vector(j[i], cols, path + "[" + std::to_string(i) + "]");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = row[c];
  }
  return m;
}

VirusLayerParams parse_frame(const nlohmann::json& j, const SystemShape& shape,
                             bool validate, const std::string& path) {
  if (!j.is_object()) throw ConfigError("config: " + path + " must be an object");
  auto field = [&](const char* name) -> const nlohmann::json& {
    if (!j.contains(name))
      throw ConfigError("config: " + path + " missing field '" + name + "'");
    return j.at(name);
  };
  auto beta = parse_vector(field("beta"), shape.n, path + ".beta");
  auto delta = parse_vector(field("delta"), shape.n, path + ".delta");
  auto adjacency = parse_matrix(field("adjacency"), shape.n, shape.n, path + ".adjacency");
  auto beta_w = parse_matrix(field("beta_w"), shape.n, shape.q, path + ".beta_w");
  auto c_w = parse_matrix(field("c_w"), shape.q, shape.n, path + ".c_w");
  auto alpha_w = parse_matrix(field("alpha_w"), shape.q, shape.q, path + ".alpha_w");
  auto delta_w = parse_vector(field("delta_w"), shape.q, path + ".delta_w");

  double w_max;
  if (j.contains("w_max")) {
    w_max = require_number(j.at("w_max"), path + ".w_max");
  } else {
    // Minimum cap consistent with the shedding-ratio bound.
    w_max = 0.0;
    for (std::size_t r = 0; r < shape.q; ++r) {
      double shed = 0.0;
      for (std::size_t c = 0; c < shape.n; ++c) shed += c_w(r, c);
      if (delta_w[r] > 0.0) w_max = std::max(w_max, shed / delta_w[r]);
    }
    if (w_max == 0.0) w_max = 1.0;
  }

  try {
    if (validate)
      return VirusLayerParams::checked(std::move(beta), std::move(adjacency),
                                       std::move(delta), std::move(beta_w),
                                       std::move(c_w), std::move(alpha_w),
                                       std::move(delta_w), w_max);
    return VirusLayerParams::unchecked(std::move(beta), std::move(adjacency),
                                       std::move(delta), std::move(beta_w),
                                       std::move(c_w), std::move(alpha_w),
                                       std::move(delta_w), w_max);
  } catch (const ModelError& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
}

}  // namespace

ParameterSchedule parse_system(const nlohmann::json& doc, bool validate) {
  if (!doc.is_object()) throw ConfigError("config: document must be an object");
  if (!doc.contains("shape")) throw ConfigError("config: missing 'shape'");
  const auto& js = doc.at("shape");
  SystemShape shape;
  shape.n = static_cast<std::size_t>(require_number(js.value("n", nlohmann::json()), "shape.n"));
  shape.q = static_cast<std::size_t>(require_number(js.value("q", nlohmann::json()), "shape.q"));
  shape.m = static_cast<std::size_t>(require_number(js.value("m", nlohmann::json()), "shape.m"));
  shape.h = require_number(js.value("h", nlohmann::json()), "shape.h");
  try {
    shape.validate();
  } catch (const ModelError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (!doc.contains("viruses") || !doc.at("viruses").is_array() ||
      doc.at("viruses").size() != shape.m)
    throw ConfigError("config: 'viruses' must be an array of length m");

  std::string kind;
  std::vector<std::vector<VirusLayerParams>> frames_per_virus(shape.m);
  std::vector<std::size_t> keys;
  for (std::size_t r = 0; r < shape.m; ++r) {
    const auto& jv = doc.at("viruses")[r];
    const std::string vpath = "viruses[" + std::to_string(r) + "]";
    const std::string vkind = jv.value("schedule", "constant");
    if (r == 0)
      kind = vkind;
    else if (vkind != kind)
      throw ConfigError("config: all viruses must use the same schedule kind");
    if (!jv.contains("frames") || !jv.at("frames").is_array() || jv.at("frames").empty())
      throw ConfigError("config: " + vpath + ".frames must be a nonempty array");
    const auto& jf = jv.at("frames");
    for (std::size_t f = 0; f < jf.size(); ++f)
      frames_per_virus[r].push_back(parse_frame(
          jf[f], shape, validate, vpath + ".frames[" + std::to_string(f) + "]"));
    if (kind == "explicit") {
      if (!jv.contains("keys") || jv.at("keys").size() != jf.size())
        throw ConfigError("config: " + vpath + ".keys must match frames length");
      std::vector<std::size_t> vkeys;
      for (const auto& k : jv.at("keys"))
        vkeys.push_back(static_cast<std::size_t>(require_number(k, vpath + ".keys")));
      if (r == 0)
        keys = vkeys;
      else if (vkeys != keys)
        throw ConfigError("config: all viruses must share the same explicit keys");
    }
  }
  const std::size_t count = frames_per_virus[0].size();
  for (const auto& fr : frames_per_virus)
    if (fr.size() != count)
      throw ConfigError("config: all viruses must have the same frame count");

  auto slot = [&](std::size_t s) {
    std::vector<VirusLayerParams> out;
    out.reserve(shape.m);
    for (std::size_t r = 0; r < shape.m; ++r) out.push_back(frames_per_virus[r][s]);
    return out;
  };

  try {
    if (kind == "constant") {
      if (count != 1) throw ConfigError("config: constant schedule needs exactly 1 frame");
      return ParameterSchedule::constant(shape, slot(0));
    }
    if (kind == "periodic") {
      std::vector<std::vector<VirusLayerParams>> slots;
      for (std::size_t s = 0; s < count; ++s) slots.push_back(slot(s));
      return ParameterSchedule::periodic(shape, std::move(slots));
    }
    if (kind == "explicit") {
      std::map<std::size_t, std::vector<VirusLayerParams>> table;
      for (std::size_t s = 0; s < count; ++s) table[keys[s]] = slot(s);
      if (table.size() != count)
        throw ConfigError("config: explicit keys must be distinct");
      return ParameterSchedule::explicit_table(shape, std::move(table));
    }
  } catch (const ModelError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("config: unknown schedule kind '" + kind + "'");
}

ParameterSchedule load_system_file(const std::string& path, bool validate) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: parse failure in '" + path + "': " + e.what());
  }
  // Experiment spec files embed the system under "system".
  if (doc.contains("system")) return parse_system(doc.at("system"), validate);
  return parse_system(doc, validate);
}

namespace {

nlohmann::json matrix_json(const DenseMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json frame_json(const VirusLayerParams& p) {
  return {{"beta", p.beta()},       {"delta", p.delta()},
          {"adjacency", matrix_json(p.adjacency())},
          {"beta_w", matrix_json(p.beta_w())},
          {"c_w", matrix_json(p.c_w())},
          {"alpha_w", matrix_json(p.alpha_w())},
          {"delta_w", p.delta_w()}, {"w_max", p.w_max()}};
}

}  // namespace

nlohmann::json system_to_json(const ParameterSchedule& schedule) {
  const SystemShape& shape = schedule.shape();
  nlohmann::json doc;
  doc["shape"] = {{"n", shape.n}, {"q", shape.q}, {"m", shape.m}, {"h", shape.h}};
  const char* kind = schedule.kind() == ScheduleKind::constant    ? "constant"
                     : schedule.kind() == ScheduleKind::periodic ? "periodic"
                                                                 : "explicit";
  doc["viruses"] = nlohmann::json::array();
  const auto distinct = schedule.distinct_frames();
  for (std::size_t r = 0; r < shape.m; ++r) {
    nlohmann::json jv;
    jv["schedule"] = kind;
    jv["frames"] = nlohmann::json::array();
    nlohmann::json keys = nlohmann::json::array();
    for (const auto& [k, frames] : distinct) {
      jv["frames"].push_back(frame_json((*frames)[r]));
      keys.push_back(k);
    }
    if (schedule.kind() == ScheduleKind::explicit_table) jv["keys"] = keys;
    doc["viruses"].push_back(jv);
  }
  return doc;
}

}  // namespace siws
