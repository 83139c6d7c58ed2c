#include "siws/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "siws/config_io.hpp"

namespace siws {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform(double lo, double hi) {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

LayeredState sample_initial(const InitialRanges& ranges, const SystemShape& shape,
                            std::uint64_t seed) {
  if (ranges.x.size() != shape.m || ranges.w.size() != shape.m)
    throw ModelError("sample_initial: one range per virus required");
  double min_sum = 0.0;
  for (const auto& r : ranges.x) {
    if (r.lo < 0.0 || r.hi < r.lo || r.hi > 1.0)
      throw ModelError("sample_initial: x ranges must satisfy 0 <= lo <= hi <= 1");
    min_sum += r.lo;
  }
  if (min_sum > 1.0)
    throw ModelError("sample_initial: infeasible ranges, minimum cross-virus sum exceeds 1");
  for (const auto& r : ranges.w)
    if (r.lo < 0.0 || r.hi < r.lo)
      throw ModelError("sample_initial: w ranges must satisfy 0 <= lo <= hi");

  SplitMix64 rng(seed);
  LayeredState s = LayeredState::zero(shape);
  for (std::size_t i = 0; i < shape.n; ++i) {
    for (;;) {
      double total = 0.0;
      for (std::size_t r = 0; r < shape.m; ++r) {
        s.x[r][i] = rng.uniform(ranges.x[r].lo, ranges.x[r].hi);
        total += s.x[r][i];
      }
      if (total <= 1.0) break;
    }
  }
  for (std::size_t r = 0; r < shape.m; ++r)
    for (std::size_t j = 0; j < shape.q; ++j)
      s.w[r][j] = rng.uniform(ranges.w[r].lo, ranges.w[r].hi);
  return s;
}

ExperimentSpec parse_experiment(const nlohmann::json& doc) {
  ExperimentSpec spec;
  spec.name = doc.value("name", "custom");
  if (!doc.contains("system")) throw ConfigError("experiment: missing 'system'");
  spec.schedule = parse_system(doc.at("system"));
  const SystemShape& shape = spec.schedule.shape();

  auto parse_ranges = [&](const nlohmann::json& j,
                          const std::string& path) -> std::vector<InitialRanges::Range> {
    if (!j.is_array() || j.size() != shape.m)
      throw ConfigError("experiment: " + path + " must list one [lo, hi] per virus");
    std::vector<InitialRanges::Range> out;
    for (const auto& pair : j) {
      if (!pair.is_array() || pair.size() != 2)
        throw ConfigError("experiment: " + path + " entries must be [lo, hi]");
      out.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return out;
  };
  if (doc.contains("initial")) {
    spec.ranges.x = parse_ranges(doc.at("initial").value("x", nlohmann::json::array()), "initial.x");
    spec.ranges.w = parse_ranges(doc.at("initial").value("w", nlohmann::json::array()), "initial.w");
  } else {
    spec.ranges.x.assign(shape.m, {0.0, 0.0});
    spec.ranges.w.assign(shape.m, {0.0, 0.0});
  }
  spec.seed = doc.value("seed", 1ULL);
  spec.horizon = doc.value("horizon", spec.horizon);
  spec.stop_below_fraction = doc.value("stop_threshold", spec.stop_below_fraction);
  spec.stride = doc.value("stride", spec.stride);
  spec.per_node = doc.value("per_node", spec.per_node);
  spec.sigma = doc.value("sigma", spec.sigma);
  return spec;
}

ExperimentSpec load_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("experiment: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("experiment: parse failure in '" + path + "': " + e.what());
  }
  return parse_experiment(doc);
}

std::vector<Certificate> certify_auto(const ParameterSchedule& schedule, double sigma) {
  std::vector<Certificate> out;
  for (std::size_t r = 0; r < schedule.shape().m; ++r) {
    if (schedule.kind() == ScheduleKind::constant) {
      out.push_back(certify_ti(schedule.frame_at(0, r), schedule.shape(), r));
      continue;
    }
    Certificate homogeneous = certify_tv_homogeneous(schedule, r);
    if (homogeneous.verdict != Verdict::inapplicable ||
        homogeneous.detail == "assumption gate failed") {
      out.push_back(std::move(homogeneous));
      continue;
    }
    out.push_back(certify_tv_slow(schedule, r, 1, sigma));
  }
  return out;
}

double fitted_decay_factor(const Trajectory& trajectory, std::size_t r) {
  // Regress log magnitude on k over the tail half; decay factor is exp(slope).
  std::vector<double> mags;
  if (!trajectory.states.empty()) {
    for (const auto& s : trajectory.states) {
      double acc = 0.0;
      for (double v : s.z(r)) acc += v * v;
      mags.push_back(std::sqrt(acc));
    }
  } else {
    for (std::size_t k = 0; k < trajectory.xbar[r].size(); ++k)
      mags.push_back(trajectory.xbar[r][k] + trajectory.wbar[r][k]);
  }
  const std::size_t start = mags.size() / 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t k = start; k < mags.size(); ++k) {
    if (mags[k] <= 0.0) continue;
    const double x = static_cast<double>(k);
    const double y = std::log(mags[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return 0.0;  // identically zero tail decays trivially
  const double denom = static_cast<double>(count) * sxx - sx * sx;
  if (denom == 0.0) return 1.0;
  const double slope = (static_cast<double>(count) * sxy - sx * sy) / denom;
  return std::exp(slope);
}

ExperimentBundle run_experiment(const ExperimentSpec& spec) {
  ExperimentBundle bundle;
  const SystemShape& shape = spec.schedule.shape();
  bundle.initial = sample_initial(spec.ranges, shape, spec.seed);
  bundle.report = check_all(spec.schedule, bundle.initial);
  if (!bundle.report.all_pass()) {
    bundle.summary = {{"name", spec.name},
                      {"seed", spec.seed},
                      {"ran", false},
                      {"assumptions", bundle.report.to_json()}};
    return bundle;
  }
  bundle.certificates = certify_auto(spec.schedule, spec.sigma);

  RolloutOptions options;
  options.horizon = spec.horizon;
  options.keep_states = spec.per_node;
  options.stop_below_fraction = spec.stop_below_fraction;
  bundle.trajectory = rollout(spec.schedule, bundle.initial, options);
  bundle.ran = true;

  nlohmann::json per_virus = nlohmann::json::array();
  for (std::size_t r = 0; r < shape.m; ++r) {
    const auto& xb = bundle.trajectory.xbar[r];
    const auto& wb = bundle.trajectory.wbar[r];
    nlohmann::json jv;
    jv["virus"] = r + 1;
    jv["verdict"] = to_string(bundle.certificates[r].verdict);
    jv["theorem"] = bundle.certificates[r].theorem;
    jv["rho_sup"] = bundle.certificates[r].rho_sup;
    jv["terminal_xbar"] = xb.back();
    jv["terminal_wbar"] = wb.back();
    jv["initial_xbar"] = xb.front();
    jv["initial_wbar"] = wb.front();
    if (bundle.certificates[r].verdict == Verdict::certified)
      jv["fitted_decay_factor"] = fitted_decay_factor(bundle.trajectory, r);
    per_virus.push_back(jv);
  }
  bundle.summary = {{"name", spec.name},
                    {"seed", spec.seed},
                    {"ran", true},
                    {"steps", bundle.trajectory.steps},
                    {"viruses", per_virus}};
  return bundle;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const SystemShape& shape, std::size_t stride, bool per_node) {
  if (stride == 0) stride = 1;
  out << "k,virus,xbar,wbar";
  if (per_node) {
    for (std::size_t i = 1; i <= shape.n; ++i) out << ",x_" << i;
    for (std::size_t j = 1; j <= shape.q; ++j) out << ",w_" << j;
  }
  out << "\n";
  char buf[32];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out << ',' << buf;
  };
  const std::size_t count = trajectory.xbar.empty() ? 0 : trajectory.xbar[0].size();
  for (std::size_t k = 0; k < count; k += stride) {
    for (std::size_t r = 0; r < shape.m; ++r) {
      out << k << ',' << r + 1;
      emit(trajectory.xbar[r][k]);
      emit(trajectory.wbar[r][k]);
      if (per_node && k < trajectory.states.size()) {
        for (double v : trajectory.states[k].x[r]) emit(v);
        for (double v : trajectory.states[k].w[r]) emit(v);
      }
      out << "\n";
    }
  }
}

}  // namespace siws
