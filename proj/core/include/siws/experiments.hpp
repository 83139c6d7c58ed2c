#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "siws/stability.hpp"

namespace siws {

/// Deterministic 64-bit generator (splitmix64). Hand-rolled so that seeded
/// draws are bit-identical across platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform draw in [lo, hi] with 53-bit resolution.
  double uniform(double lo, double hi);

 private:
  std::uint64_t state_;
};

/// Per-virus uniform ranges for the initial state.
struct InitialRanges {
  struct Range {
    double lo = 0.0;
    double hi = 0.0;
  };
  std::vector<Range> x;  // one per virus
  std::vector<Range> w;  // one per virus
};

/// Uniform per-coordinate draws; any individual whose cross-virus sum exceeds
/// 1 is resampled. Errors out when the ranges cannot satisfy Assumption 1.
LayeredState sample_initial(const InitialRanges& ranges, const SystemShape& shape,
                            std::uint64_t seed);

struct ExperimentSpec {
  std::string name = "custom";
  ParameterSchedule schedule;
  InitialRanges ranges;
  std::uint64_t seed = 1;
  std::size_t horizon = 2'000'000;       // hard cap
  double stop_below_fraction = 1e-6;     // adaptive stop threshold
  std::size_t stride = 1;                // CSV row stride
  bool per_node = false;                 // include full per-node state columns
  double sigma = 0.5;                    // theorem-3 sigma
};

/// Parses an experiment spec document: {"name", "system": {...}, "initial":
/// {"x": [[lo,hi]...], "w": [[lo,hi]...]}, "seed", "horizon", "stride",
/// "stop_threshold", "sigma"}.
ExperimentSpec parse_experiment(const nlohmann::json& doc);
ExperimentSpec load_experiment_file(const std::string& path);

struct ExperimentBundle {
  AssumptionReport report;
  std::vector<Certificate> certificates;
  Trajectory trajectory;
  bool ran = false;               // false when the assumption gate failed
  LayeredState initial;
  nlohmann::json summary;
};

/// End-to-end: assumption gate, certification (auto-selected by schedule
/// kind and structure), rollout with adaptive stop, summary metrics.
ExperimentBundle run_experiment(const ExperimentSpec& spec);

/// Auto-selects the strongest applicable certificate per virus: Theorem 1
/// for constant schedules; Theorem 2 when the structural conditions hold;
/// Theorem 3 otherwise.
std::vector<Certificate> certify_auto(const ParameterSchedule& schedule, double sigma);

/// CSV contract: header `k,virus,xbar,wbar[,x_1..x_n,w_1..w_q]`, 12
/// significant digits, one row per recorded instant per virus.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const SystemShape& shape, std::size_t stride,
                          bool per_node);

/// Least-squares fit of log ||z^r(k)|| over the tail half of a trajectory;
/// returns the per-step decay factor gamma.
double fitted_decay_factor(const Trajectory& trajectory, std::size_t r);

}  // namespace siws
