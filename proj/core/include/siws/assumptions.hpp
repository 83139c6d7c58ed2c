#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "siws/dynamics.hpp"
#include "siws/graph_model.hpp"

namespace siws {

struct Offender {
  std::string where;  // human-readable index, e.g. "individual 3" or "k=4, resource 2"
  double value = 0.0;
};

struct CheckResult {
  std::string name;   // which assumption
  bool pass = true;
  std::vector<Offender> offenders;
  double worst = 0.0;  // worst observed margin-relevant value
};

struct AssumptionReport {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  void merge(const AssumptionReport& other);
  nlohmann::json to_json() const;
};

/// Assumption 1 + the initial part of Assumption 3: per-individual cross-virus
/// sums in [0, 1] and resource levels in [0, w_max^r].
AssumptionReport check_initial(const LayeredState& state,
                               const std::vector<VirusLayerParams>& frames);

/// Assumption 2/6: strict positivity of healing and decay rates, nonnegative
/// couplings, and at least one positive shedding entry per resource.
AssumptionReport check_rates(const VirusLayerParams& frame);

/// Assumption 3/7 shedding-ratio part: per-resource total shedding over decay
/// within [0, w_max].
AssumptionReport check_shedding_ratio(const VirusLayerParams& frame);

/// Assumption 4/8: h * delta in [0, 1] for individuals and resources (with
/// the outflow correction of the compact form) and the cross-virus infection
/// row-sum budget. Only distinct frames of the schedule are enumerated.
AssumptionReport check_step_budget(const ParameterSchedule& schedule,
                                   std::size_t horizon = 1);

/// Full gate: rates + shedding ratio for every distinct frame of every virus,
/// the step budget, and the initial state.
AssumptionReport check_all(const ParameterSchedule& schedule, const LayeredState& initial);

}  // namespace siws
