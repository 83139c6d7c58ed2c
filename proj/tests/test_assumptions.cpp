#include <algorithm>
#include <string>

#include "doctest.h"
#include "siws/assumptions.hpp"
#include "support/random_systems.hpp"

using siws::DenseMatrix;
using siws::LayeredState;
using siws::ParameterSchedule;
using siws::SystemShape;
using siws::VirusLayerParams;

namespace {

bool has_failure(const siws::AssumptionReport& report, const std::string& needle) {
  return std::any_of(report.checks.begin(), report.checks.end(),
                     [&](const siws::CheckResult& c) {
                       return !c.pass && c.name.find(needle) != std::string::npos;
                     });
}

VirusLayerParams layer_with(double delta, double delta_w, double w_max,
                            double c_entry = 0.6) {
  DenseMatrix adj(1, 1), bw(1, 1), cw(1, 1);
  adj(0, 0) = 1.0;
  bw(0, 0) = 0.4;
  cw(0, 0) = c_entry;
  return VirusLayerParams::unchecked({0.2}, adj, {delta}, bw, cw, DenseMatrix(1, 1),
                                     {delta_w}, w_max);
}

}  // namespace

TEST_SUITE_BEGIN("assumptions");

TEST_CASE("initial-state checks") {
  const SystemShape shape{2, 1, 2, 0.1};
  const std::vector<VirusLayerParams> frames = {
      VirusLayerParams::unchecked({0.1, 0.1}, DenseMatrix(2, 2), {1.0, 1.0},
                                  DenseMatrix(2, 1), DenseMatrix(1, 2),
                                  DenseMatrix(1, 1), {1.0}, 2.0),
      VirusLayerParams::unchecked({0.1, 0.1}, DenseMatrix(2, 2), {1.0, 1.0},
                                  DenseMatrix(2, 1), DenseMatrix(1, 2),
                                  DenseMatrix(1, 1), {1.0}, 2.0)};

  SUBCASE("all zeros pass") {
    CHECK(siws::check_initial(LayeredState::zero(shape), frames).all_pass());
  }
  SUBCASE("cross-virus sum above one fails with the offending value") {
    LayeredState s = LayeredState::zero(shape);
    s.x[0][1] = 0.6;
    s.x[1][1] = 0.5;
    const auto report = siws::check_initial(s, frames);
    CHECK(!report.all_pass());
    CHECK(has_failure(report, "Assumption 1"));
    bool found = false;
    for (const auto& c : report.checks) {
      for (const auto& off : c.offenders) {
        if (std::abs(off.value - 1.1) < 1e-12) found = true;
      }
    }
    CHECK(found);
  }
  SUBCASE("contamination above w_max fails") {
    LayeredState s = LayeredState::zero(shape);
    s.w[1][0] = 2.5;
    CHECK(has_failure(siws::check_initial(s, frames), "Assumption 3"));
  }
}

TEST_CASE("rate checks") {
  CHECK(siws::check_rates(layer_with(1.0, 1.0, 1.0)).all_pass());
  CHECK(has_failure(siws::check_rates(layer_with(0.0, 1.0, 1.0)), "Assumption 2"));
  CHECK(has_failure(siws::check_rates(layer_with(1.0, 0.0, 1.0)), "Assumption 2"));
  CHECK(has_failure(siws::check_rates(layer_with(1.0, 1.0, 1.0, 0.0)),
                    "Assumption 2"));  // empty shedding column
}

TEST_CASE("shedding ratio checks") {
  // Ratio exactly at the boundary passes (closed interval).
  CHECK(siws::check_shedding_ratio(layer_with(1.0, 2.0, 0.3)).all_pass());
  CHECK(has_failure(siws::check_shedding_ratio(layer_with(1.0, 2.0, 0.2)),
                    "Assumption 3"));
}

TEST_CASE("step budget checks") {
  SUBCASE("h * delta above one fails") {
    const SystemShape shape{1, 1, 1, 1.0};
    const auto schedule =
        ParameterSchedule::constant(shape, {layer_with(2.0, 1.0, 1.0)});
    CHECK(has_failure(siws::check_step_budget(schedule), "Assumption 4"));
  }
  SUBCASE("boundary h * sum = 1 passes") {
    // beta*a = 0.2, beta_w*w_max = 0.4; with delta = 1, h = 1 the individual
    // budget is exactly 1 and h*delta is exactly 1.
    const SystemShape shape{1, 1, 1, 1.0};
    DenseMatrix adj(1, 1), bw(1, 1), cw(1, 1);
    adj(0, 0) = 1.0;
    bw(0, 0) = 0.4;
    cw(0, 0) = 0.6;
    const auto p = VirusLayerParams::checked({0.6}, adj, {1.0}, bw, cw,
                                             DenseMatrix(1, 1), {1.0}, 1.0);
    const auto schedule = ParameterSchedule::constant(shape, {p});
    CHECK(siws::check_step_budget(schedule).all_pass());
  }
  SUBCASE("random generated systems pass by construction") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto rs = testgen::random_system(seed, 3, 2, 2);
      const auto schedule = ParameterSchedule::constant(rs.shape, rs.frames);
      CHECK(siws::check_step_budget(schedule).all_pass());
    }
  }
}

TEST_CASE("combined gate agrees with invariance in dynamics") {
  for (std::uint64_t seed = 40; seed < 50; ++seed) {
    const auto rs = testgen::random_system(seed, 3, 2, 2);
    const auto schedule = ParameterSchedule::constant(rs.shape, rs.frames);
    const auto initial = testgen::interior_state(rs, seed);
    const auto report = siws::check_all(schedule, initial);
    REQUIRE(report.all_pass());
    // A passing gate means the rollout never aborts.
    CHECK_NOTHROW(siws::rollout(schedule, initial, {.horizon = 300}));
  }
}

TEST_CASE("report serialization carries verdicts and offenders") {
  const auto report = siws::check_rates(layer_with(0.0, 1.0, 1.0));
  const auto js = report.to_json();
  REQUIRE(js.contains("checks"));
  bool saw_fail = false;
  for (const auto& c : js["checks"]) {
    REQUIRE(c.contains("name"));
    REQUIRE(c.contains("pass"));
    if (!c["pass"].get<bool>()) saw_fail = true;
  }
  CHECK(saw_fail);
  CHECK(js["all_pass"].get<bool>() == false);
}

TEST_SUITE_END();
