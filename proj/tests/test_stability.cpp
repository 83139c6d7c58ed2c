#include <cmath>

#include "doctest.h"
#include "siws/stability.hpp"
#include "support/oracles.hpp"
#include "support/random_systems.hpp"

using siws::Certificate;
using siws::DenseMatrix;
using siws::LayeredState;
using siws::ParameterSchedule;
using siws::SystemShape;
using siws::Verdict;
using siws::VirusLayerParams;

namespace {

const SystemShape kTinyShape{1, 1, 1, 0.5};

VirusLayerParams tiny_params(double beta = 0.2) {
  DenseMatrix adj(1, 1), bw(1, 1), cw(1, 1);
  adj(0, 0) = 1.0;
  bw(0, 0) = 0.4;
  cw(0, 0) = 0.6;
  return VirusLayerParams::checked({beta}, adj, {1.0}, bw, cw, DenseMatrix(1, 1),
                                   {1.0}, 1.0);
}

// Homogeneous rates, symmetric contacts, B_w = C_w^T: satisfies the
// structural conditions of the homogeneous time-varying certificate.
VirusLayerParams homogeneous_layer(double beta) {
  DenseMatrix adj(2, 2);
  adj(0, 1) = adj(1, 0) = 1.0;
  DenseMatrix bw(2, 1);
  bw(0, 0) = bw(1, 0) = 0.3;
  return VirusLayerParams::checked({beta, beta}, adj, {1.0, 1.0}, bw,
                                   bw.transpose(), DenseMatrix(1, 1), {1.0}, 1.0);
}

const SystemShape kHomShape{2, 1, 1, 0.5};

// lambda_max(M^T P M - P) for a diagonal witness, via the charpoly oracle.
double witness_lambda_oracle(const DenseMatrix& m, const std::vector<double>& p) {
  const DenseMatrix pm = DenseMatrix::diagonal(p);
  return oracles::sym_lambda_max(m.transpose() * pm * m - pm);
}

}  // namespace

TEST_SUITE_BEGIN("stability");

TEST_CASE("time-invariant certificate on the 1x1 reference system") {
  const auto cert = siws::certify_ti(tiny_params(), kTinyShape, 0);
  CHECK(cert.verdict == Verdict::certified);
  CHECK(cert.theorem == "theorem-1");
  CHECK(cert.rho_sup == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(cert.margin == doctest::Approx(0.2).epsilon(1e-8));
  REQUIRE(cert.witness == siws::WitnessKind::diagonal_p);
  REQUIRE(cert.p_diag.size() == 2);
  for (double p : cert.p_diag) CHECK(p > 0.0);
  CHECK(cert.witness_lambda_max < 0.0);
  const auto sys = siws::assemble(tiny_params(), kTinyShape);
  CHECK(witness_lambda_oracle(sys.m_f, cert.p_diag) < 0.0);
}

TEST_CASE("degenerate certificate: no couplings, h*delta = 1, q = 0") {
  const SystemShape shape{1, 0, 1, 1.0};
  const auto p = VirusLayerParams::checked({0.0}, DenseMatrix(1, 1), {1.0},
                                           DenseMatrix(1, 0), DenseMatrix(0, 1),
                                           DenseMatrix(0, 0), {}, 0.0);
  const auto cert = siws::certify_ti(p, shape, 0);
  CHECK(cert.verdict == Verdict::certified);
  CHECK(cert.rho_sup == doctest::Approx(0.0));
  CHECK(cert.margin == doctest::Approx(1.0));
}

TEST_CASE("supercritical systems are not certified") {
  const auto rs = testgen::must_system_at_rho(11, 3, 2, 1.1);
  const auto cert = siws::certify_ti(rs.frames[0], rs.shape, 0);
  CHECK(cert.verdict == Verdict::not_certified);
  CHECK(cert.rho_sup > 1.0);
  CHECK(cert.margin < 0.0);
}

TEST_CASE("invalid frames are inapplicable with a report") {
  DenseMatrix adj(1, 1), bw(1, 1), cw(1, 1);
  adj(0, 0) = 1.0;
  bw(0, 0) = 0.4;
  cw(0, 0) = 0.6;
  const auto bad = VirusLayerParams::unchecked({0.2}, adj, {0.0}, bw, cw,
                                               DenseMatrix(1, 1), {1.0}, 1.0);
  const auto cert = siws::certify_ti(bad, kTinyShape, 0);
  CHECK(cert.verdict == Verdict::inapplicable);
  CHECK(!cert.assumptions.all_pass());
}

TEST_CASE("diagonal witnesses re-verify on random certified systems") {
  int witnessed = 0;
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    const auto rs = testgen::system_at_rho(seed, 2, 2, 0.95);
    if (!rs) continue;
    const auto cert = siws::certify_ti(rs->frames[0], rs->shape, 0);
    REQUIRE(cert.verdict == Verdict::certified);
    if (cert.witness == siws::WitnessKind::diagonal_p) {
      const auto sys = siws::assemble(rs->frames[0], rs->shape);
      CHECK(witness_lambda_oracle(sys.m_f, cert.p_diag) < 0.0);
      ++witnessed;
    } else {
      CHECK(cert.witness == siws::WitnessKind::lyapunov_q);
      REQUIRE(cert.q_witness.has_value());
      CHECK(cert.q_residual <= 1e-8);
    }
  }
  CHECK(witnessed > 0);
}

TEST_CASE("DFE certificate is the conjunction over viruses") {
  SUBCASE("both subcritical") {
    const auto certs =
        siws::certify_dfe({tiny_params(0.2), tiny_params(0.3)}, {1, 1, 2, 0.5});
    REQUIRE(certs.size() == 2);
    CHECK(certs[0].verdict == Verdict::certified);
    CHECK(certs[1].verdict == Verdict::certified);
  }
  SUBCASE("one supercritical virus breaks the conjunction") {
    // Pair a hot layer with a cooled copy of itself; pick the first seed that
    // can be tuned to both targets.
    std::optional<testgen::RandomSystem> hot, cool;
    for (std::uint64_t seed = 21; seed < 500 && !(hot && cool); ++seed) {
      hot = testgen::system_at_rho(seed, 2, 1, 1.1);
      cool = testgen::system_at_rho(seed, 2, 1, 0.9);
    }
    REQUIRE((hot && cool));
    // Halving h keeps both step budgets valid for the combined system and
    // preserves which side of one each layer's spectral radius falls on.
    const SystemShape shape{2, 1, 2, hot->shape.h / 2.0};
    const auto certs = siws::certify_dfe({cool->frames[0], hot->frames[0]}, shape);
    CHECK(certs[0].verdict == Verdict::certified);
    CHECK(certs[1].verdict == Verdict::not_certified);
  }
}

TEST_CASE("reproduction-number ordering") {
  SUBCASE("1x1 reference: 0.6 without vs 0.8 with the resource layer") {
    const auto cmp = siws::reproduction_comparison(tiny_params(), kTinyShape, 0);
    REQUIRE(cmp.applicable);
    CHECK(cmp.rho_individual == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(cmp.rho_full == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(cmp.ordering_holds);
  }
  SUBCASE("no resource-to-individual edges make B_f reducible: inapplicable") {
    DenseMatrix adj(1, 1), bw(1, 1), cw(1, 1);
    adj(0, 0) = 1.0;
    cw(0, 0) = 0.6;  // beta_w stays zero
    const auto p = VirusLayerParams::checked({0.2}, adj, {1.0}, bw, cw,
                                             DenseMatrix(1, 1), {1.0}, 1.0);
    const auto cmp = siws::reproduction_comparison(p, kTinyShape, 0);
    CHECK(!cmp.applicable);
  }
  SUBCASE("random irreducible systems always satisfy the strict ordering") {
    for (std::uint64_t seed = 500; seed < 520; ++seed) {
      const auto rs = testgen::random_system(seed, 3, 2, 1);
      const auto cmp = siws::reproduction_comparison(rs.frames[0], rs.shape, 0);
      REQUIRE(cmp.applicable);
      CHECK(cmp.ordering_holds);
      CHECK(cmp.rho_full > cmp.rho_individual);
    }
  }
}

TEST_CASE("homogeneous time-varying certificate") {
  SUBCASE("periodic homogeneous symmetric schedule certifies") {
    const auto s = ParameterSchedule::periodic(
        kHomShape, {{homogeneous_layer(0.2)}, {homogeneous_layer(0.4)}});
    const auto cert = siws::certify_tv_homogeneous(s, 0);
    CHECK(cert.theorem == "theorem-2");
    CHECK(cert.verdict == Verdict::certified);
    CHECK(cert.rho_sup < 1.0);
    CHECK(cert.witness == siws::WitnessKind::identity);
  }
  SUBCASE("heterogeneous healing rates are structurally inapplicable") {
    DenseMatrix adj(2, 2);
    adj(0, 1) = adj(1, 0) = 1.0;
    DenseMatrix bw(2, 1);
    bw(0, 0) = bw(1, 0) = 0.3;
    const auto het = VirusLayerParams::checked({0.2, 0.2}, adj, {1.0, 1.5}, bw,
                                               bw.transpose(), DenseMatrix(1, 1),
                                               {1.0}, 1.0);
    const auto s = ParameterSchedule::constant(kHomShape, {het});
    const auto cert = siws::certify_tv_homogeneous(s, 0);
    CHECK(cert.verdict == Verdict::inapplicable);
  }
  SUBCASE("constant schedules agree in verdict with the time-invariant path") {
    const auto s = ParameterSchedule::constant(kHomShape, {homogeneous_layer(0.3)});
    const auto tv = siws::certify_tv_homogeneous(s, 0);
    const auto ti = siws::certify_ti(homogeneous_layer(0.3), kHomShape, 0);
    CHECK(tv.verdict == ti.verdict);
    CHECK(tv.rho_sup == doctest::Approx(ti.rho_sup).epsilon(1e-9));
  }
}

TEST_CASE("slow-variation constants") {
  SUBCASE("hand-evaluated reference point") {
    const auto c = siws::slow_variation_constants(0.5, 1.0, 0.0, 2, 0.5);
    CHECK(c.mu == doctest::Approx(0.25));
    CHECK(c.p1 == doctest::Approx(0.75));
    CHECK(c.m1 == doctest::Approx(21.0).epsilon(1e-12));
    CHECK(c.kappa_star ==
          doctest::Approx(0.4375 * 0.4375 / (2.0 * 21.0 * 21.0 * 21.0 * 21.0) * 0.5)
              .epsilon(1e-12));
  }
  SUBCASE("monotone in dimension, norm bound, and margin") {
    const double base = siws::slow_variation_constants(0.5, 1.0, 0.0, 4, 0.5).kappa_star;
    CHECK(siws::slow_variation_constants(0.5, 1.0, 0.0, 6, 0.5).kappa_star < base);
    CHECK(siws::slow_variation_constants(0.5, 2.0, 0.0, 4, 0.5).kappa_star < base);
    CHECK(siws::slow_variation_constants(0.3, 1.0, 0.0, 4, 0.5).kappa_star > base);
  }
}

TEST_CASE("slow-variation certificate") {
  SUBCASE("constant schedule has zero variation and certifies") {
    const auto s = ParameterSchedule::constant(kTinyShape, {tiny_params()});
    const auto cert = siws::certify_tv_slow(s, 0);
    CHECK(cert.theorem == "theorem-3");
    CHECK(cert.verdict == Verdict::certified);
    REQUIRE(cert.slow.has_value());
    CHECK(cert.slow->kappa_obs == doctest::Approx(0.0));
    CHECK(cert.slow->kappa_star > 0.0);
  }
  SUBCASE("tiny parameter variation stays inside the budget") {
    const auto s = ParameterSchedule::periodic(
        kTinyShape, {{tiny_params(0.2)}, {tiny_params(0.2 + 1e-12)}});
    const auto cert = siws::certify_tv_slow(s, 0);
    REQUIRE(cert.slow.has_value());
    CHECK(cert.slow->kappa_obs > 0.0);
    CHECK(cert.verdict == Verdict::certified);
  }
  SUBCASE("visible variation blows the conservative budget") {
    const auto s = ParameterSchedule::periodic(
        kTinyShape, {{tiny_params(0.1)}, {tiny_params(0.5)}});
    const auto cert = siws::certify_tv_slow(s, 0);
    CHECK(cert.verdict == Verdict::not_certified);
    REQUIRE(cert.slow.has_value());
    CHECK(cert.slow->kappa_obs > cert.slow->kappa_star);
    CHECK(cert.slow->conservatism > 1.0);
  }
  SUBCASE("sup rho at or above one is never certified") {
    const auto rs = testgen::must_system_at_rho(33, 2, 1, 1.05);
    const auto s = ParameterSchedule::constant(rs.shape, rs.frames);
    CHECK(siws::certify_tv_slow(s, 0).verdict == Verdict::not_certified);
  }
}

TEST_CASE("certificate serialization") {
  const auto cert = siws::certify_ti(tiny_params(), kTinyShape, 0);
  const auto js = cert.to_json();
  CHECK(js["verdict"].get<std::string>() == "certified");
  CHECK(js["theorem"].get<std::string>() == "theorem-1");
  CHECK(js["rho_sup"].get<double>() == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("Lyapunov decrease audit") {
  const auto schedule = ParameterSchedule::constant(kTinyShape, {tiny_params()});
  auto cert = siws::certify_ti(tiny_params(), kTinyShape, 0);
  REQUIRE(cert.verdict == Verdict::certified);

  SUBCASE("zero trajectory passes vacuously") {
    const auto traj = siws::rollout(schedule, LayeredState::zero(kTinyShape),
                                    {.horizon = 5, .keep_states = true});
    const auto audit = siws::lyapunov_decrease_audit(traj, cert);
    CHECK(audit.pass);
    CHECK(audit.violations == 0);
  }
  SUBCASE("certified system decreases strictly from (0.5, 0.5)") {
    LayeredState s0 = LayeredState::zero(kTinyShape);
    s0.x[0][0] = 0.5;
    s0.w[0][0] = 0.5;
    const auto traj = siws::rollout(schedule, s0, {.horizon = 50, .keep_states = true});
    const auto audit = siws::lyapunov_decrease_audit(traj, cert);
    CHECK(audit.pass);
    CHECK(audit.steps_checked > 0);
    CHECK(audit.worst_ratio < 1.0);
  }
  SUBCASE("corrupted witness is flagged") {
    LayeredState s0 = LayeredState::zero(kTinyShape);
    s0.x[0][0] = 0.5;
    s0.w[0][0] = 0.5;
    const auto traj = siws::rollout(schedule, s0, {.horizon = 50, .keep_states = true});
    Certificate broken = cert;
    REQUIRE(broken.witness == siws::WitnessKind::diagonal_p);
    broken.p_diag[0] = -broken.p_diag[0];
    const auto audit = siws::lyapunov_decrease_audit(traj, broken);
    CHECK(!audit.pass);
    CHECK(audit.violations > 0);
  }
}

TEST_SUITE_END();
