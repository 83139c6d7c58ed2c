#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "siws/assumptions.hpp"
#include "siws/dynamics.hpp"

namespace siws {

enum class Verdict { certified, not_certified, inapplicable };

std::string to_string(Verdict v);

enum class WitnessKind { none, diagonal_p, lyapunov_q, identity };

/// Constants of the slow-variation certificate, as derived in the proof.
struct SlowVariationConstants {
  double alpha1 = 0.0;      // sup_k rho(M_f(k))
  double l_bound = 0.0;     // sup_k ||M_f(k)||_2
  double kappa_obs = 0.0;   // sup_k ||M_f(k+1) - M_f(k)||_2
  double sigma = 0.5;
  double mu = 0.0;          // (1 - alpha1)/2
  double p1 = 0.0;          // 1 - mu
  double m1 = 0.0;          // ((1-mu)/mu^(n+q)) (1-mu+L)^(n+q-1)
  double kappa_star = 0.0;  // ((1-p1^2)^2 / (2 m1^4 L)) (1 - sigma)
  double conservatism = 0.0;  // kappa_obs / kappa_star
};

/// Explicit evaluation of the admissible-variation budget.
SlowVariationConstants slow_variation_constants(double alpha1, double l_bound,
                                                double kappa_obs, std::size_t dim,
                                                double sigma);

struct Certificate {
  std::size_t virus = 0;  // 0-based
  std::string theorem;    // "theorem-1", "theorem-2", "theorem-3", "corollary-2"
  Verdict verdict = Verdict::inapplicable;
  std::string detail;     // why inapplicable / which gate failed

  double rho_sup = 0.0;   // rho(M_f) or sup_k rho(M_f(k))
  double margin = 0.0;    // 1 - rho_sup

  WitnessKind witness = WitnessKind::none;
  std::vector<double> p_diag;              // diagonal P witness
  double witness_lambda_max = 0.0;         // lambda_max(M^T P M - P), must be < 0
  std::optional<DenseMatrix> q_witness;    // series Q fallback
  double q_residual = 0.0;

  std::optional<SlowVariationConstants> slow;  // theorem-3 only
  AssumptionReport assumptions;

  nlohmann::json to_json() const;
};

/// Theorem 1: time-invariant per-virus eradication certificate with a
/// verified Lyapunov witness.
Certificate certify_ti(const VirusLayerParams& frame, const SystemShape& shape,
                       std::size_t r);

/// Corollary 2: DFE certificate, one Theorem-1 certificate per virus.
std::vector<Certificate> certify_dfe(const std::vector<VirusLayerParams>& frames,
                                     const SystemShape& shape);

struct ReproductionComparison {
  bool applicable = false;     // B_f irreducible (Assumption 5)
  std::string detail;
  double rho_full = 0.0;       // rho(M_f)
  double rho_individual = 0.0; // rho(M) of the n x n principal block
  bool ordering_holds = false; // rho_full > rho_individual
};

/// Proposition 1: reproduction-number ordering with vs without the
/// infrastructure network.
ReproductionComparison reproduction_comparison(const VirusLayerParams& frame,
                                               const SystemShape& shape, std::size_t r);

/// Theorem 2: homogeneous rates, symmetric interactions, time-varying.
Certificate certify_tv_homogeneous(const ParameterSchedule& schedule, std::size_t r);

/// Theorem 3: slowly varying heterogeneous spread with the explicit kappa
/// budget. sigma in (0, 1) trades certified rate against the kappa budget.
Certificate certify_tv_slow(const ParameterSchedule& schedule, std::size_t r,
                            std::size_t horizon = 1, double sigma = 0.5);

struct LyapunovAudit {
  bool pass = true;
  std::size_t steps_checked = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max over steps of V(k+1)/V(k); < 1 means decay
};

/// Evaluates the certificate's Lyapunov function along a trajectory (which
/// must carry full states) and confirms strict decrease at every nonzero
/// step. Violations are findings, not exceptions.
LyapunovAudit lyapunov_decrease_audit(const Trajectory& trajectory,
                                      const Certificate& certificate);

}  // namespace siws
