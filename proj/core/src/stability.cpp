#include "siws/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace siws {

namespace {
// "certified" requires rho <= 1 - kStrictMargin so floating-point boundary
// cases cannot flap across the strict inequality of the theorems.
constexpr double kStrictMargin = 1e-9;
constexpr double kStructuralSlack = 1e-12;

AssumptionReport ti_gate(const VirusLayerParams& frame, const SystemShape& shape) {
  AssumptionReport report = check_rates(frame);
  report.merge(check_shedding_ratio(frame));
  std::vector<VirusLayerParams> frames(shape.m, frame);
  report.merge(check_step_budget(ParameterSchedule::constant(shape, frames)));
  return report;
}

nlohmann::json matrix_to_json(const DenseMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// Diagonal P candidate from left/right Perron vectors, then a numeric
// verification of lambda_max(M^T P M - P) < 0. Falls back to the series Q
// when construction or verification fails; the verdict never depends on the
// witness route, only on the spectral condition.
void attach_witness(Certificate& cert, const DenseMatrix& m_f) {
  const std::size_t dim = m_f.rows();
  try {
    DenseMatrix probe = m_f;
    const bool irreducible = scc_condensation(support_of(m_f)).size() == 1;
    if (!irreducible) {
      // Entrywise perturbation makes the support strongly connected so both
      // Perron vectors are strictly positive; verification below still uses
      // the exact M_f.
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) probe(i, j) += 1e-9;
    }
    const PerronPair pp = perron_pair(probe);
    std::vector<double> p(dim);
    bool valid = true;
    for (std::size_t i = 0; i < dim; ++i) {
      if (pp.right[i] <= 0.0 || pp.left[i] <= 0.0) {
        valid = false;
        break;
      }
      p[i] = pp.left[i] / pp.right[i];
    }
    if (valid) {
      DenseMatrix pm(dim, dim);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) pm(i, j) = p[i] * m_f(i, j);
      DenseMatrix decrement = m_f.transpose() * pm - DenseMatrix::diagonal(p);
      const auto [lo, hi] = symmetric_eigen_extrema(decrement);
      (void)lo;
      if (hi < 0.0) {
        cert.witness = WitnessKind::diagonal_p;
        cert.p_diag = std::move(p);
        cert.witness_lambda_max = hi;
        return;
      }
    }
  } catch (const EigenFailure&) {
    // fall through to the series witness
  }
  try {
    LyapunovSolution sol = solve_discrete_lyapunov(m_f);
    cert.witness = WitnessKind::lyapunov_q;
    cert.q_witness = std::move(sol.q);
    cert.q_residual = sol.residual;
  } catch (const std::exception&) {
    cert.witness = WitnessKind::none;
  }
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::not_certified: return "not-certified";
    case Verdict::inapplicable: return "inapplicable";
  }
  return "unknown";
}

SlowVariationConstants slow_variation_constants(double alpha1, double l_bound,
                                                double kappa_obs, std::size_t dim,
                                                double sigma) {
  SlowVariationConstants c;
  c.alpha1 = alpha1;
  c.l_bound = l_bound;
  c.kappa_obs = kappa_obs;
  c.sigma = sigma;
  c.mu = (1.0 - alpha1) / 2.0;
  c.p1 = 1.0 - c.mu;
  const double d = static_cast<double>(dim);
  c.m1 = ((1.0 - c.mu) / std::pow(c.mu, d)) * std::pow(1.0 - c.mu + l_bound, d - 1.0);
  const double one_minus_p1sq = 1.0 - c.p1 * c.p1;
  c.kappa_star =
      (one_minus_p1sq * one_minus_p1sq / (2.0 * std::pow(c.m1, 4.0) * l_bound)) *
      (1.0 - sigma);
  c.conservatism = c.kappa_star > 0.0 ? kappa_obs / c.kappa_star
                                      : std::numeric_limits<double>::infinity();
  return c;
}

Certificate certify_ti(const VirusLayerParams& frame, const SystemShape& shape,
                       std::size_t r) {
  Certificate cert;
  cert.virus = r;
  cert.theorem = "theorem-1";
  cert.assumptions = ti_gate(frame, shape);
  if (!cert.assumptions.all_pass()) {
    cert.verdict = Verdict::inapplicable;
    cert.detail = "assumption gate failed";
    return cert;
  }
  const AssembledSystem sys = assemble(frame, shape);
  cert.rho_sup = spectral_radius_nonneg(sys.m_f);
  cert.margin = 1.0 - cert.rho_sup;
  if (cert.rho_sup <= 1.0 - kStrictMargin) {
    cert.verdict = Verdict::certified;
    attach_witness(cert, sys.m_f);
  } else {
    cert.verdict = Verdict::not_certified;
    cert.detail = "rho(M_f) >= 1";
  }
  return cert;
}

std::vector<Certificate> certify_dfe(const std::vector<VirusLayerParams>& frames,
                                     const SystemShape& shape) {
  std::vector<Certificate> out;
  for (std::size_t r = 0; r < frames.size(); ++r) {
    Certificate c = certify_ti(frames[r], shape, r);
    c.theorem = "corollary-2";
    out.push_back(std::move(c));
  }
  return out;
}

ReproductionComparison reproduction_comparison(const VirusLayerParams& frame,
                                               const SystemShape& shape, std::size_t r) {
  (void)r;
  ReproductionComparison out;
  const AssembledSystem sys = assemble(frame, shape);
  if (scc_condensation(support_of(sys.b_f)).size() != 1) {
    out.applicable = false;
    out.detail = "Assumption 5 fails: B_f is reducible";
    return out;
  }
  out.applicable = true;
  out.rho_full = spectral_radius_nonneg(sys.m_f);
  DenseMatrix principal(shape.n, shape.n);
  for (std::size_t i = 0; i < shape.n; ++i)
    for (std::size_t j = 0; j < shape.n; ++j) principal(i, j) = sys.m_f(i, j);
  out.rho_individual = spectral_radius_nonneg(principal);
  out.ordering_holds = out.rho_full > out.rho_individual;
  return out;
}

Certificate certify_tv_homogeneous(const ParameterSchedule& schedule, std::size_t r) {
  Certificate cert;
  cert.virus = r;
  cert.theorem = "theorem-2";
  const SystemShape& shape = schedule.shape();
  cert.assumptions = check_step_budget(schedule);
  for (const auto& [k, frames] : schedule.distinct_frames()) {
    (void)k;
    cert.assumptions.merge(check_rates((*frames)[r]));
    cert.assumptions.merge(check_shedding_ratio((*frames)[r]));
  }
  if (!cert.assumptions.all_pass()) {
    cert.verdict = Verdict::inapplicable;
    cert.detail = "assumption gate failed";
    return cert;
  }

  double sup_rho = 0.0;
  for (const auto& [k, frames] : schedule.distinct_frames()) {
    (void)k;
    const VirusLayerParams& p = (*frames)[r];
    for (std::size_t i = 1; i < shape.n; ++i) {
      if (std::abs(p.beta()[i] - p.beta()[0]) > kStructuralSlack) {
        cert.verdict = Verdict::inapplicable;
        cert.detail = "condition i fails: infection rate not homogeneous";
        return cert;
      }
      if (std::abs(p.delta()[i] - p.delta()[0]) > kStructuralSlack) {
        cert.verdict = Verdict::inapplicable;
        cert.detail = "condition ii fails: healing rate not homogeneous";
        return cert;
      }
    }
    for (std::size_t i = 0; i < shape.n; ++i)
      for (std::size_t j = i + 1; j < shape.n; ++j)
        if (std::abs(p.adjacency()(i, j) - p.adjacency()(j, i)) > kStructuralSlack) {
          cert.verdict = Verdict::inapplicable;
          cert.detail = "condition iii fails: social interactions not symmetric";
          return cert;
        }
    for (std::size_t i = 0; i < shape.n; ++i)
      for (std::size_t j = 0; j < shape.q; ++j)
        if (std::abs(p.beta_w()(i, j) - p.c_w()(j, i)) > kStructuralSlack) {
          cert.verdict = Verdict::inapplicable;
          cert.detail = "condition iv fails: B_w != C_w^T";
          return cert;
        }
    sup_rho = std::max(sup_rho, spectral_radius_nonneg(assemble(p, shape).m_f));
  }
  cert.rho_sup = sup_rho;
  cert.margin = 1.0 - sup_rho;
  if (sup_rho <= 1.0 - kStrictMargin) {
    cert.verdict = Verdict::certified;
    cert.witness = WitnessKind::identity;  // V = (1/2) z^T z per the proof
  } else {
    cert.verdict = Verdict::not_certified;
    cert.detail = "sup_k rho(M_f(k)) >= 1";
  }
  return cert;
}

Certificate certify_tv_slow(const ParameterSchedule& schedule, std::size_t r,
                            std::size_t horizon, double sigma) {
  Certificate cert;
  cert.virus = r;
  cert.theorem = "theorem-3";
  if (!(sigma > 0.0 && sigma < 1.0)) throw ModelError("certify_tv_slow: sigma in (0,1)");
  const SystemShape& shape = schedule.shape();
  cert.assumptions = check_step_budget(schedule, horizon);
  for (const auto& [k, frames] : schedule.distinct_frames()) {
    (void)k;
    cert.assumptions.merge(check_rates((*frames)[r]));
    cert.assumptions.merge(check_shedding_ratio((*frames)[r]));
  }
  if (!cert.assumptions.all_pass()) {
    cert.verdict = Verdict::inapplicable;
    cert.detail = "assumption gate failed";
    return cert;
  }

  double alpha1 = 0.0;
  double l_bound = 0.0;
  for (const auto& [k, frames] : schedule.distinct_frames()) {
    (void)k;
    const DenseMatrix m_f = assemble((*frames)[r], shape).m_f;
    alpha1 = std::max(alpha1, spectral_radius_nonneg(m_f));
    l_bound = std::max(l_bound, induced2_norm(m_f));
  }
  double kappa_obs = 0.0;
  for (std::size_t k : schedule.transition_instants()) {
    const DenseMatrix a = assemble(schedule.frame_at(k, r), shape).m_f;
    const DenseMatrix b = assemble(schedule.frame_at(k + 1, r), shape).m_f;
    kappa_obs = std::max(kappa_obs, induced2_norm(b - a));
  }

  cert.rho_sup = alpha1;
  cert.margin = 1.0 - alpha1;
  cert.slow = slow_variation_constants(alpha1, l_bound, kappa_obs,
                                       shape.n + shape.q, sigma);
  if (alpha1 > 1.0 - kStrictMargin) {
    cert.verdict = Verdict::not_certified;
    cert.detail = "condition i fails: sup_k rho(M_f(k)) >= 1";
    return cert;
  }
  if (kappa_obs <= cert.slow->kappa_star) {
    cert.verdict = Verdict::certified;
  } else {
    cert.verdict = Verdict::not_certified;
    cert.detail = "observed variation exceeds the admissible kappa budget";
  }
  return cert;
}

LyapunovAudit lyapunov_decrease_audit(const Trajectory& trajectory,
                                      const Certificate& certificate) {
  LyapunovAudit audit;
  if (trajectory.states.empty())
    throw ModelError("lyapunov_decrease_audit: trajectory has no stored states");
  const std::size_t r = certificate.virus;

  auto value = [&](const std::vector<double>& z) -> double {
    switch (certificate.witness) {
      case WitnessKind::diagonal_p: {
        double acc = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
          acc += certificate.p_diag[i] * z[i] * z[i];
        return acc;
      }
      case WitnessKind::lyapunov_q: {
        const auto qz = certificate.q_witness->apply(z);
        double acc = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) acc += z[i] * qz[i];
        return acc;
      }
      case WitnessKind::identity: {
        double acc = 0.0;
        for (double v : z) acc += v * v;
        return 0.5 * acc;
      }
      case WitnessKind::none:
        throw ModelError("lyapunov_decrease_audit: certificate carries no witness");
    }
    return 0.0;
  };

  double prev = value(trajectory.states.front().z(r));
  for (std::size_t k = 1; k < trajectory.states.size(); ++k) {
    const double cur = value(trajectory.states[k].z(r));
    if (prev > 0.0) {
      ++audit.steps_checked;
      const double ratio = cur / prev;
      audit.worst_ratio = std::max(audit.worst_ratio, ratio);
      if (cur >= prev) {
        ++audit.violations;
        audit.pass = false;
      }
    }
    prev = cur;
  }
  return audit;
}

nlohmann::json Certificate::to_json() const {
  nlohmann::json j;
  j["virus"] = virus + 1;
  j["theorem"] = theorem;
  j["verdict"] = to_string(verdict);
  if (!detail.empty()) j["detail"] = detail;
  j["rho_sup"] = rho_sup;
  j["margin"] = margin;
  switch (witness) {
    case WitnessKind::diagonal_p:
      j["witness"] = {{"kind", "diagonal-p"},
                      {"p", p_diag},
                      {"lambda_max_decrement", witness_lambda_max}};
      break;
    case WitnessKind::lyapunov_q:
      j["witness"] = {{"kind", "lyapunov-q"},
                      {"q", matrix_to_json(*q_witness)},
                      {"residual", q_residual}};
      break;
    case WitnessKind::identity:
      j["witness"] = {{"kind", "identity"}};
      break;
    case WitnessKind::none:
      break;
  }
  if (slow) {
    j["slow_variation"] = {
        {"alpha1", slow->alpha1},   {"L", slow->l_bound},
        {"kappa_obs", slow->kappa_obs}, {"kappa_star", slow->kappa_star},
        {"mu", slow->mu},           {"m1", slow->m1},
        {"p1", slow->p1},           {"sigma", slow->sigma},
        {"conservatism", slow->conservatism}};
  }
  j["assumptions"] = assumptions.to_json();
  return j;
}

}  // namespace siws
