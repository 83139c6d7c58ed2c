#include "siws/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace siws {

namespace {
constexpr double kDomainSlack = 1e-12;
}

LayeredState LayeredState::zero(const SystemShape& shape) {
  LayeredState s;
  s.x.assign(shape.m, std::vector<double>(shape.n, 0.0));
  s.w.assign(shape.m, std::vector<double>(shape.q, 0.0));
  return s;
}

std::vector<double> LayeredState::z(std::size_t r) const {
  std::vector<double> out(x[r]);
  out.insert(out.end(), w[r].begin(), w[r].end());
  return out;
}

double LayeredState::xbar(std::size_t r) const {
  double acc = 0.0;
  for (double v : x[r]) acc += v;
  return x[r].empty() ? 0.0 : acc / static_cast<double>(x[r].size());
}

double LayeredState::wbar(std::size_t r) const {
  double acc = 0.0;
  for (double v : w[r]) acc += v;
  return w[r].empty() ? 0.0 : acc / static_cast<double>(w[r].size());
}

void LayeredState::check_shape(const SystemShape& shape) const {
  if (x.size() != shape.m || w.size() != shape.m)
    throw ModelError("state: virus count inconsistent with shape");
  for (std::size_t r = 0; r < shape.m; ++r)
    if (x[r].size() != shape.n || w[r].size() != shape.q)
      throw ModelError("state: dimensions inconsistent with shape");
}

AssembledSystem assemble(const VirusLayerParams& params, const SystemShape& shape) {
  const std::size_t n = shape.n;
  const std::size_t q = shape.q;
  if (params.n() != n || params.q() != q)
    throw ModelError("assemble: params dimension mismatch with shape");
  const double h = shape.h;

  AssembledSystem sys;
  sys.b_f = DenseMatrix(n + q, n + q);
  sys.d_f_diag.assign(n + q, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      sys.b_f(i, j) = params.beta()[i] * params.adjacency()(i, j);
    for (std::size_t j = 0; j < q; ++j) sys.b_f(i, n + j) = params.beta_w()(i, j);
    sys.d_f_diag[i] = params.delta()[i];
  }
  for (std::size_t j = 0; j < q; ++j) {
    for (std::size_t l = 0; l < n; ++l) sys.b_f(n + j, l) = params.c_w()(j, l);
    double outflow = 0.0;
    for (std::size_t l = 0; l < q; ++l) {
      outflow += params.alpha_w()(j, l);
      if (l != j) sys.b_f(n + j, n + l) = params.alpha_w()(j, l);
    }
    // D_w carries decay plus total outflow; the diagonal alpha entry cancels
    // between B_f and D_f, so self-transfer has no effect on the dynamics.
    sys.d_f_diag[n + j] = params.delta_w()[j] + outflow - params.alpha_w()(j, j);
  }

  sys.m_f = sys.b_f.scaled(h);
  for (std::size_t i = 0; i < n + q; ++i) sys.m_f(i, i) += 1.0 - h * sys.d_f_diag[i];
  return sys;
}

DenseMatrix assemble_mhat(const AssembledSystem& system, const LayeredState& state,
                          std::size_t r, const SystemShape& shape) {
  (void)r;  // M_hat depends on the summed state, not the virus index.
  state.check_shape(shape);
  const std::size_t n = shape.n;
  const std::size_t q = shape.q;
  DenseMatrix mhat = system.m_f;
  for (std::size_t i = 0; i < n; ++i) {
    double xsum = 0.0;
    for (std::size_t l = 0; l < state.viruses(); ++l) xsum += state.x[l][i];
    const double factor = shape.h * xsum;
    for (std::size_t j = 0; j < n + q; ++j) mhat(i, j) -= factor * system.b_f(i, j);
  }
  return mhat;
}

LayeredState step(const LayeredState& state, const std::vector<VirusLayerParams>& frames,
                  const SystemShape& shape) {
  state.check_shape(shape);
  if (frames.size() != shape.m) throw ModelError("step: one frame per virus required");
  const std::size_t n = shape.n;
  const std::size_t q = shape.q;
  const double h = shape.h;

  std::vector<double> susceptible(n, 1.0);
  for (std::size_t l = 0; l < shape.m; ++l)
    for (std::size_t i = 0; i < n; ++i) susceptible[i] -= state.x[l][i];

  LayeredState next = state;
  for (std::size_t r = 0; r < shape.m; ++r) {
    const VirusLayerParams& p = frames[r];
    for (std::size_t i = 0; i < n; ++i) {
      double pressure = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        pressure += p.beta()[i] * p.adjacency()(i, j) * state.x[r][j];
      for (std::size_t j = 0; j < q; ++j)
        pressure += p.beta_w()(i, j) * state.w[r][j];
      next.x[r][i] =
          state.x[r][i] + h * (-p.delta()[i] * state.x[r][i] + susceptible[i] * pressure);
    }
    for (std::size_t j = 0; j < q; ++j) {
      double inflow = 0.0;
      double outflow = 0.0;
      for (std::size_t l = 0; l < q; ++l) {
        if (l != j) {
          inflow += p.alpha_w()(j, l) * state.w[r][l];
          outflow += p.alpha_w()(j, l);
        }
      }
      double shed = 0.0;
      for (std::size_t l = 0; l < n; ++l) shed += p.c_w()(j, l) * state.x[r][l];
      next.w[r][j] = state.w[r][j] +
                     h * (-(p.delta_w()[j] + outflow) * state.w[r][j] + inflow + shed);
    }
  }

  // Lemma-style domain audit: exact in real arithmetic when the assumptions
  // hold, so anything beyond slack is a hard error.
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t r = 0; r < shape.m; ++r) {
      const double xi = next.x[r][i];
      if (xi < -kDomainSlack || xi > 1.0 + kDomainSlack) {
        std::ostringstream os;
        os << "domain violation: x_" << i + 1 << "^" << r + 1 << " = " << xi
           << " outside [0, 1]";
        throw DomainViolation(os.str());
      }
      total += xi;
    }
    if (total > 1.0 + kDomainSlack) {
      std::ostringstream os;
      os << "domain violation: sum over viruses of x_" << i + 1 << " = " << total
         << " exceeds 1";
      throw DomainViolation(os.str());
    }
  }
  for (std::size_t r = 0; r < shape.m; ++r) {
    for (std::size_t j = 0; j < q; ++j) {
      const double wj = next.w[r][j];
      const double cap = frames[r].w_max();
      if (wj < -kDomainSlack || wj > cap + kDomainSlack) {
        std::ostringstream os;
        os << "domain violation: w_" << j + 1 << "^" << r + 1 << " = " << wj
           << " outside [0, " << cap << "]";
        throw DomainViolation(os.str());
      }
    }
  }
  return next;
}

Trajectory rollout(const ParameterSchedule& schedule, const LayeredState& initial,
                   const RolloutOptions& options) {
  const SystemShape& shape = schedule.shape();
  initial.check_shape(shape);
  Trajectory traj;
  traj.xbar.assign(shape.m, {});
  traj.wbar.assign(shape.m, {});

  std::vector<double> x0(shape.m), w0(shape.m);
  LayeredState current = initial;
  auto record = [&](const LayeredState& s) {
    for (std::size_t r = 0; r < shape.m; ++r) {
      traj.xbar[r].push_back(s.xbar(r));
      traj.wbar[r].push_back(s.wbar(r));
    }
    if (options.keep_states) traj.states.push_back(s);
  };
  record(current);
  for (std::size_t r = 0; r < shape.m; ++r) {
    x0[r] = traj.xbar[r][0];
    w0[r] = traj.wbar[r][0];
  }

  for (std::size_t k = 0; k < options.horizon; ++k) {
    current = step(current, schedule.frames_at(k), shape);
    record(current);
    ++traj.steps;
    if (options.stop_below_fraction > 0.0) {
      bool all_below = true;
      for (std::size_t r = 0; r < shape.m && all_below; ++r) {
        all_below &= current.xbar(r) <= options.stop_below_fraction * x0[r];
        all_below &= current.wbar(r) <= options.stop_below_fraction * w0[r];
      }
      if (all_below) break;
    }
  }
  return traj;
}

}  // namespace siws
