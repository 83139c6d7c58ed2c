#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "siws/graph_model.hpp"
#include "siws/linalg.hpp"

namespace siws {

/// Thrown when a state leaves the physically meaningful domain beyond the
/// floating-point slack. Indicates either an invalid configuration or a
/// numerics bug; never expected when the assumptions hold.
class DomainViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-virus state (x^r, w^r): infection fraction per individual in [0, 1]
/// and contamination per resource in [0, w_max^r].
struct LayeredState {
  std::vector<std::vector<double>> x;  // [r][i]
  std::vector<std::vector<double>> w;  // [r][j]

  static LayeredState zero(const SystemShape& shape);

  std::size_t viruses() const { return x.size(); }

  /// Stacked z^r = [x^r; w^r].
  std::vector<double> z(std::size_t r) const;

  double xbar(std::size_t r) const;
  double wbar(std::size_t r) const;

  void check_shape(const SystemShape& shape) const;
};

/// Block matrices of one virus layer's linearization. d_f is diagonal and is
/// stored as its diagonal.
struct AssembledSystem {
  DenseMatrix b_f;                // [[B, B_w], [C_w, A_w - diag(A_w)]]
  std::vector<double> d_f_diag;   // [D; D_w - diag(A_w)] with outflow folded in
  DenseMatrix m_f;                // I - h D_f + h B_f

  DenseMatrix d_f() const { return DenseMatrix::diagonal(d_f_diag); }
};

AssembledSystem assemble(const VirusLayerParams& params, const SystemShape& shape);

/// The closed-loop state matrix M_hat such that z^r(k+1) = M_hat z^r(k) at
/// the given multi-virus state.
DenseMatrix assemble_mhat(const AssembledSystem& system, const LayeredState& state,
                          std::size_t r, const SystemShape& shape);

/// One simultaneous update of all m viruses from the time-k state. Throws
/// DomainViolation if the successor leaves the domain beyond 1e-12 slack.
LayeredState step(const LayeredState& state, const std::vector<VirusLayerParams>& frames,
                  const SystemShape& shape);

struct RolloutOptions {
  std::size_t horizon = 0;
  bool keep_states = false;
  /// When > 0: stop early once every virus's average infection and
  /// contamination have fallen below this fraction of their initial values.
  double stop_below_fraction = 0.0;
};

struct Trajectory {
  std::size_t steps = 0;                       // states recorded = steps + 1
  std::vector<std::vector<double>> xbar;       // [r][k]
  std::vector<std::vector<double>> wbar;       // [r][k]
  std::vector<LayeredState> states;            // only when keep_states
};

Trajectory rollout(const ParameterSchedule& schedule, const LayeredState& initial,
                   const RolloutOptions& options);

}  // namespace siws
