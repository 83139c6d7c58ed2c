#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "siws/linalg.hpp"

namespace siws {

/// Error thrown on invalid model construction or lookup; the message names
/// the violated assumption where one applies.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SystemShape {
  std::size_t n = 0;  // individuals
  std::size_t q = 0;  // resource nodes
  std::size_t m = 0;  // viruses (1 permitted for degenerate testing)
  double h = 0.0;     // sampling step

  void validate() const;
};

/// All rate data for one virus at one time instant. Immutable once built.
///
/// Indexing: beta_w(i, j) couples resource j into individual i (n x q);
/// c_w(j, l) couples individual l into resource j (q x n); alpha_w(j, l) moves
/// contamination from resource l into resource j (q x q, diagonal ignored by
/// the dynamics).
class VirusLayerParams {
 public:
  /// Validating constructor: rejects any violation of the positivity,
  /// shedding, and shedding-ratio invariants with a diagnostic naming the
  /// assumption.
  static VirusLayerParams checked(std::vector<double> beta, DenseMatrix adjacency,
                                  std::vector<double> delta, DenseMatrix beta_w,
                                  DenseMatrix c_w, DenseMatrix alpha_w,
                                  std::vector<double> delta_w, double w_max);

  /// Dimension-checked only. Exists so the assumption checkers can produce
  /// reports about frames that the validating constructor would reject.
  static VirusLayerParams unchecked(std::vector<double> beta, DenseMatrix adjacency,
                                    std::vector<double> delta, DenseMatrix beta_w,
                                    DenseMatrix c_w, DenseMatrix alpha_w,
                                    std::vector<double> delta_w, double w_max);

  std::size_t n() const { return beta_.size(); }
  std::size_t q() const { return delta_w_.size(); }

  const std::vector<double>& beta() const { return beta_; }
  const DenseMatrix& adjacency() const { return adjacency_; }
  const std::vector<double>& delta() const { return delta_; }
  const DenseMatrix& beta_w() const { return beta_w_; }
  const DenseMatrix& c_w() const { return c_w_; }
  const DenseMatrix& alpha_w() const { return alpha_w_; }
  const std::vector<double>& delta_w() const { return delta_w_; }
  double w_max() const { return w_max_; }

  /// Full check of the constructor invariants; returns the first diagnostic,
  /// or nullopt when all hold.
  std::optional<std::string> invariant_violation() const;

 private:
  VirusLayerParams() = default;

  std::vector<double> beta_;
  DenseMatrix adjacency_;
  std::vector<double> delta_;
  DenseMatrix beta_w_;
  DenseMatrix c_w_;
  DenseMatrix alpha_w_;
  std::vector<double> delta_w_;
  double w_max_ = 0.0;
};

/// Edge sets of the layered graph for one virus, strict-positivity
/// thresholds. Pairs follow the (i, j) with a_ji > 0 convention for the
/// individual layer; resource self-loops are excluded.
struct EdgeSets {
  std::vector<std::pair<std::size_t, std::size_t>> individual;  // E^r
  std::vector<std::pair<std::size_t, std::size_t>> resource;    // E_w^r
  std::vector<std::pair<std::size_t, std::size_t>> shedding;    // E_c^r
  std::vector<std::pair<std::size_t, std::size_t>> exposure;    // E_b^r
};

EdgeSets effective_graph(const VirusLayerParams& params);

enum class ScheduleKind { constant, periodic, explicit_table };

/// Total map from time index k to per-virus parameter frames. Frames are
/// immutable; the schedule owns them.
class ParameterSchedule {
 public:
  /// Empty schedule; usable only as a placeholder until assigned.
  ParameterSchedule() = default;

  /// One frame per virus, used for all k.
  static ParameterSchedule constant(SystemShape shape,
                                    std::vector<VirusLayerParams> frames);

  /// frames_by_slot[s][r] is the frame for virus r at slot s. Slot s governs
  /// instants k with k = s + 1 (mod period), so the first listed frame set
  /// governs odd instants when the period is 2.
  static ParameterSchedule periodic(SystemShape shape,
                                    std::vector<std::vector<VirusLayerParams>> frames_by_slot);

  /// Keyed frames; the first key must be 0, and the frame with the largest
  /// key <= k governs instant k (hold-last past the final key).
  static ParameterSchedule explicit_table(
      SystemShape shape, std::map<std::size_t, std::vector<VirusLayerParams>> table);

  ScheduleKind kind() const { return kind_; }
  const SystemShape& shape() const { return shape_; }
  std::size_t period() const { return slots_.size(); }

  /// Frame governing the transition from k to k+1 for virus r (0-based).
  const VirusLayerParams& frame_at(std::size_t k, std::size_t r) const;

  /// All viruses' frames at instant k.
  const std::vector<VirusLayerParams>& frames_at(std::size_t k) const;

  /// The finitely many distinct frame sets this schedule can produce,
  /// each with a representative instant.
  std::vector<std::pair<std::size_t, const std::vector<VirusLayerParams>*>>
  distinct_frames() const;

  /// Representative consecutive-instant pairs (k, k+1) covering every
  /// possible one-step frame change, including period wraparound.
  std::vector<std::size_t> transition_instants() const;

 private:
  void validate_frames() const;

  ScheduleKind kind_ = ScheduleKind::constant;
  SystemShape shape_;
  std::vector<std::vector<VirusLayerParams>> slots_;  // periodic/constant storage
  std::vector<std::size_t> keys_;                     // explicit storage
  std::vector<std::vector<VirusLayerParams>> table_;  // frames per key
};

}  // namespace siws
