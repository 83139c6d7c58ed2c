#include "siws/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace siws {

void SystemShape::validate() const {
  if (n < 1) throw ModelError("shape: n must be >= 1");
  if (m < 1) throw ModelError("shape: m must be >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw ModelError("shape: h must be > 0");
}

namespace {

void check_dims(const std::vector<double>& beta, const DenseMatrix& adjacency,
                const std::vector<double>& delta, const DenseMatrix& beta_w,
                const DenseMatrix& c_w, const DenseMatrix& alpha_w,
                const std::vector<double>& delta_w) {
  const std::size_t n = beta.size();
  const std::size_t q = delta_w.size();
  if (n == 0) throw ModelError("params: n must be >= 1");
  if (adjacency.rows() != n || adjacency.cols() != n)
    throw ModelError("params: adjacency must be n x n");
  if (delta.size() != n) throw ModelError("params: delta must have length n");
  if (beta_w.rows() != n || beta_w.cols() != q)
    throw ModelError("params: beta_w must be n x q");
  if (c_w.rows() != q || c_w.cols() != n) throw ModelError("params: c_w must be q x n");
  if (alpha_w.rows() != q || alpha_w.cols() != q)
    throw ModelError("params: alpha_w must be q x q");
}

bool finite_nonneg(const DenseMatrix& m) { return m.all_finite() && m.nonnegative(); }

}  // namespace

std::optional<std::string> VirusLayerParams::invariant_violation() const {
  const std::size_t nn = n();
  const std::size_t qq = q();
  for (std::size_t i = 0; i < nn; ++i) {
    if (!(beta_[i] >= 0.0) || !std::isfinite(beta_[i]))
      return "Assumption 2: beta_" + std::to_string(i + 1) + " must be >= 0";
    if (!(delta_[i] > 0.0) || !std::isfinite(delta_[i]))
      return "Assumption 2: delta_" + std::to_string(i + 1) + " must be > 0";
  }
  if (!finite_nonneg(adjacency_)) return "Assumption 2: adjacency entries must be >= 0";
  if (!finite_nonneg(beta_w_)) return "Assumption 2: beta_w entries must be >= 0";
  if (!finite_nonneg(c_w_)) return "Assumption 2: c_w entries must be >= 0";
  if (!finite_nonneg(alpha_w_)) return "params: alpha_w entries must be >= 0";
  for (std::size_t j = 0; j < qq; ++j) {
    if (!(delta_w_[j] > 0.0) || !std::isfinite(delta_w_[j]))
      return "Assumption 2: delta_w_" + std::to_string(j + 1) + " must be > 0";
  }
  if (qq > 0 && !(w_max_ > 0.0)) return "Assumption 3: w_max must be > 0";
  for (std::size_t j = 0; j < qq; ++j) {
    bool any = false;
    double shed = 0.0;
    for (std::size_t l = 0; l < nn; ++l) {
      any |= c_w_(j, l) > 0.0;
      shed += c_w_(j, l);
    }
    if (!any)
      return "Assumption 2: resource " + std::to_string(j + 1) +
             " has no strictly positive shedding entry in c_w";
    const double ratio = shed / delta_w_[j];
    if (ratio > w_max_) {
      std::ostringstream os;
      os << "Assumption 3: shedding ratio " << ratio << " for resource " << j + 1
         << " exceeds w_max " << w_max_;
      return os.str();
    }
  }
  return std::nullopt;
}

VirusLayerParams VirusLayerParams::unchecked(std::vector<double> beta,
                                             DenseMatrix adjacency,
                                             std::vector<double> delta,
                                             DenseMatrix beta_w, DenseMatrix c_w,
                                             DenseMatrix alpha_w,
                                             std::vector<double> delta_w,
                                             double w_max) {
  check_dims(beta, adjacency, delta, beta_w, c_w, alpha_w, delta_w);
  VirusLayerParams p;
  p.beta_ = std::move(beta);
  p.adjacency_ = std::move(adjacency);
  p.delta_ = std::move(delta);
  p.beta_w_ = std::move(beta_w);
  p.c_w_ = std::move(c_w);
  p.alpha_w_ = std::move(alpha_w);
  p.delta_w_ = std::move(delta_w);
  p.w_max_ = w_max;
  return p;
}

VirusLayerParams VirusLayerParams::checked(std::vector<double> beta,
                                           DenseMatrix adjacency,
                                           std::vector<double> delta,
                                           DenseMatrix beta_w, DenseMatrix c_w,
                                           DenseMatrix alpha_w,
                                           std::vector<double> delta_w, double w_max) {
  VirusLayerParams p =
      unchecked(std::move(beta), std::move(adjacency), std::move(delta),
                std::move(beta_w), std::move(c_w), std::move(alpha_w),
                std::move(delta_w), w_max);
  if (auto violation = p.invariant_violation()) throw ModelError(*violation);
  return p;
}

EdgeSets effective_graph(const VirusLayerParams& params) {
  EdgeSets e;
  const std::size_t n = params.n();
  const std::size_t q = params.q();
  // E^r: (i, j) recorded when a_ji > 0.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (params.adjacency()(j, i) > 0.0) e.individual.emplace_back(i, j);
  for (std::size_t l = 0; l < q; ++l)
    for (std::size_t j = 0; j < q; ++j)
      if (l != j && params.alpha_w()(l, j) > 0.0) e.resource.emplace_back(l, j);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t l = 0; l < n; ++l)
      if (params.c_w()(j, l) > 0.0) e.shedding.emplace_back(j, l);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < q; ++j)
      if (params.beta_w()(i, j) > 0.0) e.exposure.emplace_back(i, j);
  return e;
}

void ParameterSchedule::validate_frames() const {
  shape_.validate();
  auto check_set = [&](const std::vector<VirusLayerParams>& frames) {
    if (frames.size() != shape_.m)
      throw ModelError("schedule: frame set must contain one frame per virus");
    for (const auto& f : frames) {
      if (f.n() != shape_.n || f.q() != shape_.q)
        throw ModelError("schedule: frame dimension inconsistent with shape");
    }
  };
  for (const auto& s : slots_) check_set(s);
  for (const auto& t : table_) check_set(t);
}

ParameterSchedule ParameterSchedule::constant(SystemShape shape,
                                              std::vector<VirusLayerParams> frames) {
  ParameterSchedule s;
  s.kind_ = ScheduleKind::constant;
  s.shape_ = shape;
  s.slots_.push_back(std::move(frames));
  s.validate_frames();
  return s;
}

ParameterSchedule ParameterSchedule::periodic(
    SystemShape shape, std::vector<std::vector<VirusLayerParams>> frames_by_slot) {
  if (frames_by_slot.empty()) throw ModelError("schedule: periodic needs >= 1 slot");
  ParameterSchedule s;
  s.kind_ = ScheduleKind::periodic;
  s.shape_ = shape;
  s.slots_ = std::move(frames_by_slot);
  s.validate_frames();
  return s;
}

ParameterSchedule ParameterSchedule::explicit_table(
    SystemShape shape, std::map<std::size_t, std::vector<VirusLayerParams>> table) {
  if (table.empty()) throw ModelError("schedule: explicit table must be nonempty");
  if (table.begin()->first != 0)
    throw ModelError("schedule: explicit table must start at k = 0 for totality");
  ParameterSchedule s;
  s.kind_ = ScheduleKind::explicit_table;
  s.shape_ = shape;
  for (auto& [k, frames] : table) {
    s.keys_.push_back(k);
    s.table_.push_back(std::move(frames));
  }
  s.validate_frames();
  return s;
}

const std::vector<VirusLayerParams>& ParameterSchedule::frames_at(std::size_t k) const {
  switch (kind_) {
    case ScheduleKind::constant:
      return slots_.front();
    case ScheduleKind::periodic: {
      // Slot 0 governs odd instants (k = 1 mod period): with period 2 the
      // first listed frame set rules the odd time steps.
      const std::size_t p = slots_.size();
      return slots_[(k % p + p - 1) % p];
    }
    case ScheduleKind::explicit_table: {
      auto it = std::upper_bound(keys_.begin(), keys_.end(), k);
      return table_[static_cast<std::size_t>(it - keys_.begin()) - 1];
    }
  }
  throw ModelError("schedule: unknown kind");
}

const VirusLayerParams& ParameterSchedule::frame_at(std::size_t k, std::size_t r) const {
  if (r >= shape_.m) throw ModelError("schedule: virus index out of range");
  return frames_at(k)[r];
}

std::vector<std::pair<std::size_t, const std::vector<VirusLayerParams>*>>
ParameterSchedule::distinct_frames() const {
  std::vector<std::pair<std::size_t, const std::vector<VirusLayerParams>*>> out;
  switch (kind_) {
    case ScheduleKind::constant:
      out.emplace_back(0, &slots_.front());
      break;
    case ScheduleKind::periodic:
      for (std::size_t s = 0; s < slots_.size(); ++s)
        out.emplace_back((s + 1) % slots_.size(), &slots_[s]);
      break;
    case ScheduleKind::explicit_table:
      for (std::size_t i = 0; i < keys_.size(); ++i) out.emplace_back(keys_[i], &table_[i]);
      break;
  }
  return out;
}

std::vector<std::size_t> ParameterSchedule::transition_instants() const {
  std::vector<std::size_t> out;
  switch (kind_) {
    case ScheduleKind::constant:
      break;
    case ScheduleKind::periodic:
      for (std::size_t s = 0; s < slots_.size(); ++s) out.push_back(s);
      break;
    case ScheduleKind::explicit_table:
      for (std::size_t i = 1; i < keys_.size(); ++i)
        out.push_back(keys_[i] == 0 ? 0 : keys_[i] - 1);
      break;
  }
  return out;
}

}  // namespace siws
