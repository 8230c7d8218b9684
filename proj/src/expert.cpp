#include "tiltopt/expert.hpp"

namespace tiltopt::expert {

rlcore::Action expert_action(const kpi::KpiRecord& record, const Thresholds& thresholds) {
  if (record.bad_coverage > thresholds.bad_coverage_high ||
      record.congestion_rate > thresholds.congestion_high) {
    return rlcore::Action::Up;
  }
  if (record.overshooting > thresholds.overshooting_high ||
      record.overlap_high > thresholds.overlap_high_thr ||
      record.interference_indicator > thresholds.overlap_high_thr) {
    return rlcore::Action::Down;
  }
  return rlcore::Action::Keep;
}

}  // namespace tiltopt::expert
