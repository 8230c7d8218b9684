#pragma once

#include "tiltopt/kpi.hpp"
#include "tiltopt/rlcore.hpp"

namespace tiltopt::expert {

struct Thresholds {
  double bad_coverage_high = 0.10;
  double overshooting_high = 0.15;
  double overlap_high_thr = 0.30;
  double congestion_high = 0.05;
};

// Crisp rule-based tilt controller. Priority order: coverage and congestion
// problems uptilt; otherwise overshooting/overlap/interference problems
// downtilt; otherwise keep.
rlcore::Action expert_action(const kpi::KpiRecord& record, const Thresholds& thresholds);

}  // namespace tiltopt::expert
