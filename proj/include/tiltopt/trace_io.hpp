#pragma once

#include <string>
#include <vector>

#include "tiltopt/marl.hpp"

namespace tiltopt::trace {

// Flat per-(episode, step, cell) view of campaign traces; rows for step 0
// carry the baseline KPIs with action = -1 and reward = 0.
struct TraceRow {
  int episode = 0;
  int step = 0;
  int cell = 0;
  double tilt_deg = 0.0;
  int action = -1;
  double reward = 0.0;
  kpi::KpiRecord kpi{};
};

using TraceTable = std::vector<TraceRow>;

TraceTable flatten(const std::vector<marl::EpisodeTrace>& traces);

std::string trace_csv(const TraceTable& table);
TraceTable parse_trace_csv(const std::string& text);

std::string training_log_csv(const std::vector<marl::TrainingLogRow>& log);
std::vector<marl::TrainingLogRow> parse_training_log_csv(const std::string& text);

}  // namespace tiltopt::trace
