#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tiltopt/trace_io.hpp"

namespace tiltopt::report {

enum GainMetric : int {
  kGoodTraffic = 0,
  kGoodCoverage = 1,
  kGoodQuality = 2,
  kCongestion = 3,
};
inline constexpr std::array<const char*, 4> kMetricNames = {
    "good_traffic", "good_coverage", "good_quality", "congestion"};

struct StepStat {
  double mean = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  int count = 0;  // episodes contributing (nonzero baseline)
};

struct MitigationStat {
  int count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mitigated_fraction = 0.0;  // share reaching zero congestion in-episode
};

struct VariantReport {
  std::string variant;
  int steps = 0;
  // Per metric: one StepStat per step 0..steps. Gains are relative
  // improvements vs the step-0 baseline, in percent; congestion gain is the
  // congestion reduction.
  std::array<std::vector<StepStat>, 4> gains;
  MitigationStat mitigation_all;        // all episodes; 0 when never congested
  MitigationStat mitigation_congested;  // episodes with initial congestion only
  std::vector<std::string> warnings;
};

// Quartile by linear interpolation over the sorted sample.
double quantile_linear(std::span<const double> sorted, double p);

// Per-episode time series of the four network metrics (means over the
// optimized cells in the trace, by step) plus the congestion-free flag.
struct EpisodeSeries {
  int episode = 0;
  std::vector<std::array<double, 4>> metric;  // [step][GainMetric]
  std::vector<bool> congestion_free;
};

std::vector<EpisodeSeries> episode_series(const trace::TraceTable& table);

// Final-step gain per episode for one metric, in percent; episodes with a
// zero baseline are skipped. Pairs as (episode, gain) for paired comparisons.
std::vector<std::pair<int, double>> per_episode_final_gain(const trace::TraceTable& table,
                                                           GainMetric metric);

struct EpisodeMitigation {
  int episode = 0;
  bool initially_congested = false;
  bool mitigated = false;
  int steps = 0;  // step cap when not mitigated
};

std::vector<EpisodeMitigation> per_episode_mitigation(const trace::TraceTable& table);

// Means over consecutive complete windows; NaN entries are skipped within a
// window (e.g. loss rows before the replay buffer fills). A short run yields
// a single window.
std::vector<double> windowed_mean(std::span<const double> values, int window);

// Network metric per (episode, step) = mean over the optimized cells in the
// trace; per-episode gains vs step 0, then mean/Q1/Q3 across episodes.
// Episodes with a zero baseline are excluded from that metric with a warning.
// Unmitigated episodes enter the steps-to-mitigation stats at the episode
// step cap.
VariantReport aggregate_gains(const trace::TraceTable& table, const std::string& variant_name);

std::string report_csv(std::span<const VariantReport> reports);

}  // namespace tiltopt::report
