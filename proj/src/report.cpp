#include "tiltopt/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tiltopt/csv.hpp"
#include "tiltopt/errors.hpp"

namespace tiltopt::report {

double quantile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted[0];
  const double h = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<EpisodeSeries> episode_series(const trace::TraceTable& table) {
  struct StepAccumulator {
    std::array<double, 4> sum{};
    int cells = 0;
    bool congestion_free = true;
  };
  std::map<std::pair<int, int>, StepAccumulator> acc;
  for (const trace::TraceRow& r : table) {
    StepAccumulator& slot = acc[{r.episode, r.step}];
    slot.sum[kGoodTraffic] += r.kpi.good_traffic;
    slot.sum[kGoodCoverage] += r.kpi.good_coverage;
    slot.sum[kGoodQuality] += r.kpi.good_quality;
    slot.sum[kCongestion] += r.kpi.congestion_rate;
    slot.cells += 1;
    if (r.kpi.congestion_rate > 0.0) slot.congestion_free = false;
  }
  std::vector<EpisodeSeries> out;
  for (const auto& [key, slot] : acc) {
    if (out.empty() || out.back().episode != key.first) {
      out.push_back(EpisodeSeries{key.first, {}, {}});
    }
    EpisodeSeries& series = out.back();
    if (static_cast<int>(series.metric.size()) != key.second) {
      throw ConfigError("trace has non-contiguous steps for episode " +
                        std::to_string(key.first));
    }
    std::array<double, 4> means = slot.sum;
    for (double& v : means) v /= slot.cells;
    series.metric.push_back(means);
    series.congestion_free.push_back(slot.congestion_free);
  }
  return out;
}

namespace {

StepStat stat_from(std::vector<double> values) {
  StepStat s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  s.q1 = quantile_linear(values, 0.25);
  s.q3 = quantile_linear(values, 0.75);
  return s;
}

MitigationStat mitigation_from(std::vector<double> steps, int mitigated, int total) {
  MitigationStat m;
  m.count = static_cast<int>(steps.size());
  m.mitigated_fraction = total > 0 ? static_cast<double>(mitigated) / total : 0.0;
  if (steps.empty()) return m;
  double sum = 0.0;
  for (double v : steps) sum += v;
  m.mean = sum / static_cast<double>(steps.size());
  std::sort(steps.begin(), steps.end());
  m.min = steps.front();
  m.max = steps.back();
  m.q1 = quantile_linear(steps, 0.25);
  m.median = quantile_linear(steps, 0.5);
  m.q3 = quantile_linear(steps, 0.75);
  return m;
}

double gain_percent(GainMetric metric, double base, double now) {
  if (metric == kCongestion) return 100.0 * (base - now) / base;
  return 100.0 * (now - base) / base;
}

}  // namespace

std::vector<std::pair<int, double>> per_episode_final_gain(const trace::TraceTable& table,
                                                           GainMetric metric) {
  std::vector<std::pair<int, double>> out;
  for (const EpisodeSeries& series : episode_series(table)) {
    const double base = series.metric.front()[static_cast<std::size_t>(metric)];
    if (base == 0.0) continue;
    const double now = series.metric.back()[static_cast<std::size_t>(metric)];
    out.emplace_back(series.episode, gain_percent(metric, base, now));
  }
  return out;
}

std::vector<EpisodeMitigation> per_episode_mitigation(const trace::TraceTable& table) {
  std::vector<EpisodeMitigation> out;
  for (const EpisodeSeries& series : episode_series(table)) {
    EpisodeMitigation m;
    m.episode = series.episode;
    m.initially_congested = !series.congestion_free.front();
    m.mitigated = false;
    m.steps = static_cast<int>(series.congestion_free.size()) - 1;
    for (std::size_t s = 0; s < series.congestion_free.size(); ++s) {
      if (series.congestion_free[s]) {
        m.mitigated = true;
        m.steps = static_cast<int>(s);
        break;
      }
    }
    out.push_back(m);
  }
  return out;
}

std::vector<double> windowed_mean(std::span<const double> values, int window) {
  std::vector<double> out;
  if (values.empty()) return out;
  const std::size_t w = window < 1 ? 1 : static_cast<std::size_t>(window);
  std::size_t start = 0;
  while (start + w <= values.size()) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = start; i < start + w; ++i) {
      if (std::isnan(values[i])) continue;
      sum += values[i];
      ++n;
    }
    out.push_back(n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN());
    start += w;
  }
  if (out.empty()) {
    double sum = 0.0;
    int n = 0;
    for (double v : values) {
      if (std::isnan(v)) continue;
      sum += v;
      ++n;
    }
    out.push_back(n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

VariantReport aggregate_gains(const trace::TraceTable& table, const std::string& variant_name) {
  VariantReport rep;
  rep.variant = variant_name;
  if (table.empty()) throw ConfigError("aggregate_gains needs at least one trace row");

  const std::vector<EpisodeSeries> episodes = episode_series(table);
  int max_step = 0;
  for (const EpisodeSeries& series : episodes) {
    max_step = std::max(max_step, static_cast<int>(series.metric.size()) - 1);
  }
  rep.steps = max_step;
  for (const EpisodeSeries& series : episodes) {
    if (static_cast<int>(series.metric.size()) - 1 != max_step) {
      throw ConfigError("episode " + std::to_string(series.episode) +
                        " has a different step count");
    }
  }

  for (auto& g : rep.gains) g.resize(static_cast<std::size_t>(max_step) + 1);
  for (int step = 0; step <= max_step; ++step) {
    for (int m = 0; m < 4; ++m) {
      std::vector<double> values;
      for (const EpisodeSeries& series : episodes) {
        const double base = series.metric[0][static_cast<std::size_t>(m)];
        if (base == 0.0) continue;  // excluded, warned below
        const double now = series.metric[static_cast<std::size_t>(step)][static_cast<std::size_t>(m)];
        values.push_back(gain_percent(static_cast<GainMetric>(m), base, now));
      }
      rep.gains[static_cast<std::size_t>(m)][static_cast<std::size_t>(step)] =
          stat_from(std::move(values));
    }
  }
  for (const EpisodeSeries& series : episodes) {
    for (int m = 0; m < 4; ++m) {
      if (series.metric[0][static_cast<std::size_t>(m)] == 0.0) {
        rep.warnings.push_back("episode " + std::to_string(series.episode) +
                               ": zero baseline " + kMetricNames[static_cast<std::size_t>(m)] +
                               ", excluded from that gain");
      }
    }
  }

  std::vector<double> steps_all, steps_congested;
  int mitigated_all = 0, mitigated_congested = 0, initially_congested = 0;
  for (const EpisodeMitigation& m : per_episode_mitigation(table)) {
    steps_all.push_back(static_cast<double>(m.steps));
    if (m.mitigated) ++mitigated_all;
    if (m.initially_congested) {
      ++initially_congested;
      steps_congested.push_back(static_cast<double>(m.steps));
      if (m.mitigated) ++mitigated_congested;
    }
  }
  rep.mitigation_all =
      mitigation_from(std::move(steps_all), mitigated_all, static_cast<int>(episodes.size()));
  rep.mitigation_congested =
      mitigation_from(std::move(steps_congested), mitigated_congested, initially_congested);
  return rep;
}

namespace {

void append_row(std::string& out, const std::string& table, const std::string& variant,
                const std::string& metric, const std::string& step, const std::string& stat,
                double value) {
  out += table;
  out += ',';
  out += variant;
  out += ',';
  out += metric;
  out += ',';
  out += step;
  out += ',';
  out += stat;
  out += ',';
  out += csv::num(value);
  out += '\n';
}

void append_mitigation(std::string& out, const std::string& variant, const std::string& metric,
                       const MitigationStat& m) {
  append_row(out, "mitigation", variant, metric, "", "count", m.count);
  append_row(out, "mitigation", variant, metric, "", "mean", m.mean);
  append_row(out, "mitigation", variant, metric, "", "min", m.min);
  append_row(out, "mitigation", variant, metric, "", "q1", m.q1);
  append_row(out, "mitigation", variant, metric, "", "median", m.median);
  append_row(out, "mitigation", variant, metric, "", "q3", m.q3);
  append_row(out, "mitigation", variant, metric, "", "max", m.max);
  append_row(out, "mitigation", variant, metric, "", "mitigated_fraction", m.mitigated_fraction);
}

}  // namespace

std::string report_csv(std::span<const VariantReport> reports) {
  std::string out = "table,variant,metric,step,stat,value\n";
  for (const VariantReport& rep : reports) {
    for (int m = 0; m < 4; ++m) {
      const char* metric = kMetricNames[static_cast<std::size_t>(m)];
      const auto& stats = rep.gains[static_cast<std::size_t>(m)];
      for (std::size_t step = 0; step < stats.size(); ++step) {
        const std::string step_str = csv::num(static_cast<int64_t>(step));
        append_row(out, "step_gain", rep.variant, metric, step_str, "mean", stats[step].mean);
        append_row(out, "step_gain", rep.variant, metric, step_str, "q1", stats[step].q1);
        append_row(out, "step_gain", rep.variant, metric, step_str, "q3", stats[step].q3);
        append_row(out, "step_gain", rep.variant, metric, step_str, "count", stats[step].count);
      }
      if (!stats.empty()) {
        const std::string step_str = csv::num(static_cast<int64_t>(stats.size() - 1));
        append_row(out, "final_gain", rep.variant, metric, step_str, "mean", stats.back().mean);
        append_row(out, "final_gain", rep.variant, metric, step_str, "q1", stats.back().q1);
        append_row(out, "final_gain", rep.variant, metric, step_str, "q3", stats.back().q3);
      }
    }
    append_mitigation(out, rep.variant, "steps_all", rep.mitigation_all);
    append_mitigation(out, rep.variant, "steps_congested", rep.mitigation_congested);
  }
  return out;
}

}  // namespace tiltopt::report
