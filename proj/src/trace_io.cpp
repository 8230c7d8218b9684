#include "tiltopt/trace_io.hpp"

#include "tiltopt/csv.hpp"
#include "tiltopt/errors.hpp"

namespace tiltopt::trace {

namespace {

constexpr const char* kTraceHeader =
    "episode,step,cell,tilt,action,reward,good_traffic,congestion,good_coverage,good_quality,"
    "overshooting,overlap_high,bad_coverage,interference_indicator,gt_neigh,cr_neigh";

constexpr const char* kLogHeader = "step,loss,mean_reward,epsilon";

}  // namespace

TraceTable flatten(const std::vector<marl::EpisodeTrace>& traces) {
  TraceTable table;
  for (const marl::EpisodeTrace& t : traces) {
    for (std::size_t i = 0; i < t.optimized.size(); ++i) {
      TraceRow row;
      row.episode = t.episode;
      row.step = 0;
      row.cell = t.optimized[i];
      row.tilt_deg = t.baseline_tilt_deg[i];
      row.action = -1;
      row.reward = 0.0;
      row.kpi = t.baseline_kpi[i];
      table.push_back(row);
    }
    for (std::size_t s = 0; s < t.steps.size(); ++s) {
      for (std::size_t i = 0; i < t.optimized.size(); ++i) {
        const marl::CellStep& cs = t.steps[s][i];
        TraceRow row;
        row.episode = t.episode;
        row.step = static_cast<int>(s) + 1;
        row.cell = t.optimized[i];
        row.tilt_deg = cs.tilt_deg;
        row.action = static_cast<int>(cs.action);
        row.reward = cs.reward;
        row.kpi = cs.kpi;
        table.push_back(row);
      }
    }
  }
  return table;
}

std::string trace_csv(const TraceTable& table) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRow& r : table) {
    out += csv::num(static_cast<int64_t>(r.episode));
    out += ',';
    out += csv::num(static_cast<int64_t>(r.step));
    out += ',';
    out += csv::num(static_cast<int64_t>(r.cell));
    out += ',';
    out += csv::num(r.tilt_deg);
    out += ',';
    out += csv::num(static_cast<int64_t>(r.action));
    out += ',';
    out += csv::num(r.reward);
    out += ',';
    out += csv::num(r.kpi.good_traffic);
    out += ',';
    out += csv::num(r.kpi.congestion_rate);
    out += ',';
    out += csv::num(r.kpi.good_coverage);
    out += ',';
    out += csv::num(r.kpi.good_quality);
    out += ',';
    out += csv::num(r.kpi.overshooting);
    out += ',';
    out += csv::num(r.kpi.overlap_high);
    out += ',';
    out += csv::num(r.kpi.bad_coverage);
    out += ',';
    out += csv::num(r.kpi.interference_indicator);
    out += ',';
    out += csv::num(r.kpi.gt_neigh);
    out += ',';
    out += csv::num(r.kpi.cr_neigh);
    out += '\n';
  }
  return out;
}

TraceTable parse_trace_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      std::string line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) rows.push_back(csv::split_line(line));
      start = end + 1;
    }
  }
  if (rows.empty() || rows[0] != csv::split_line(kTraceHeader)) {
    throw IoError("trace CSV header mismatch");
  }
  TraceTable table;
  table.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 16) throw IoError("trace CSV row has wrong field count");
    TraceRow r;
    r.episode = static_cast<int>(csv::to_int(f[0]));
    r.step = static_cast<int>(csv::to_int(f[1]));
    r.cell = static_cast<int>(csv::to_int(f[2]));
    r.tilt_deg = csv::to_double(f[3]);
    r.action = static_cast<int>(csv::to_int(f[4]));
    r.reward = csv::to_double(f[5]);
    r.kpi.good_traffic = csv::to_double(f[6]);
    r.kpi.congestion_rate = csv::to_double(f[7]);
    r.kpi.good_coverage = csv::to_double(f[8]);
    r.kpi.good_quality = csv::to_double(f[9]);
    r.kpi.overshooting = csv::to_double(f[10]);
    r.kpi.overlap_high = csv::to_double(f[11]);
    r.kpi.bad_coverage = csv::to_double(f[12]);
    r.kpi.interference_indicator = csv::to_double(f[13]);
    r.kpi.gt_neigh = csv::to_double(f[14]);
    r.kpi.cr_neigh = csv::to_double(f[15]);
    table.push_back(r);
  }
  return table;
}

std::string training_log_csv(const std::vector<marl::TrainingLogRow>& log) {
  std::string out = kLogHeader;
  out += '\n';
  for (const marl::TrainingLogRow& r : log) {
    out += csv::num(r.step);
    out += ',';
    out += csv::num(r.loss);
    out += ',';
    out += csv::num(r.mean_reward);
    out += ',';
    out += csv::num(r.epsilon);
    out += '\n';
  }
  return out;
}

std::vector<marl::TrainingLogRow> parse_training_log_csv(const std::string& text) {
  std::vector<marl::TrainingLogRow> log;
  std::size_t start = 0;
  bool header = true;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      if (line != kLogHeader) throw IoError("training log header mismatch");
      header = false;
      continue;
    }
    const auto f = csv::split_line(line);
    if (f.size() != 4) throw IoError("training log row has wrong field count");
    marl::TrainingLogRow r;
    r.step = csv::to_int(f[0]);
    r.loss = csv::to_double(f[1]);
    r.mean_reward = csv::to_double(f[2]);
    r.epsilon = csv::to_double(f[3]);
    log.push_back(r);
  }
  return log;
}

}  // namespace tiltopt::trace
