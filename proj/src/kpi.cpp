#include "tiltopt/kpi.hpp"

#include <algorithm>
#include <cmath>

namespace tiltopt::kpi {

double overlapping_factor(const radiosim::RadioSnapshot& snap, int cell_i, int cell_j,
                          double window_db) {
  int served = 0;
  int reported = 0;
  for (int u = 0; u < snap.n_ues; ++u) {
    if (snap.serving[u] != cell_i) continue;
    ++served;
    if (snap.rsrp(u, cell_j) >= snap.rsrp(u, cell_i) - window_db) ++reported;
  }
  if (served == 0) return 0.0;
  return static_cast<double>(reported) / static_cast<double>(served);
}

OverlapMatrix compute_overlap(const radiosim::RadioSnapshot& snap, double window_db) {
  OverlapMatrix counts(snap.n_cells);
  std::vector<int> served(snap.n_cells, 0);
  for (int u = 0; u < snap.n_ues; ++u) {
    const int i = snap.serving[u];
    ++served[i];
    const double threshold = snap.rsrp(u, i) - window_db;
    for (int j = 0; j < snap.n_cells; ++j) {
      if (j != i && snap.rsrp(u, j) >= threshold) counts.at(i, j) += 1.0;
    }
  }
  for (int i = 0; i < snap.n_cells; ++i) {
    if (served[i] == 0) continue;
    for (int j = 0; j < snap.n_cells; ++j) counts.at(i, j) /= served[i];
  }
  return counts;
}

KpiRecord cell_kpis(const radiosim::RadioSnapshot& snap, const topology::SiteLayout& layout,
                    const topology::EpisodeConfig& config, int cell, const KpiParams& params) {
  KpiRecord rec;
  const topology::Site& site = layout.sites[layout.cells[cell].site];
  const double overshoot_dist = params.overshoot_isd_factor * config.inter_site_distance_m;

  int served = 0;
  int n_cov = 0, n_qual = 0, n_both = 0, n_overshoot = 0, n_overlap_high = 0, n_interf = 0;
  for (int u = 0; u < snap.n_ues; ++u) {
    if (snap.serving[u] != cell) continue;
    ++served;
    const double rsrp_serv = snap.rsrp(u, cell);
    const bool cov = rsrp_serv >= params.good_coverage_rsrp_dbm;
    const bool qual = snap.sinr_db[u] >= params.good_quality_sinr_db;
    if (cov) ++n_cov;
    if (qual) ++n_qual;
    if (cov && qual) ++n_both;

    // Count neighbor cells inside the report window and track the strongest.
    int within_window = 0;
    double second_best = -1e300;
    for (int j = 0; j < snap.n_cells; ++j) {
      if (j == cell) continue;
      const double r = snap.rsrp(u, j);
      if (r >= rsrp_serv - params.overlap_window_db) ++within_window;
      if (r > second_best) second_best = r;
    }
    if (rsrp_serv >= params.overlap_high_rsrp_dbm && within_window >= 2) ++n_overlap_high;
    if (second_best >= rsrp_serv - params.overlap_window_db) ++n_interf;

    if (std::hypot(snap.ue_x[u] - site.x, snap.ue_y[u] - site.y) > overshoot_dist) ++n_overshoot;
  }

  rec.congestion_rate = snap.congestion[cell];
  if (served > 0) {
    rec.good_coverage = static_cast<double>(n_cov) / served;
    rec.good_quality = static_cast<double>(n_qual) / served;
    rec.good_traffic = static_cast<double>(n_both) / served;
    rec.bad_coverage = 1.0 - rec.good_coverage;
    rec.overlap_high = static_cast<double>(n_overlap_high) / served;
    rec.interference_indicator = static_cast<double>(n_interf) / served;
    rec.overshooting = static_cast<double>(n_overshoot) / served;
  }
  rec.gt_neigh = rec.good_traffic;
  rec.cr_neigh = rec.congestion_rate;
  return rec;
}

std::vector<KpiRecord> compute_cell_kpis(const radiosim::RadioSnapshot& snap,
                                         const topology::SiteLayout& layout,
                                         const topology::EpisodeConfig& config,
                                         const KpiParams& params) {
  std::vector<KpiRecord> records;
  records.reserve(static_cast<std::size_t>(snap.n_cells));
  for (int c = 0; c < snap.n_cells; ++c) {
    records.push_back(cell_kpis(snap, layout, config, c, params));
  }
  const OverlapMatrix overlap = compute_overlap(snap, params.overlap_window_db);
  std::vector<std::pair<double, double>> aggregates(records.size());
  for (int c = 0; c < snap.n_cells; ++c) {
    aggregates[c] = neighbor_aggregates(records, overlap, c, params.neighbor_count);
  }
  for (int c = 0; c < snap.n_cells; ++c) {
    records[c].gt_neigh = aggregates[c].first;
    records[c].cr_neigh = aggregates[c].second;
  }
  return records;
}

std::pair<double, double> neighbor_aggregates(std::span<const KpiRecord> all,
                                              const OverlapMatrix& overlap, int cell,
                                              int neighbor_count) {
  std::vector<std::pair<double, int>> factors;  // (-factor, id) for stable sort
  for (int j = 0; j < overlap.size(); ++j) {
    if (j == cell) continue;
    const double f = overlap.at(cell, j);
    if (f > 0.0) factors.emplace_back(-f, j);
  }
  std::sort(factors.begin(), factors.end());
  const std::size_t k = std::min<std::size_t>(factors.size(), static_cast<std::size_t>(neighbor_count));
  if (k == 0) {
    return {all[cell].good_traffic, all[cell].congestion_rate};
  }
  double weight_sum = 0.0, gt = 0.0, cr = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = -factors[i].first;
    const int j = factors[i].second;
    weight_sum += w;
    gt += w * all[j].good_traffic;
    cr += w * all[j].congestion_rate;
  }
  return {gt / weight_sum, cr / weight_sum};
}

double reward_metric(const KpiRecord& record) {
  return 1.0 + 0.5 * (record.good_traffic + record.gt_neigh - record.congestion_rate -
                      record.cr_neigh);
}

KpiRecord without_neighbor_info(KpiRecord record) {
  record.gt_neigh = record.good_traffic;
  record.cr_neigh = record.congestion_rate;
  return record;
}

double reward(double rm_before, double rm_after) {
  return 1000.0 * (rm_after - rm_before) / std::max(rm_before, 0.01);
}

StateVector build_state(const topology::SiteLayout& layout, const topology::EpisodeConfig& config,
                        const KpiRecord& record, int cell, bool include_neighbors,
                        const KpiParams& params) {
  StateVector s{};
  const int site = layout.cells[cell].site;
  s[kHeight] = config.antenna_height_m[cell] / params.height_norm_m;
  s[kTilt] = config.electrical_tilt_deg[cell] / params.tilt_norm_deg;
  s[kMechTilt] = config.mechanical_tilt_deg[cell] / params.mech_tilt_norm_deg;
  s[kFrequency] = (config.carrier_frequency_ghz - params.freq_min_ghz) / params.freq_span_ghz;
  s[kMeanEnbDistance] = std::clamp(
      topology::mean_distance_to_nearest_sites(layout, site, params.neighbor_count) /
          params.enb_distance_norm_m,
      0.0, 1.0);
  s[kOvershooting] = record.overshooting;
  s[kOverlapHigh] = record.overlap_high;
  s[kBadCoverage] = record.bad_coverage;
  s[kCongestion] = record.congestion_rate;
  s[kNeighborCongestion] = include_neighbors ? record.cr_neigh : 0.0;
  s[kInterference] = record.interference_indicator;
  return s;
}

}  // namespace tiltopt::kpi
