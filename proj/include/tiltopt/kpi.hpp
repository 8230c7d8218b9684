#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "tiltopt/radiosim.hpp"

namespace tiltopt::kpi {

struct KpiParams {
  double good_coverage_rsrp_dbm = -108.0;
  double good_quality_sinr_db = 3.0;
  double overlap_window_db = 6.0;        // neighbor-report window
  double overlap_high_rsrp_dbm = -98.0;  // coverage threshold + 10 dB
  double overshoot_isd_factor = 1.5;
  int neighbor_count = 5;

  // State normalization ranges.
  double height_norm_m = 30.0;
  double tilt_norm_deg = 15.0;
  double mech_tilt_norm_deg = 4.0;
  double freq_min_ghz = 0.7;
  double freq_span_ghz = 1.9;
  double enb_distance_norm_m = 5000.0;
};

// Per-cell KPIs. Traffic ratios are over the cell's served UEs; a cell with
// no UEs reports every ratio as 0 (no traffic, nothing good or bad).
struct KpiRecord {
  double good_traffic = 0.0;     // GT: good coverage and good quality
  double congestion_rate = 0.0;  // CR: unserved fraction of offered traffic
  double good_coverage = 0.0;
  double good_quality = 0.0;
  double overshooting = 0.0;
  double overlap_high = 0.0;
  double bad_coverage = 0.0;
  double interference_indicator = 0.0;
  double gt_neigh = 0.0;  // overlap-weighted neighbor aggregates
  double cr_neigh = 0.0;
};

using StateVector = std::array<double, 11>;

enum StateFeature : int {
  kHeight = 0,
  kTilt,
  kMechTilt,
  kFrequency,
  kMeanEnbDistance,
  kOvershooting,
  kOverlapHigh,
  kBadCoverage,
  kCongestion,
  kNeighborCongestion,
  kInterference,
};

// Pairwise overlapping factors: fraction of cell i's served UEs that also
// receive cell j within the report window.
class OverlapMatrix {
 public:
  OverlapMatrix() = default;
  OverlapMatrix(int n_cells) : n_(n_cells), factors_(static_cast<std::size_t>(n_cells) * n_cells, 0.0) {}
  double at(int i, int j) const { return factors_[static_cast<std::size_t>(i) * n_ + j]; }
  double& at(int i, int j) { return factors_[static_cast<std::size_t>(i) * n_ + j]; }
  int size() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> factors_;
};

double overlapping_factor(const radiosim::RadioSnapshot& snap, int cell_i, int cell_j,
                          double window_db);
OverlapMatrix compute_overlap(const radiosim::RadioSnapshot& snap, double window_db);

// Local KPIs only; gt_neigh/cr_neigh are left at the cell's own values until
// neighbor aggregation runs.
KpiRecord cell_kpis(const radiosim::RadioSnapshot& snap, const topology::SiteLayout& layout,
                    const topology::EpisodeConfig& config, int cell, const KpiParams& params);

// Weighted mean of (GT, CR) over the neighbor_count neighbors with the
// highest overlapping factor; falls back to the cell's own values when no
// neighbor overlaps.
std::pair<double, double> neighbor_aggregates(std::span<const KpiRecord> all,
                                              const OverlapMatrix& overlap, int cell,
                                              int neighbor_count);

// All cells' KPIs with neighbor aggregates filled in.
std::vector<KpiRecord> compute_cell_kpis(const radiosim::RadioSnapshot& snap,
                                         const topology::SiteLayout& layout,
                                         const topology::EpisodeConfig& config,
                                         const KpiParams& params);

// RM = 1 + 0.5 * (GT + GT_neigh - CR - CR_neigh), in [0, 2].
double reward_metric(const KpiRecord& record);

// Neighbor-blind view: substitutes the cell's own GT/CR for the aggregates.
KpiRecord without_neighbor_info(KpiRecord record);

// R = 1000 * (rm_after - rm_before) / max(rm_before, 0.01).
double reward(double rm_before, double rm_after);

StateVector build_state(const topology::SiteLayout& layout, const topology::EpisodeConfig& config,
                        const KpiRecord& record, int cell, bool include_neighbors,
                        const KpiParams& params);

}  // namespace tiltopt::kpi
