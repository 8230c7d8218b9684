#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tiltopt/topology.hpp"

namespace tiltopt::radiosim {

// Link-budget constants. The values below are conventional macro-cell
// figures; everything is configurable so sensitivity can be explored.
struct RadioParams {
  double bandwidth_mhz = 20.0;
  double tx_power_dbm = 46.0;  // total cell power, spread evenly over the band
  double noise_figure_db = 9.0;
  double max_gain_dbi = 15.0;
  double horizontal_beamwidth_deg = 65.0;
  double vertical_beamwidth_deg = 10.0;
  double pattern_floor_db = 30.0;  // per-cut and total attenuation limit
  double ue_height_m = 1.5;
  double min_distance_m = 10.0;  // path-loss distance clamp
  double per_ue_demand_mbps = 1.0;
  double spectral_efficiency_cap = 6.0;  // bit/s/Hz, truncated Shannon

  // LTE-style numerology: 5 PRB per MHz, 12 subcarriers of 15 kHz each.
  double subcarriers() const { return bandwidth_mhz * 60.0; }
  double tx_power_per_re_dbm() const;
  double noise_per_re_dbm() const;  // thermal + noise figure over 15 kHz
};

struct UeDrop {
  std::vector<double> x;  // meters
  std::vector<double> y;
  double per_ue_demand_mbps = 1.0;
  uint64_t rng_seed = 0;
  int size() const { return static_cast<int>(x.size()); }
};

// One static Monte Carlo evaluation of the network.
struct RadioSnapshot {
  int n_ues = 0;
  int n_cells = 0;
  std::vector<double> ue_x;             // copied from the drop
  std::vector<double> ue_y;
  std::vector<double> rsrp_dbm;         // row-major [ue * n_cells + cell]
  std::vector<int> serving;             // per UE, argmax RSRP (ties: lowest id)
  std::vector<double> sinr_db;          // per UE, on the serving link
  std::vector<double> throughput_mbps;  // per UE, equal-share truncated Shannon
  std::vector<double> served_mbps;      // per cell
  std::vector<double> offered_mbps;     // per cell, sum of attached UE demand
  std::vector<double> congestion;       // per cell, 1 - served/offered (0 if idle)
  std::vector<int> ue_count;            // per cell

  double rsrp(int ue, int cell) const { return rsrp_dbm[static_cast<std::size_t>(ue) * n_cells + cell]; }
};

// 3GPP-macro-like pattern: per-cut parabolic attenuation with a 30 dB floor.
// Offsets are relative to boresight; callers pre-subtract the total downtilt
// (mechanical + electrical) from the UE elevation angle.
double antenna_gain_dbi(double horizontal_off_deg, double vertical_off_deg,
                        const RadioParams& params = {});

// COST-231-Hata-style urban macro loss; distance clamped below min_distance.
double path_loss_db(double distance_m, double frequency_ghz, double bs_height_m,
                    double min_distance_m = 10.0);

// Hexagonal coverage region: all sites plus half an inter-site distance.
bool region_contains(const topology::SiteLayout& layout, double x, double y);

// UE count = round(total offered traffic / per-UE demand); positions uniform
// over the coverage region by rejection sampling.
UeDrop drop_users(const topology::SiteLayout& layout, const topology::EpisodeConfig& config,
                  const RadioParams& params, uint64_t seed);

RadioSnapshot evaluate_snapshot(const topology::SiteLayout& layout,
                                const topology::EpisodeConfig& config, const UeDrop& drop,
                                const RadioParams& params);

// Debug dump: ue_id,x,y,serving,rsrp_serving,sinr,throughput.
std::string snapshot_csv(const RadioSnapshot& snapshot, const UeDrop& drop);

}  // namespace tiltopt::radiosim
