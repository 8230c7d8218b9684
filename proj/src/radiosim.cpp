#include "tiltopt/radiosim.hpp"

#include <algorithm>
#include <cmath>

#include "tiltopt/csv.hpp"
#include "tiltopt/errors.hpp"

namespace tiltopt::radiosim {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kDegPerRad = 57.29577951308232;

double wrap180(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a > 180.0) a -= 360.0;
  if (a <= -180.0) a += 360.0;
  return a;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace

double RadioParams::tx_power_per_re_dbm() const {
  return tx_power_dbm - 10.0 * std::log10(subcarriers());
}

double RadioParams::noise_per_re_dbm() const {
  return -174.0 + noise_figure_db + 10.0 * std::log10(15000.0);
}

double antenna_gain_dbi(double horizontal_off_deg, double vertical_off_deg,
                        const RadioParams& params) {
  const double h = horizontal_off_deg / params.horizontal_beamwidth_deg;
  const double v = vertical_off_deg / params.vertical_beamwidth_deg;
  const double a_h = -std::min(12.0 * h * h, params.pattern_floor_db);
  const double a_v = -std::min(12.0 * v * v, params.pattern_floor_db);
  return params.max_gain_dbi - std::min(-(a_h + a_v), params.pattern_floor_db);
}

double path_loss_db(double distance_m, double frequency_ghz, double bs_height_m,
                    double min_distance_m) {
  const double d_km = std::max(distance_m, min_distance_m) / 1000.0;
  const double f_mhz = frequency_ghz * 1000.0;
  const double log_h = std::log10(bs_height_m);
  return 46.3 + 33.9 * std::log10(f_mhz) - 13.82 * log_h +
         (44.9 - 6.55 * log_h) * std::log10(d_km);
}

bool region_contains(const topology::SiteLayout& layout, double x, double y) {
  // Flat-top hexagon with circumradius (rings + 1/2) * isd; vertices lie in
  // the ring-corner directions of the site lattice.
  const double a = (layout.rings + 0.5) * layout.inter_site_distance;
  if (std::abs(y) > kSqrt3 / 2.0 * a) return false;
  return kSqrt3 * std::abs(x) + std::abs(y) <= kSqrt3 * a;
}

UeDrop drop_users(const topology::SiteLayout& layout, const topology::EpisodeConfig& config,
                  const RadioParams& params, uint64_t seed) {
  double total_mbps = 0.0;
  for (double t : config.offered_traffic_mbps) total_mbps += t;
  const long n = std::lround(total_mbps / params.per_ue_demand_mbps);
  if (n < 1) throw ConfigError("total offered traffic rounds to zero UEs");

  const double a = (layout.rings + 0.5) * layout.inter_site_distance;
  const double half_height = kSqrt3 / 2.0 * a;

  Rng rng(seed);
  UeDrop drop;
  drop.per_ue_demand_mbps = params.per_ue_demand_mbps;
  drop.rng_seed = seed;
  drop.x.reserve(static_cast<std::size_t>(n));
  drop.y.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    for (;;) {
      const double x = rng.uniform_real(-a, a);
      const double y = rng.uniform_real(-half_height, half_height);
      if (region_contains(layout, x, y)) {
        drop.x.push_back(x);
        drop.y.push_back(y);
        break;
      }
    }
  }
  return drop;
}

RadioSnapshot evaluate_snapshot(const topology::SiteLayout& layout,
                                const topology::EpisodeConfig& config, const UeDrop& drop,
                                const RadioParams& params) {
  const int n_ues = drop.size();
  const int n_cells = static_cast<int>(layout.cells.size());

  RadioSnapshot snap;
  snap.n_ues = n_ues;
  snap.n_cells = n_cells;
  snap.ue_x = drop.x;
  snap.ue_y = drop.y;
  snap.rsrp_dbm.resize(static_cast<std::size_t>(n_ues) * n_cells);
  snap.serving.resize(n_ues);
  snap.sinr_db.resize(n_ues);
  snap.throughput_mbps.resize(n_ues);
  snap.served_mbps.assign(n_cells, 0.0);
  snap.offered_mbps.assign(n_cells, 0.0);
  snap.congestion.assign(n_cells, 0.0);
  snap.ue_count.assign(n_cells, 0);

  const double tx_re = params.tx_power_per_re_dbm();
  const double noise_mw = dbm_to_mw(params.noise_per_re_dbm());

  for (int u = 0; u < n_ues; ++u) {
    double* row = &snap.rsrp_dbm[static_cast<std::size_t>(u) * n_cells];
    int best = 0;
    for (int c = 0; c < n_cells; ++c) {
      const topology::Cell& cell = layout.cells[c];
      const topology::Site& site = layout.sites[cell.site];
      const double dx = drop.x[u] - site.x;
      const double dy = drop.y[u] - site.y;
      const double dist = std::hypot(dx, dy);
      const double bearing = std::atan2(dy, dx) * kDegPerRad;
      const double h_off = wrap180(bearing - cell.azimuth_deg);
      const double height = config.antenna_height_m[c];
      const double elev = std::atan2(height - params.ue_height_m, std::max(dist, 1e-9)) * kDegPerRad;
      const double tilt = config.mechanical_tilt_deg[c] + config.electrical_tilt_deg[c];
      const double v_off = elev - tilt;
      const double gain = antenna_gain_dbi(h_off, v_off, params);
      const double loss =
          path_loss_db(dist, config.carrier_frequency_ghz, height, params.min_distance_m);
      row[c] = tx_re + gain - loss;
      if (row[c] > row[best]) best = c;
    }
    snap.serving[u] = best;
    snap.ue_count[best] += 1;

    double interference_mw = 0.0;
    for (int c = 0; c < n_cells; ++c) {
      if (c != best) interference_mw += dbm_to_mw(row[c]);
    }
    const double signal_mw = dbm_to_mw(row[best]);
    snap.sinr_db[u] = mw_to_dbm(signal_mw / (interference_mw + noise_mw));
  }

  const double band_hz = params.bandwidth_mhz * 1e6;
  for (int u = 0; u < n_ues; ++u) {
    const int c = snap.serving[u];
    const double sinr_lin = dbm_to_mw(snap.sinr_db[u]);
    const double se = std::min(std::log2(1.0 + sinr_lin), params.spectral_efficiency_cap);
    const double share_hz = band_hz / snap.ue_count[c];
    snap.throughput_mbps[u] = share_hz * se / 1e6;
    const double served = std::min(drop.per_ue_demand_mbps, snap.throughput_mbps[u]);
    snap.served_mbps[c] += served;
    snap.offered_mbps[c] += drop.per_ue_demand_mbps;
  }
  for (int c = 0; c < n_cells; ++c) {
    if (snap.ue_count[c] > 0) {
      snap.congestion[c] = 1.0 - snap.served_mbps[c] / snap.offered_mbps[c];
      snap.congestion[c] = std::clamp(snap.congestion[c], 0.0, 1.0);
    }
  }
  return snap;
}

std::string snapshot_csv(const RadioSnapshot& snapshot, const UeDrop& drop) {
  std::string out = "ue_id,x,y,serving,rsrp_serving,sinr,throughput\n";
  for (int u = 0; u < snapshot.n_ues; ++u) {
    out += csv::num(static_cast<int64_t>(u));
    out += ',';
    out += csv::num(drop.x[u]);
    out += ',';
    out += csv::num(drop.y[u]);
    out += ',';
    out += csv::num(static_cast<int64_t>(snapshot.serving[u]));
    out += ',';
    out += csv::num(snapshot.rsrp(u, snapshot.serving[u]));
    out += ',';
    out += csv::num(snapshot.sinr_db[u]);
    out += ',';
    out += csv::num(snapshot.throughput_mbps[u]);
    out += '\n';
  }
  return out;
}

}  // namespace tiltopt::radiosim
