#include "tiltopt/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>

#include "tiltopt/csv.hpp"
#include "tiltopt/errors.hpp"

namespace tiltopt::topology {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

int hex_ring(int q, int r) { return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2; }

void check_range(const IntRange& range, const char* name) {
  if (range.lo > range.hi) {
    throw ConfigError(std::string("malformed range for ") + name + ": min > max");
  }
}

}  // namespace

SiteLayout generate_hex_grid(int rings, double isd_m) {
  if (rings < 0) throw ConfigError("rings must be >= 0");
  if (!(isd_m > 0.0)) throw ConfigError("inter-site distance must be > 0");

  // Enumerate axial coordinates with hex distance <= rings, ordered by
  // (ring, q, r) so generation is bit-identical across runs.
  std::vector<std::tuple<int, int, int>> coords;
  for (int q = -rings; q <= rings; ++q) {
    const int r_lo = std::max(-rings, -q - rings);
    const int r_hi = std::min(rings, -q + rings);
    for (int r = r_lo; r <= r_hi; ++r) {
      coords.emplace_back(hex_ring(q, r), q, r);
    }
  }
  std::sort(coords.begin(), coords.end());

  SiteLayout layout;
  layout.rings = rings;
  layout.inter_site_distance = isd_m;
  layout.sites.reserve(coords.size());
  for (const auto& [ring, q, r] : coords) {
    Site site;
    site.x = isd_m * (q + 0.5 * r);
    site.y = isd_m * (kSqrt3 / 2.0) * r;
    site.ring = ring;
    layout.sites.push_back(site);
  }
  layout.cells.reserve(layout.sites.size() * 3);
  for (SiteId s = 0; s < static_cast<SiteId>(layout.sites.size()); ++s) {
    for (double az : {0.0, 120.0, 240.0}) {
      layout.cells.push_back(Cell{s, az});
    }
  }
  return layout;
}

std::vector<CellId> optimized_cells(const SiteLayout& layout, int optimized_rings) {
  if (optimized_rings < 0) throw ConfigError("optimized_rings must be >= 0");
  if (optimized_rings >= layout.rings) {
    throw ConfigError("optimized_rings must be < layout rings (no buffer ring would remain)");
  }
  std::vector<CellId> ids;
  for (CellId c = 0; c < static_cast<CellId>(layout.cells.size()); ++c) {
    if (layout.sites[layout.cells[c].site].ring <= optimized_rings) ids.push_back(c);
  }
  return ids;
}

EpisodeConfig sample_episode_config(const SiteLayout& layout,
                                    const std::vector<CellId>& optimized,
                                    const ParameterRanges& ranges, uint64_t seed) {
  check_range(ranges.tilt_optimized, "tilt_optimized");
  check_range(ranges.tilt_fixed, "tilt_fixed");
  check_range(ranges.mechanical_tilt, "mechanical_tilt");
  check_range(ranges.antenna_height, "antenna_height");
  check_range(ranges.inter_site_distance, "inter_site_distance");
  check_range(ranges.offered_traffic, "offered_traffic");
  if (ranges.carrier_frequencies_ghz.empty()) {
    throw ConfigError("carrier_frequencies_ghz must not be empty");
  }

  const std::size_t n_cells = layout.cells.size();
  std::vector<char> is_optimized(n_cells, 0);
  for (CellId c : optimized) {
    if (c < 0 || static_cast<std::size_t>(c) >= n_cells) {
      throw ConfigError("optimized cell id out of range");
    }
    is_optimized[static_cast<std::size_t>(c)] = 1;
  }

  Rng rng(seed);
  EpisodeConfig cfg;
  cfg.rng_seed = seed;
  cfg.optimized_cells = optimized;
  cfg.inter_site_distance_m =
      static_cast<double>(rng.uniform_int(ranges.inter_site_distance.lo, ranges.inter_site_distance.hi));
  cfg.carrier_frequency_ghz =
      ranges.carrier_frequencies_ghz[rng.index(ranges.carrier_frequencies_ghz.size())];

  cfg.electrical_tilt_deg.resize(n_cells);
  cfg.mechanical_tilt_deg.resize(n_cells);
  cfg.antenna_height_m.resize(n_cells);
  cfg.offered_traffic_mbps.resize(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    const IntRange& tilt = is_optimized[c] ? ranges.tilt_optimized : ranges.tilt_fixed;
    cfg.electrical_tilt_deg[c] = static_cast<double>(rng.uniform_int(tilt.lo, tilt.hi));
  }
  for (std::size_t c = 0; c < n_cells; ++c) {
    cfg.mechanical_tilt_deg[c] =
        static_cast<double>(rng.uniform_int(ranges.mechanical_tilt.lo, ranges.mechanical_tilt.hi));
  }
  for (std::size_t c = 0; c < n_cells; ++c) {
    cfg.antenna_height_m[c] =
        static_cast<double>(rng.uniform_int(ranges.antenna_height.lo, ranges.antenna_height.hi));
  }
  for (std::size_t c = 0; c < n_cells; ++c) {
    cfg.offered_traffic_mbps[c] =
        static_cast<double>(rng.uniform_int(ranges.offered_traffic.lo, ranges.offered_traffic.hi));
  }
  return cfg;
}

double mean_distance_to_nearest_sites(const SiteLayout& layout, SiteId site, int count) {
  const std::size_t n = layout.sites.size();
  if (n <= 1) {
    // Single-site layout: no neighbors; report the coverage span instead so
    // the normalized feature saturates rather than reading as "very close".
    return (layout.rings + 0.5) * layout.inter_site_distance;
  }
  std::vector<double> dist;
  dist.reserve(n - 1);
  const Site& s = layout.sites[site];
  for (std::size_t j = 0; j < n; ++j) {
    if (static_cast<SiteId>(j) == site) continue;
    dist.push_back(std::hypot(layout.sites[j].x - s.x, layout.sites[j].y - s.y));
  }
  std::sort(dist.begin(), dist.end());
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(count), dist.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += dist[i];
  return sum / static_cast<double>(k);
}

std::string layout_csv(const SiteLayout& layout) {
  std::string out = "site_id,cell_id,x,y,azimuth_deg\n";
  for (CellId c = 0; c < static_cast<CellId>(layout.cells.size()); ++c) {
    const Cell& cell = layout.cells[c];
    const Site& site = layout.sites[cell.site];
    out += csv::num(static_cast<int64_t>(cell.site));
    out += ',';
    out += csv::num(static_cast<int64_t>(c));
    out += ',';
    out += csv::num(site.x);
    out += ',';
    out += csv::num(site.y);
    out += ',';
    out += csv::num(cell.azimuth_deg);
    out += '\n';
  }
  return out;
}

}  // namespace tiltopt::topology
