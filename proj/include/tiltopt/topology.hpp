#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tiltopt/rng.hpp"

namespace tiltopt::topology {

using SiteId = int;
using CellId = int;

struct Site {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
  int ring = 0;    // hex ring index, 0 = center site
};

struct Cell {
  SiteId site = 0;
  double azimuth_deg = 0.0;  // counter-clockwise from +x; one of 0/120/240
};

// Regular hexagonal multi-ring layout with three sector cells per site.
// Cell id = index into cells; cells of site s are 3s, 3s+1, 3s+2.
struct SiteLayout {
  std::vector<Site> sites;
  std::vector<Cell> cells;
  int rings = 0;
  double inter_site_distance = 0.0;  // meters
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

// Per-episode sampling ranges. All integer ranges are discrete uniform with
// step 1 over the closed interval.
struct ParameterRanges {
  IntRange tilt_optimized{0, 15};        // deg
  IntRange tilt_fixed{4, 6};             // deg
  IntRange mechanical_tilt{0, 4};        // deg
  IntRange antenna_height{16, 30};       // m
  IntRange inter_site_distance{1000, 2500};  // m
  IntRange offered_traffic{4, 11};       // Mbps, mean per cell
  std::vector<double> carrier_frequencies_ghz{0.7, 1.8, 2.1, 2.6};
};

struct EpisodeConfig {
  std::vector<double> electrical_tilt_deg;   // per cell
  std::vector<double> mechanical_tilt_deg;   // per cell
  std::vector<double> antenna_height_m;      // per cell
  std::vector<double> offered_traffic_mbps;  // per cell
  double carrier_frequency_ghz = 0.0;        // network-wide
  double inter_site_distance_m = 0.0;        // network-wide
  std::vector<CellId> optimized_cells;       // sorted ascending
  uint64_t rng_seed = 0;
};

// Hex grid centered at the origin, flat-topped rows with axial coordinates.
// Site count is 1 + 3*r*(r+1); minimum pairwise distance equals isd.
SiteLayout generate_hex_grid(int rings, double isd_m);

// Cells of all sites in rings 0..optimized_rings inclusive, ids ascending.
// Requires optimized_rings < layout.rings so a fixed-tilt buffer ring remains.
std::vector<CellId> optimized_cells(const SiteLayout& layout, int optimized_rings);

// Draws a fresh episode configuration. Deterministic in the seed; draw order
// is fixed: isd, carrier, then per cell tilt / mech tilt / height / traffic.
EpisodeConfig sample_episode_config(const SiteLayout& layout,
                                    const std::vector<CellId>& optimized,
                                    const ParameterRanges& ranges, uint64_t seed);

// Mean distance from a site to its `count` nearest other sites, or the
// network span when the layout has a single site.
double mean_distance_to_nearest_sites(const SiteLayout& layout, SiteId site, int count);

// Debug/plot export: site_id,cell_id,x,y,azimuth_deg.
std::string layout_csv(const SiteLayout& layout);

}  // namespace tiltopt::topology
