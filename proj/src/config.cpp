#include "tiltopt/config.hpp"

#include <cmath>
#include <set>

#include "tiltopt/csv.hpp"
#include "tiltopt/errors.hpp"

namespace tiltopt::cli {

using nlohmann::json;

namespace {

constexpr int kConfigVersion = 1;

int scaled(int episodes, double scale) {
  return std::max(1, static_cast<int>(std::lround(episodes * scale)));
}

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ConfigError("config: " + path + ": " + why);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) fail(path + "." + key, "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

topology::IntRange get_range(const json& obj, const std::string& path, const char* key,
                             topology::IntRange fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    fail(path + "." + key, "expected [min, max] integers");
  }
  topology::IntRange range{v[0].get<int>(), v[1].get<int>()};
  if (range.lo > range.hi) fail(path + "." + key, "min > max");
  return range;
}

void parse_phase(const json& obj, const std::string& path, PhaseConfig& phase) {
  check_keys(obj, path, {"rings", "optimized_rings", "episodes", "steps"});
  phase.rings = get_int(obj, path, "rings", phase.rings);
  phase.optimized_rings = get_int(obj, path, "optimized_rings", phase.optimized_rings);
  phase.episodes = get_int(obj, path, "episodes", phase.episodes);
  phase.steps = get_int(obj, path, "steps", phase.steps);
  if (phase.rings < 1) fail(path + ".rings", "must be >= 1");
  if (phase.optimized_rings < 0 || phase.optimized_rings >= phase.rings) {
    fail(path + ".optimized_rings", "must be in [0, rings)");
  }
  if (phase.episodes < 1) fail(path + ".episodes", "must be >= 1");
  if (phase.steps < 1) fail(path + ".steps", "must be >= 1");
}

json range_json(const topology::IntRange& r) { return json::array({r.lo, r.hi}); }

}  // namespace

int CampaignConfig::scaled_train_episodes() const { return scaled(train.episodes, scale); }
int CampaignConfig::scaled_test_episodes() const { return scaled(test.episodes, scale); }

CampaignConfig default_config() { return CampaignConfig{}; }

json to_json(const CampaignConfig& c) {
  json doc;
  doc["version"] = kConfigVersion;
  doc["seed"] = c.seed;
  doc["scale"] = c.scale;
  doc["workers"] = c.workers;
  doc["train"] = {{"rings", c.train.rings},
                  {"optimized_rings", c.train.optimized_rings},
                  {"episodes", c.train.episodes},
                  {"steps", c.train.steps}};
  doc["test"] = {{"rings", c.test.rings},
                 {"optimized_rings", c.test.optimized_rings},
                 {"episodes", c.test.episodes},
                 {"steps", c.test.steps}};
  doc["ranges"] = {{"tilt_optimized", range_json(c.sim.ranges.tilt_optimized)},
                   {"tilt_fixed", range_json(c.sim.ranges.tilt_fixed)},
                   {"mechanical_tilt", range_json(c.sim.ranges.mechanical_tilt)},
                   {"antenna_height", range_json(c.sim.ranges.antenna_height)},
                   {"inter_site_distance", range_json(c.sim.ranges.inter_site_distance)},
                   {"offered_traffic", range_json(c.sim.ranges.offered_traffic)},
                   {"carrier_frequencies_ghz", c.sim.ranges.carrier_frequencies_ghz}};
  doc["radio"] = {{"bandwidth_mhz", c.sim.radio.bandwidth_mhz},
                  {"tx_power_dbm", c.sim.radio.tx_power_dbm},
                  {"noise_figure_db", c.sim.radio.noise_figure_db},
                  {"max_gain_dbi", c.sim.radio.max_gain_dbi},
                  {"horizontal_beamwidth_deg", c.sim.radio.horizontal_beamwidth_deg},
                  {"vertical_beamwidth_deg", c.sim.radio.vertical_beamwidth_deg},
                  {"pattern_floor_db", c.sim.radio.pattern_floor_db},
                  {"ue_height_m", c.sim.radio.ue_height_m},
                  {"min_distance_m", c.sim.radio.min_distance_m},
                  {"per_ue_demand_mbps", c.sim.radio.per_ue_demand_mbps},
                  {"spectral_efficiency_cap", c.sim.radio.spectral_efficiency_cap}};
  doc["kpi"] = {{"good_coverage_rsrp_dbm", c.sim.kpi.good_coverage_rsrp_dbm},
                {"good_quality_sinr_db", c.sim.kpi.good_quality_sinr_db},
                {"overlap_window_db", c.sim.kpi.overlap_window_db},
                {"overlap_high_rsrp_dbm", c.sim.kpi.overlap_high_rsrp_dbm},
                {"overshoot_isd_factor", c.sim.kpi.overshoot_isd_factor},
                {"neighbor_count", c.sim.kpi.neighbor_count}};
  doc["rl"] = {{"hidden", c.rl.hidden},
               {"learning_rate", c.rl.adam.learning_rate},
               {"batch_size", c.rl.batch_size},
               {"buffer_capacity", c.rl.buffer_capacity},
               {"epsilon_start", c.rl.epsilon_start},
               {"epsilon_end", c.rl.epsilon_end},
               {"epsilon_decay_fraction", c.rl.epsilon_decay_fraction},
               {"reward_clip", c.rl.reward_clip}};
  doc["expert"] = {{"bad_coverage_high", c.sim.expert.bad_coverage_high},
                   {"overshooting_high", c.sim.expert.overshooting_high},
                   {"overlap_high_thr", c.sim.expert.overlap_high_thr},
                   {"congestion_high", c.sim.expert.congestion_high}};
  doc["rlinplus"] = {{"freeze_heuristic", c.rlinplus_freeze_heuristic}};
  return doc;
}

CampaignConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  check_keys(doc, "config",
             {"version", "seed", "scale", "workers", "train", "test", "ranges", "radio", "kpi",
              "rl", "expert", "rlinplus"});
  CampaignConfig c = default_config();
  if (doc.contains("version")) {
    if (!doc.at("version").is_number_integer() || doc.at("version").get<int>() != kConfigVersion) {
      fail("config.version", "unsupported version (expected 1)");
    }
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer()) {
      fail("config.seed", "expected an integer");
    }
    c.seed = doc.at("seed").get<uint64_t>();
  }
  c.scale = get_number(doc, "config", "scale", c.scale);
  if (!(c.scale > 0.0)) fail("config.scale", "must be > 0");
  c.workers = get_int(doc, "config", "workers", c.workers);
  if (c.workers < 1) fail("config.workers", "must be >= 1");

  if (doc.contains("train")) parse_phase(doc.at("train"), "config.train", c.train);
  if (doc.contains("test")) parse_phase(doc.at("test"), "config.test", c.test);

  if (doc.contains("ranges")) {
    const json& r = doc.at("ranges");
    const std::string p = "config.ranges";
    check_keys(r, p,
               {"tilt_optimized", "tilt_fixed", "mechanical_tilt", "antenna_height",
                "inter_site_distance", "offered_traffic", "carrier_frequencies_ghz"});
    auto& ranges = c.sim.ranges;
    ranges.tilt_optimized = get_range(r, p, "tilt_optimized", ranges.tilt_optimized);
    ranges.tilt_fixed = get_range(r, p, "tilt_fixed", ranges.tilt_fixed);
    ranges.mechanical_tilt = get_range(r, p, "mechanical_tilt", ranges.mechanical_tilt);
    ranges.antenna_height = get_range(r, p, "antenna_height", ranges.antenna_height);
    ranges.inter_site_distance = get_range(r, p, "inter_site_distance", ranges.inter_site_distance);
    ranges.offered_traffic = get_range(r, p, "offered_traffic", ranges.offered_traffic);
    if (r.contains("carrier_frequencies_ghz")) {
      const json& freqs = r.at("carrier_frequencies_ghz");
      if (!freqs.is_array() || freqs.empty()) fail(p + ".carrier_frequencies_ghz", "expected a non-empty array");
      ranges.carrier_frequencies_ghz.clear();
      for (const json& f : freqs) {
        if (!f.is_number()) fail(p + ".carrier_frequencies_ghz", "expected numbers");
        ranges.carrier_frequencies_ghz.push_back(f.get<double>());
      }
    }
  }

  if (doc.contains("radio")) {
    const json& r = doc.at("radio");
    const std::string p = "config.radio";
    check_keys(r, p,
               {"bandwidth_mhz", "tx_power_dbm", "noise_figure_db", "max_gain_dbi",
                "horizontal_beamwidth_deg", "vertical_beamwidth_deg", "pattern_floor_db",
                "ue_height_m", "min_distance_m", "per_ue_demand_mbps", "spectral_efficiency_cap"});
    auto& radio = c.sim.radio;
    radio.bandwidth_mhz = get_number(r, p, "bandwidth_mhz", radio.bandwidth_mhz);
    radio.tx_power_dbm = get_number(r, p, "tx_power_dbm", radio.tx_power_dbm);
    radio.noise_figure_db = get_number(r, p, "noise_figure_db", radio.noise_figure_db);
    radio.max_gain_dbi = get_number(r, p, "max_gain_dbi", radio.max_gain_dbi);
    radio.horizontal_beamwidth_deg =
        get_number(r, p, "horizontal_beamwidth_deg", radio.horizontal_beamwidth_deg);
    radio.vertical_beamwidth_deg =
        get_number(r, p, "vertical_beamwidth_deg", radio.vertical_beamwidth_deg);
    radio.pattern_floor_db = get_number(r, p, "pattern_floor_db", radio.pattern_floor_db);
    radio.ue_height_m = get_number(r, p, "ue_height_m", radio.ue_height_m);
    radio.min_distance_m = get_number(r, p, "min_distance_m", radio.min_distance_m);
    radio.per_ue_demand_mbps = get_number(r, p, "per_ue_demand_mbps", radio.per_ue_demand_mbps);
    radio.spectral_efficiency_cap =
        get_number(r, p, "spectral_efficiency_cap", radio.spectral_efficiency_cap);
    if (!(radio.bandwidth_mhz > 0)) fail(p + ".bandwidth_mhz", "must be > 0");
    if (!(radio.per_ue_demand_mbps > 0)) fail(p + ".per_ue_demand_mbps", "must be > 0");
  }

  if (doc.contains("kpi")) {
    const json& r = doc.at("kpi");
    const std::string p = "config.kpi";
    check_keys(r, p,
               {"good_coverage_rsrp_dbm", "good_quality_sinr_db", "overlap_window_db",
                "overlap_high_rsrp_dbm", "overshoot_isd_factor", "neighbor_count"});
    auto& k = c.sim.kpi;
    k.good_coverage_rsrp_dbm = get_number(r, p, "good_coverage_rsrp_dbm", k.good_coverage_rsrp_dbm);
    k.good_quality_sinr_db = get_number(r, p, "good_quality_sinr_db", k.good_quality_sinr_db);
    k.overlap_window_db = get_number(r, p, "overlap_window_db", k.overlap_window_db);
    k.overlap_high_rsrp_dbm = get_number(r, p, "overlap_high_rsrp_dbm", k.overlap_high_rsrp_dbm);
    k.overshoot_isd_factor = get_number(r, p, "overshoot_isd_factor", k.overshoot_isd_factor);
    k.neighbor_count = get_int(r, p, "neighbor_count", k.neighbor_count);
    if (k.neighbor_count < 1) fail(p + ".neighbor_count", "must be >= 1");
  }

  if (doc.contains("rl")) {
    const json& r = doc.at("rl");
    const std::string p = "config.rl";
    check_keys(r, p,
               {"hidden", "learning_rate", "batch_size", "buffer_capacity", "epsilon_start",
                "epsilon_end", "epsilon_decay_fraction", "reward_clip"});
    auto& rl = c.rl;
    if (r.contains("hidden")) {
      const json& hidden = r.at("hidden");
      if (!hidden.is_array() || hidden.empty()) fail(p + ".hidden", "expected a non-empty array");
      rl.hidden.clear();
      for (const json& h : hidden) {
        if (!h.is_number_integer() || h.get<int>() < 1) fail(p + ".hidden", "expected positive integers");
        rl.hidden.push_back(h.get<int>());
      }
    }
    rl.adam.learning_rate = get_number(r, p, "learning_rate", rl.adam.learning_rate);
    rl.batch_size = get_int(r, p, "batch_size", rl.batch_size);
    if (r.contains("buffer_capacity")) {
      if (!r.at("buffer_capacity").is_number_integer() || r.at("buffer_capacity").get<int64_t>() < 1) {
        fail(p + ".buffer_capacity", "must be a positive integer");
      }
      rl.buffer_capacity = r.at("buffer_capacity").get<std::size_t>();
    }
    rl.epsilon_start = get_number(r, p, "epsilon_start", rl.epsilon_start);
    rl.epsilon_end = get_number(r, p, "epsilon_end", rl.epsilon_end);
    rl.epsilon_decay_fraction = get_number(r, p, "epsilon_decay_fraction", rl.epsilon_decay_fraction);
    rl.reward_clip = get_number(r, p, "reward_clip", rl.reward_clip);
    if (rl.batch_size < 1) fail(p + ".batch_size", "must be >= 1");
    if (rl.epsilon_start < 0 || rl.epsilon_start > 1) fail(p + ".epsilon_start", "must be in [0,1]");
    if (rl.epsilon_end < 0 || rl.epsilon_end > 1) fail(p + ".epsilon_end", "must be in [0,1]");
    if (!(rl.epsilon_decay_fraction > 0) || rl.epsilon_decay_fraction > 1) {
      fail(p + ".epsilon_decay_fraction", "must be in (0,1]");
    }
    if (!(rl.reward_clip > 0)) fail(p + ".reward_clip", "must be > 0");
  }

  if (doc.contains("expert")) {
    const json& r = doc.at("expert");
    const std::string p = "config.expert";
    check_keys(r, p, {"bad_coverage_high", "overshooting_high", "overlap_high_thr", "congestion_high"});
    auto& e = c.sim.expert;
    e.bad_coverage_high = get_number(r, p, "bad_coverage_high", e.bad_coverage_high);
    e.overshooting_high = get_number(r, p, "overshooting_high", e.overshooting_high);
    e.overlap_high_thr = get_number(r, p, "overlap_high_thr", e.overlap_high_thr);
    e.congestion_high = get_number(r, p, "congestion_high", e.congestion_high);
    for (double v : {e.bad_coverage_high, e.overshooting_high, e.overlap_high_thr, e.congestion_high}) {
      if (v < 0 || v > 1) fail(p, "thresholds must be in [0,1]");
    }
  }

  if (doc.contains("rlinplus")) {
    const json& r = doc.at("rlinplus");
    check_keys(r, "config.rlinplus", {"freeze_heuristic"});
    c.rlinplus_freeze_heuristic =
        get_bool(r, "config.rlinplus", "freeze_heuristic", c.rlinplus_freeze_heuristic);
  }
  return c;
}

CampaignConfig load_config_file(const std::string& path) {
  json doc;
  try {
    doc = json::parse(csv::read_text(path));
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + ": JSON parse error: " + e.what());
  }
  return config_from_json(doc);
}

std::string explain_config() {
  static constexpr const char* rows[][3] = {
      {"version", "1", "config schema version"},
      {"seed", "1", "master seed; all campaign randomness derives from it"},
      {"scale", "0.1", "multiplies train/test episode counts (min 1 episode)"},
      {"workers", "1", "worker threads for frozen-policy evaluation episodes"},
      {"train.rings", "2", "site rings in the pre-training layout (19 sites)"},
      {"train.optimized_rings", "1", "rings whose cells are optimized during pre-training"},
      {"train.episodes", "500", "pre-training episodes before scaling"},
      {"train.steps", "20", "optimization steps per episode"},
      {"test.rings", "5", "site rings in the evaluation layout (91 sites)"},
      {"test.optimized_rings", "3", "rings whose cells are optimized during evaluation"},
      {"test.episodes", "300", "evaluation episodes before scaling"},
      {"test.steps", "20", "optimization steps per episode"},
      {"ranges.tilt_optimized", "[0, 15]", "initial electrical tilt of optimized cells, deg"},
      {"ranges.tilt_fixed", "[4, 6]", "electrical tilt of non-optimized cells, deg"},
      {"ranges.mechanical_tilt", "[0, 4]", "per-cell mechanical tilt, deg"},
      {"ranges.antenna_height", "[16, 30]", "per-cell antenna height, m"},
      {"ranges.inter_site_distance", "[1000, 2500]", "network-wide inter-site distance, m"},
      {"ranges.offered_traffic", "[4, 11]", "per-cell mean offered traffic, Mbps"},
      {"ranges.carrier_frequencies_ghz", "[0.7, 1.8, 2.1, 2.6]",
       "single network-wide carrier drawn uniformly per episode"},
      {"radio.bandwidth_mhz", "20", "system bandwidth"},
      {"radio.tx_power_dbm", "46", "total cell transmit power, spread over the band"},
      {"radio.noise_figure_db", "9", "UE receiver noise figure"},
      {"radio.max_gain_dbi", "15", "antenna boresight gain"},
      {"radio.horizontal_beamwidth_deg", "65", "horizontal 3 dB beamwidth"},
      {"radio.vertical_beamwidth_deg", "10", "vertical 3 dB beamwidth"},
      {"radio.pattern_floor_db", "30", "per-cut and total pattern attenuation floor"},
      {"radio.ue_height_m", "1.5", "UE antenna height"},
      {"radio.min_distance_m", "10", "path-loss distance clamp"},
      {"radio.per_ue_demand_mbps", "1", "demand represented by one dropped UE"},
      {"radio.spectral_efficiency_cap", "6", "truncated-Shannon cap, bit/s/Hz"},
      {"kpi.good_coverage_rsrp_dbm", "-108", "good-coverage RSRP threshold"},
      {"kpi.good_quality_sinr_db", "3", "good-quality SINR threshold"},
      {"kpi.overlap_window_db", "6", "neighbor report window below serving RSRP"},
      {"kpi.overlap_high_rsrp_dbm", "-98", "RSRP floor for high-level overlap"},
      {"kpi.overshoot_isd_factor", "1.5", "overshooting distance threshold, x ISD"},
      {"kpi.neighbor_count", "5", "neighbors in weighted aggregates and distance feature"},
      {"rl.hidden", "[64, 64]", "hidden layer sizes of the shared Q-network"},
      {"rl.learning_rate", "0.001", "adaptive-moment step size"},
      {"rl.batch_size", "64", "replay mini-batch size"},
      {"rl.buffer_capacity", "100000", "experience replay capacity (FIFO)"},
      {"rl.epsilon_start", "1", "initial exploration rate during pre-training"},
      {"rl.epsilon_end", "0.05", "floor exploration rate during pre-training"},
      {"rl.epsilon_decay_fraction", "0.5", "fraction of env steps spent decaying epsilon"},
      {"rl.reward_clip", "1000", "reward magnitude clip before storage"},
      {"expert.bad_coverage_high", "0.1", "expert rule 1: bad coverage above this uptilts"},
      {"expert.overshooting_high", "0.15", "expert rule 2: overshooting above this downtilts"},
      {"expert.overlap_high_thr", "0.3", "expert rule 2: overlap/interference above this downtilts"},
      {"expert.congestion_high", "0.05", "expert rule 1: congestion above this uptilts"},
      {"rlinplus.freeze_heuristic", "false",
       "skip learning on cells with settled or oscillating actions (RLIN+ only)"},
  };
  std::string out;
  for (const auto& row : rows) {
    out += row[0];
    out += " = ";
    out += row[1];
    out += "\n    ";
    out += row[2];
    out += '\n';
  }
  return out;
}

}  // namespace tiltopt::cli
