#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "tiltopt/marl.hpp"

namespace tiltopt::cli {

struct PhaseConfig {
  int rings = 2;
  int optimized_rings = 1;
  int episodes = 500;
  int steps = 20;
};

// Full campaign configuration. Defaults reproduce the published setup; the
// scale factor shrinks episode counts for desk-scale runs while keeping the
// per-episode structure identical.
struct CampaignConfig {
  uint64_t seed = 1;
  double scale = 0.1;
  int workers = 1;
  PhaseConfig train{2, 1, 500, 20};
  PhaseConfig test{5, 3, 300, 20};
  marl::SimParams sim{};
  marl::RlParams rl{};
  bool rlinplus_freeze_heuristic = false;

  int scaled_train_episodes() const;
  int scaled_test_episodes() const;
};

CampaignConfig default_config();

nlohmann::json to_json(const CampaignConfig& config);

// Parses a (possibly partial) JSON document over the defaults. Unknown keys,
// wrong types, and out-of-range values raise ConfigError with the offending
// path.
CampaignConfig config_from_json(const nlohmann::json& doc);

CampaignConfig load_config_file(const std::string& path);

// One line per field: dotted path, default value, description.
std::string explain_config();

}  // namespace tiltopt::cli
