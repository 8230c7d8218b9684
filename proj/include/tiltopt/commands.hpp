#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tiltopt/config.hpp"

namespace tiltopt::cli {

struct CommandOptions {
  std::optional<std::string> config_path;
  std::optional<uint64_t> seed;
  std::optional<double> scale;
  std::optional<int> workers;
  std::vector<std::string> variants;  // empty = command default
  std::string out_dir = "out";
  bool debug_dump = false;
};

// Loads the config file (if any) and applies flag overrides.
CampaignConfig resolve_config(const CommandOptions& options);

void cmd_pretrain(const CommandOptions& options);
void cmd_evaluate(const CommandOptions& options);
void cmd_report(const CommandOptions& options);
void cmd_config(bool print_defaults, bool explain);

uint64_t fnv1a64(const std::string& bytes);

}  // namespace tiltopt::cli
