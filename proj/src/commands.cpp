#include "tiltopt/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

#include "tiltopt/csv.hpp"
#include "tiltopt/errors.hpp"
#include "tiltopt/report.hpp"
#include "tiltopt/svg.hpp"
#include "tiltopt/trace_io.hpp"

namespace tiltopt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string checkpoint_path(const std::string& out_dir, marl::Variant v) {
  // RLIN+ continues from the RLIN checkpoint.
  const marl::Variant base = v == marl::Variant::RLINPlus ? marl::Variant::RLIN : v;
  return out_dir + "/checkpoint_" + marl::to_string(base) + ".json";
}

std::vector<marl::Variant> parse_variants(const std::vector<std::string>& names,
                                          std::initializer_list<marl::Variant> fallback) {
  std::vector<marl::Variant> variants;
  if (names.empty()) {
    variants.assign(fallback);
  } else {
    for (const std::string& n : names) variants.push_back(marl::variant_from_string(n));
  }
  // Canonical order, deduplicated, so outputs do not depend on flag order.
  std::sort(variants.begin(), variants.end());
  variants.erase(std::unique(variants.begin(), variants.end()), variants.end());
  return variants;
}

marl::CampaignSpec make_spec(const CampaignConfig& config, const PhaseConfig& phase,
                             int episodes, marl::Variant variant,
                             marl::CampaignSpec::Mode mode) {
  marl::CampaignSpec spec;
  spec.variant = variant;
  spec.mode = mode;
  spec.episodes = episodes;
  spec.steps_per_episode = phase.steps;
  spec.rings = phase.rings;
  spec.optimized_rings = phase.optimized_rings;
  spec.seed = config.seed;
  spec.workers = config.workers;
  spec.freeze_heuristic =
      variant == marl::Variant::RLINPlus && config.rlinplus_freeze_heuristic;
  spec.sim = config.sim;
  spec.rl = config.rl;
  return spec;
}

void update_manifest(const std::string& out_dir, const std::string& section, json entry) {
  const std::string path = out_dir + "/manifest.json";
  json manifest;
  if (fs::exists(path)) {
    try {
      manifest = json::parse(csv::read_text(path));
    } catch (...) {
      manifest = json();
    }
  }
  if (!manifest.is_object()) manifest = json::object();
  manifest["version"] = 1;
  manifest["campaigns"][section] = std::move(entry);
  csv::write_file(path, manifest.dump(2) + "\n");
}

// 100-step windows, matching the published training-curve smoothing.
constexpr int kLogWindow = 100;

void write_training_svg(const std::string& path, const std::vector<marl::TrainingLogRow>& log) {
  std::vector<double> losses, rewards;
  losses.reserve(log.size());
  rewards.reserve(log.size());
  for (const auto& row : log) {
    losses.push_back(row.loss);
    rewards.push_back(row.mean_reward);
  }
  svg::Series loss_series{"loss (windowed)", "#c0392b", false, report::windowed_mean(losses, kLogWindow), {}, {}};
  svg::Series reward_series{"reward (windowed)", "#2e86c1", false, report::windowed_mean(rewards, kLogWindow), {}, {}};
  const std::string top =
      svg::line_chart("Training loss", "window (100 steps)", "mean squared error",
                      std::span<const svg::Series>(&loss_series, 1));
  std::string bottom =
      svg::line_chart("Training reward", "window (100 steps)", "mean reward",
                      std::span<const svg::Series>(&reward_series, 1));
  // Stack the two panels into one document; nested <svg> elements are valid.
  std::string stacked = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"960\">\n";
  stacked += top;
  const std::string tag = "<svg ";
  const std::size_t pos = bottom.find(tag);
  if (pos != std::string::npos) bottom.insert(pos + tag.size(), "y=\"480\" ");
  stacked += bottom;
  stacked += "</svg>\n";
  csv::write_file(path, stacked);
}

struct VariantStyle {
  const char* color;
  bool dashed;
};

VariantStyle style_of(marl::Variant v) {
  switch (v) {
    case marl::Variant::ES: return {"#7f7f7f", false};
    case marl::Variant::RLEN: return {"#e67e22", false};
    case marl::Variant::RLIN: return {"#27ae60", false};
    case marl::Variant::RLINPlus: return {"#2e86c1", true};
  }
  return {"#000000", false};
}

void write_report_outputs(const std::string& out_dir,
                          const std::vector<std::pair<marl::Variant, trace::TraceTable>>& tables) {
  std::vector<report::VariantReport> reports;
  for (const auto& [variant, table] : tables) {
    reports.push_back(report::aggregate_gains(table, marl::to_string(variant)));
  }
  for (const report::VariantReport& rep : reports) {
    for (const std::string& w : rep.warnings) {
      std::cerr << "warning: " << rep.variant << ": " << w << "\n";
    }
  }
  csv::write_file(out_dir + "/report.csv", report::report_csv(reports));

  static constexpr const char* kChartFiles[4] = {
      "gain_good_traffic.svg", "gain_good_coverage.svg", "gain_good_quality.svg",
      "gain_congestion.svg"};
  static constexpr const char* kChartTitles[4] = {
      "Good traffic improvement", "Good coverage traffic improvement",
      "Good quality traffic improvement", "Congestion improvement"};
  for (int m = 0; m < 4; ++m) {
    std::vector<svg::Series> series;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto st = style_of(tables[i].first);
      svg::Series s;
      s.label = reports[i].variant;
      s.color = st.color;
      s.dashed = st.dashed;
      for (const report::StepStat& stat : reports[i].gains[static_cast<std::size_t>(m)]) {
        s.y.push_back(stat.mean);
        s.band_lo.push_back(stat.q1);
        s.band_hi.push_back(stat.q3);
      }
      series.push_back(std::move(s));
    }
    csv::write_file(out_dir + "/" + kChartFiles[m],
                    svg::line_chart(kChartTitles[m], "step", "gain (%)", series));
  }

  std::vector<svg::Box> boxes;
  for (const report::VariantReport& rep : reports) {
    svg::Box b;
    b.label = rep.variant;
    b.min = rep.mitigation_congested.min;
    b.q1 = rep.mitigation_congested.q1;
    b.median = rep.mitigation_congested.median;
    b.q3 = rep.mitigation_congested.q3;
    b.max = rep.mitigation_congested.max;
    b.mean = rep.mitigation_congested.mean;
    boxes.push_back(b);
  }
  csv::write_file(out_dir + "/mitigation_steps.svg",
                  svg::box_chart("Steps to congestion mitigation (initially congested episodes)",
                                 "steps", boxes));
}

}  // namespace

CampaignConfig resolve_config(const CommandOptions& options) {
  CampaignConfig config =
      options.config_path ? load_config_file(*options.config_path) : default_config();
  if (options.seed) config.seed = *options.seed;
  if (options.scale) {
    if (!(*options.scale > 0.0)) throw ConfigError("config: scale must be > 0");
    config.scale = *options.scale;
  }
  if (options.workers) {
    if (*options.workers < 1) throw ConfigError("config: workers must be >= 1");
    config.workers = *options.workers;
  }
  return config;
}

void cmd_pretrain(const CommandOptions& options) {
  const CampaignConfig config = resolve_config(options);
  const std::vector<marl::Variant> variants =
      parse_variants(options.variants, {marl::Variant::RLEN, marl::Variant::RLIN});
  for (marl::Variant v : variants) {
    if (v != marl::Variant::RLEN && v != marl::Variant::RLIN) {
      throw ConfigError("pretrain supports only RLEN and RLIN (got " + marl::to_string(v) + ")");
    }
  }
  fs::create_directories(options.out_dir);

  const int episodes = config.scaled_train_episodes();
  json manifest_entry;
  manifest_entry["episodes"] = episodes;
  manifest_entry["seed"] = config.seed;
  manifest_entry["scale"] = config.scale;
  manifest_entry["config"] = to_json(config);

  for (marl::Variant v : variants) {
    const marl::CampaignSpec spec =
        make_spec(config, config.train, episodes, v, marl::CampaignSpec::Mode::Pretrain);
    const marl::CampaignResult result = marl::run_campaign(spec, nullptr);

    const std::string name = marl::to_string(v);
    const std::string ckpt = result.final_net->save_checkpoint();
    csv::write_file(options.out_dir + "/checkpoint_" + name + ".json", ckpt);
    csv::write_file(options.out_dir + "/training_log_" + name + ".csv",
                    trace::training_log_csv(result.log));
    write_training_svg(options.out_dir + "/training_" + name + ".svg", result.log);

    manifest_entry["checkpoints"][name] = {{"file", "checkpoint_" + name + ".json"},
                                           {"fnv1a64", hex64(fnv1a64(ckpt))},
                                           {"experiences", result.experiences_generated}};
    std::cout << "pretrained " << name << ": " << episodes << " episodes, "
              << result.experiences_generated << " experiences\n";
  }
  update_manifest(options.out_dir, "pretrain", std::move(manifest_entry));
}

void cmd_evaluate(const CommandOptions& options) {
  const CampaignConfig config = resolve_config(options);
  const std::vector<marl::Variant> variants = parse_variants(
      options.variants, {marl::Variant::ES, marl::Variant::RLEN, marl::Variant::RLIN,
                         marl::Variant::RLINPlus});
  fs::create_directories(options.out_dir);

  // All checkpoints must exist before any episode runs.
  std::vector<std::string> missing;
  for (marl::Variant v : variants) {
    if (v == marl::Variant::ES) continue;
    const std::string path = checkpoint_path(options.out_dir, v);
    if (!fs::exists(path)) missing.push_back(marl::to_string(v) + " -> " + path);
  }
  if (!missing.empty()) {
    std::string what = "missing checkpoints for requested variants:";
    for (const std::string& m : missing) what += "\n  " + m;
    throw ConfigError(what);
  }

  const int episodes = config.scaled_test_episodes();
  json manifest_entry;
  manifest_entry["episodes"] = episodes;
  manifest_entry["seed"] = config.seed;
  manifest_entry["scale"] = config.scale;
  manifest_entry["config"] = to_json(config);

  std::vector<std::pair<marl::Variant, trace::TraceTable>> tables;
  for (marl::Variant v : variants) {
    const marl::CampaignSpec spec =
        make_spec(config, config.test, episodes, v, marl::CampaignSpec::Mode::Evaluate);

    std::optional<rlcore::QNetwork> net;
    if (v != marl::Variant::ES) {
      const std::string path = checkpoint_path(options.out_dir, v);
      net = rlcore::QNetwork::load_checkpoint(csv::read_text(path));
      manifest_entry["checkpoints"][marl::to_string(v)] = {
          {"file", fs::path(path).filename().string()},
          {"fnv1a64", hex64(fnv1a64(csv::read_text(path)))}};
    }
    const marl::CampaignResult result = marl::run_campaign(spec, net ? &*net : nullptr);

    const std::string name = marl::to_string(v);
    trace::TraceTable table = trace::flatten(result.traces);
    csv::write_file(options.out_dir + "/trace_" + name + ".csv", trace::trace_csv(table));
    if (v == marl::Variant::RLINPlus && result.final_net) {
      csv::write_file(options.out_dir + "/checkpoint_RLIN+_final.json",
                      result.final_net->save_checkpoint());
    }
    tables.emplace_back(v, std::move(table));
    std::cout << "evaluated " << name << ": " << episodes << " episodes\n";

    if (options.debug_dump && v == variants.front()) {
      const marl::EpisodeSetup setup =
          marl::make_episode(spec, derive_seed(spec.seed, stream::kEpisode, 0));
      csv::write_file(options.out_dir + "/layout.csv", topology::layout_csv(setup.layout));
      const radiosim::RadioSnapshot snap =
          radiosim::evaluate_snapshot(setup.layout, setup.config, setup.drop, spec.sim.radio);
      csv::write_file(options.out_dir + "/snapshot_ep0.csv", radiosim::snapshot_csv(snap, setup.drop));
    }
  }

  write_report_outputs(options.out_dir, tables);
  update_manifest(options.out_dir, "evaluate", std::move(manifest_entry));
}

void cmd_report(const CommandOptions& options) {
  static constexpr marl::Variant kAll[] = {marl::Variant::ES, marl::Variant::RLEN,
                                           marl::Variant::RLIN, marl::Variant::RLINPlus};
  std::vector<std::pair<marl::Variant, trace::TraceTable>> tables;
  for (marl::Variant v : kAll) {
    const std::string path = options.out_dir + "/trace_" + marl::to_string(v) + ".csv";
    if (!fs::exists(path)) continue;
    tables.emplace_back(v, trace::parse_trace_csv(csv::read_text(path)));
  }
  if (tables.empty()) {
    throw IoError("no trace_<variant>.csv files found in " + options.out_dir);
  }
  write_report_outputs(options.out_dir, tables);
  std::cout << "report regenerated from " << tables.size() << " trace file(s)\n";
}

void cmd_config(bool print_defaults, bool explain) {
  if (explain) {
    std::cout << explain_config();
    return;
  }
  if (print_defaults) {
    std::cout << to_json(default_config()).dump(2) << "\n";
    return;
  }
  std::cout << "use --print-defaults or --explain\n";
}

}  // namespace tiltopt::cli
