#include <doctest.h>

#include "tiltopt/config.hpp"
#include "tiltopt/errors.hpp"

using namespace tiltopt;
using namespace tiltopt::cli;
using nlohmann::json;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults reproduce the published setup") {
  const CampaignConfig c = default_config();
  CHECK(c.train.rings == 2);
  CHECK(c.train.optimized_rings == 1);
  CHECK(c.train.episodes == 500);
  CHECK(c.train.steps == 20);
  CHECK(c.test.rings == 5);
  CHECK(c.test.optimized_rings == 3);
  CHECK(c.test.episodes == 300);
  CHECK(c.sim.ranges.tilt_optimized.lo == 0);
  CHECK(c.sim.ranges.tilt_optimized.hi == 15);
  CHECK(c.sim.ranges.offered_traffic.lo == 4);
  CHECK(c.sim.ranges.offered_traffic.hi == 11);
  CHECK(c.sim.kpi.good_coverage_rsrp_dbm == -108.0);
  CHECK(c.sim.kpi.good_quality_sinr_db == 3.0);
  CHECK(c.sim.radio.bandwidth_mhz == 20.0);
  CHECK(c.rl.adam.learning_rate == 0.001);
  CHECK(c.rl.hidden == std::vector<int>{64, 64});

  // The scale factor shrinks episode counts only.
  CHECK(c.scale == 0.1);
  CHECK(c.scaled_train_episodes() == 50);
  CHECK(c.scaled_test_episodes() == 30);
}

TEST_CASE("json round trip preserves the config") {
  CampaignConfig c = default_config();
  c.seed = 99;
  c.scale = 0.02;
  c.sim.expert.congestion_high = 0.2;
  const CampaignConfig back = config_from_json(to_json(c));
  CHECK(back.seed == 99);
  CHECK(back.scale == 0.02);
  CHECK(back.sim.expert.congestion_high == 0.2);
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("partial configs override only their keys") {
  const json doc = {{"seed", 7}, {"rl", {{"batch_size", 32}}}};
  const CampaignConfig c = config_from_json(doc);
  CHECK(c.seed == 7);
  CHECK(c.rl.batch_size == 32);
  CHECK(c.rl.adam.learning_rate == 0.001);  // untouched default
  CHECK(c.train.episodes == 500);
}

TEST_CASE("schema violations carry the offending path") {
  SUBCASE("unknown key") {
    try {
      config_from_json(json{{"radioo", json::object()}});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("radioo") != std::string::npos);
    }
  }
  SUBCASE("wrong type") {
    try {
      config_from_json(json{{"rl", {{"batch_size", "many"}}}});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("batch_size") != std::string::npos);
    }
  }
  SUBCASE("malformed range") {
    CHECK_THROWS_AS(config_from_json(json{{"ranges", {{"antenna_height", {30, 16}}}}}),
                    ConfigError);
  }
  SUBCASE("bad version") {
    CHECK_THROWS_AS(config_from_json(json{{"version", 2}}), ConfigError);
  }
  SUBCASE("no buffer ring") {
    CHECK_THROWS_AS(
        config_from_json(json{{"train", {{"rings", 2}, {"optimized_rings", 2}}}}),
        ConfigError);
  }
}

TEST_CASE("explain covers every exported field") {
  const std::string text = explain_config();
  const json doc = to_json(default_config());
  for (const auto& [section, value] : doc.items()) {
    if (section == "version") continue;
    if (value.is_object()) {
      for (const auto& [key, sub] : value.items()) {
        CHECK(text.find(section + "." + key) != std::string::npos);
      }
    } else {
      CHECK(text.find(section) != std::string::npos);
    }
  }
}

TEST_SUITE_END();
