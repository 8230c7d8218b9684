#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tiltopt/report.hpp"
#include "tiltopt/rng.hpp"

using namespace tiltopt;
using namespace tiltopt::report;

TEST_SUITE_BEGIN("report");

namespace {

// Builds a single-cell trace with a given per-step good-traffic /
// congestion series.
void add_episode(trace::TraceTable& table, int episode,
                 const std::vector<double>& gt, const std::vector<double>& cr) {
  for (std::size_t s = 0; s < gt.size(); ++s) {
    trace::TraceRow row;
    row.episode = episode;
    row.step = static_cast<int>(s);
    row.cell = 0;
    row.action = s == 0 ? -1 : 0;
    row.kpi.good_traffic = gt[s];
    row.kpi.good_coverage = gt[s];
    row.kpi.good_quality = gt[s];
    row.kpi.congestion_rate = cr[s];
    table.push_back(row);
  }
}

}  // namespace

TEST_CASE("quantiles by linear interpolation match a sort-based oracle") {
  Rng rng(17);
  std::vector<double> values;
  for (int i = 0; i < 300; ++i) values.push_back(rng.uniform_real(-50, 150));
  std::sort(values.begin(), values.end());
  // Oracle: h = p(n-1), linear between floor and ceil.
  for (double p : {0.25, 0.5, 0.75}) {
    const double h = p * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double want = values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
    CHECK(quantile_linear(values, p) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(quantile_linear(std::vector<double>{42.0}, 0.25) == 42.0);
}

TEST_CASE("single trace degenerates to mean = q1 = q3") {
  trace::TraceTable table;
  add_episode(table, 0, {0.5, 0.55, 0.6}, {0.0, 0.0, 0.0});
  const VariantReport rep = aggregate_gains(table, "ES");
  CHECK(rep.steps == 2);
  const StepStat& last = rep.gains[kGoodTraffic].back();
  CHECK(last.mean == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(last.q1 == doctest::Approx(last.mean));
  CHECK(last.q3 == doctest::Approx(last.mean));
  CHECK(last.count == 1);
}

TEST_CASE("two traces with 10% and 30% gains average to 20%") {
  trace::TraceTable table;
  add_episode(table, 0, {0.5, 0.55}, {0.0, 0.0});
  add_episode(table, 1, {0.5, 0.65}, {0.0, 0.0});
  const VariantReport rep = aggregate_gains(table, "ES");
  CHECK(rep.gains[kGoodTraffic].back().mean == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("zero baseline episodes are excluded with a warning") {
  trace::TraceTable table;
  add_episode(table, 0, {0.0, 0.5}, {0.0, 0.0});
  add_episode(table, 1, {0.5, 0.6}, {0.0, 0.0});
  const VariantReport rep = aggregate_gains(table, "ES");
  CHECK(rep.gains[kGoodTraffic].back().count == 1);
  CHECK(rep.gains[kGoodTraffic].back().mean == doctest::Approx(20.0).epsilon(1e-9));
  bool warned = false;
  for (const std::string& w : rep.warnings) {
    if (w.find("episode 0") != std::string::npos) warned = true;
  }
  CHECK(warned);
}

TEST_CASE("congestion improvement and steps to mitigation") {
  trace::TraceTable table;
  // Episode 0: congestion clears at step 2.
  add_episode(table, 0, {0.5, 0.5, 0.5, 0.5}, {0.4, 0.2, 0.0, 0.0});
  // Episode 1: never congested -> steps-to-mitigation 0 by convention.
  add_episode(table, 1, {0.5, 0.5, 0.5, 0.5}, {0.0, 0.0, 0.0, 0.0});
  // Episode 2: never mitigated -> capped at the episode length.
  add_episode(table, 2, {0.5, 0.5, 0.5, 0.5}, {0.3, 0.3, 0.2, 0.1});

  const VariantReport rep = aggregate_gains(table, "ES");
  // Congestion gain at final step: ep0 100%, ep2 (0.3-0.1)/0.3; ep1 excluded.
  CHECK(rep.gains[kCongestion].back().count == 2);
  CHECK(rep.gains[kCongestion].back().mean ==
        doctest::Approx(0.5 * (100.0 + 100.0 * 0.2 / 0.3)).epsilon(1e-9));

  CHECK(rep.mitigation_all.count == 3);
  CHECK(rep.mitigation_all.mean == doctest::Approx((2.0 + 0.0 + 3.0) / 3.0));
  CHECK(rep.mitigation_all.mitigated_fraction == doctest::Approx(2.0 / 3.0));

  CHECK(rep.mitigation_congested.count == 2);
  CHECK(rep.mitigation_congested.mean == doctest::Approx(2.5));
  CHECK(rep.mitigation_congested.mitigated_fraction == doctest::Approx(0.5));

  const auto mitigation = per_episode_mitigation(table);
  REQUIRE(mitigation.size() == 3);
  CHECK(mitigation[0].initially_congested);
  CHECK(mitigation[0].mitigated);
  CHECK(mitigation[0].steps == 2);
  CHECK(!mitigation[1].initially_congested);
  CHECK(mitigation[1].steps == 0);
  CHECK(mitigation[2].initially_congested);
  CHECK(!mitigation[2].mitigated);
  CHECK(mitigation[2].steps == 3);
}

TEST_CASE("per-episode final gains pair by episode id") {
  trace::TraceTable table;
  add_episode(table, 3, {0.5, 0.6}, {0.0, 0.0});
  add_episode(table, 7, {0.4, 0.3}, {0.0, 0.0});
  const auto gains = per_episode_final_gain(table, kGoodTraffic);
  REQUIRE(gains.size() == 2);
  CHECK(gains[0].first == 3);
  CHECK(gains[0].second == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(gains[1].first == 7);
  CHECK(gains[1].second == doctest::Approx(-25.0).epsilon(1e-9));
}

TEST_CASE("windowed means") {
  std::vector<double> v;
  for (int i = 0; i < 250; ++i) v.push_back(static_cast<double>(i));
  const auto w = windowed_mean(v, 100);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(49.5));
  CHECK(w[1] == doctest::Approx(149.5));

  // NaN entries are skipped inside a window.
  std::vector<double> with_nan = {std::nan(""), 2.0, 4.0};
  CHECK(windowed_mean(with_nan, 3)[0] == doctest::Approx(3.0));

  // Short runs collapse to one window.
  CHECK(windowed_mean(std::vector<double>{1.0, 3.0}, 100).size() == 1);
}

TEST_CASE("report csv round-trips through regeneration") {
  trace::TraceTable table;
  add_episode(table, 0, {0.5, 0.55, 0.6}, {0.1, 0.05, 0.0});
  add_episode(table, 1, {0.3, 0.35, 0.45}, {0.0, 0.0, 0.0});

  const std::string csv_text = trace::trace_csv(table);
  const trace::TraceTable parsed = trace::parse_trace_csv(csv_text);
  REQUIRE(parsed.size() == table.size());

  const VariantReport a = aggregate_gains(table, "RLIN");
  const VariantReport b = aggregate_gains(parsed, "RLIN");
  CHECK(report_csv(std::span<const VariantReport>(&a, 1)) ==
        report_csv(std::span<const VariantReport>(&b, 1)));
}

TEST_SUITE_END();
