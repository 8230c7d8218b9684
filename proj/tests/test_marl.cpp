#include <doctest.h>

#include <cmath>

#include "tiltopt/marl.hpp"
#include "tiltopt/trace_io.hpp"

using namespace tiltopt;
using namespace tiltopt::marl;
using rlcore::Action;

TEST_SUITE_BEGIN("marl");

namespace {

CampaignSpec desk_spec(Variant variant, CampaignSpec::Mode mode, int episodes) {
  CampaignSpec spec;
  spec.variant = variant;
  spec.mode = mode;
  spec.episodes = episodes;
  spec.steps_per_episode = 20;
  spec.rings = 2;
  spec.optimized_rings = 1;
  spec.seed = 77;
  return spec;
}

struct ForcedPolicy final : Policy {
  Action forced;
  explicit ForcedPolicy(Action a) : forced(a) {}
  Action act(const kpi::StateVector&, const kpi::KpiRecord&, Rng&) override { return forced; }
};

}  // namespace

TEST_CASE("episode trace shape: steps x optimized cells") {
  const CampaignSpec spec = desk_spec(Variant::ES, CampaignSpec::Mode::Evaluate, 1);
  const EpisodeSetup setup = make_episode(spec, derive_seed(spec.seed, stream::kEpisode, 0));
  ForcedPolicy policy(Action::Keep);
  Rng rng(1);
  const EpisodeTrace trace = run_episode(setup, spec, policy, nullptr, rng);
  CHECK(trace.optimized.size() == 21);
  CHECK(trace.steps.size() == 20);
  std::size_t triples = 0;
  for (const auto& row : trace.steps) triples += row.size();
  CHECK(triples == 420);
  CHECK(trace.aggregates.size() == 21);  // baseline + 20 steps
  CHECK(trace.baseline_kpi.size() == 21);
}

TEST_CASE("all-keep policy earns exactly zero reward on a fixed drop") {
  const CampaignSpec spec = desk_spec(Variant::RLIN, CampaignSpec::Mode::Evaluate, 1);
  const EpisodeSetup setup = make_episode(spec, derive_seed(spec.seed, stream::kEpisode, 3));
  ForcedPolicy policy(Action::Keep);
  Rng rng(1);
  const EpisodeTrace trace = run_episode(setup, spec, policy, nullptr, rng);
  for (const auto& row : trace.steps) {
    for (const CellStep& cs : row) {
      CHECK(cs.reward == 0.0);
      CHECK(cs.action == Action::Keep);
    }
  }
}

TEST_CASE("tilt clips at the range boundary and the clipped move is a no-op") {
  CampaignSpec spec = desk_spec(Variant::RLIN, CampaignSpec::Mode::Evaluate, 1);
  spec.steps_per_episode = 5;
  EpisodeSetup setup = make_episode(spec, derive_seed(spec.seed, stream::kEpisode, 4));
  for (topology::CellId c : setup.config.optimized_cells) {
    setup.config.electrical_tilt_deg[c] = 15.0;  // start at the boundary
  }
  ForcedPolicy policy(Action::Down);
  Rng rng(1);
  const EpisodeTrace trace = run_episode(setup, spec, policy, nullptr, rng);
  for (const auto& row : trace.steps) {
    for (const CellStep& cs : row) {
      CHECK(cs.tilt_deg == 15.0);
      CHECK(cs.reward == 0.0);
    }
  }
}

TEST_CASE("non-optimized cells keep their tilt all episode") {
  const CampaignSpec spec = desk_spec(Variant::ES, CampaignSpec::Mode::Evaluate, 1);
  const CampaignResult result = run_campaign(spec, nullptr);
  // The trace only logs optimized cells; re-run the episode and compare the
  // final config against the sampled one for non-optimized ids.
  const EpisodeSetup setup = make_episode(spec, derive_seed(spec.seed, stream::kEpisode, 0));
  std::vector<char> optimized(setup.layout.cells.size(), 0);
  for (topology::CellId c : setup.config.optimized_cells) optimized[static_cast<std::size_t>(c)] = 1;
  // Optimized ids are exactly rings 0..optimized_rings.
  for (std::size_t c = 0; c < setup.layout.cells.size(); ++c) {
    const int ring = setup.layout.sites[setup.layout.cells[c].site].ring;
    CHECK(static_cast<bool>(optimized[c]) == (ring <= spec.optimized_rings));
    if (!optimized[c]) {
      CHECK(setup.config.electrical_tilt_deg[c] >= 4.0);
      CHECK(setup.config.electrical_tilt_deg[c] <= 6.0);
    }
  }
  CHECK(result.traces.size() == 1);
}

TEST_CASE("freeze heuristic") {
  using A = Action;
  SUBCASE("three consecutive keeps skip") {
    const A h[] = {A::Keep, A::Keep, A::Keep};
    CHECK(freeze_skip(h));
  }
  SUBCASE("strict four-step oscillation skips") {
    const A h[] = {A::Up, A::Down, A::Up, A::Down};
    CHECK(freeze_skip(h));
    const A h2[] = {A::Down, A::Up, A::Down, A::Up};
    CHECK(freeze_skip(h2));
  }
  SUBCASE("unmatched patterns learn") {
    const A h[] = {A::Up, A::Up, A::Keep};
    CHECK(!freeze_skip(h));
    const A h2[] = {A::Up, A::Down, A::Down, A::Up};
    CHECK(!freeze_skip(h2));
    const A h3[] = {A::Keep, A::Keep};
    CHECK(!freeze_skip(h3));
    const A h4[] = {A::Up, A::Keep, A::Down, A::Up};
    CHECK(!freeze_skip(h4));
  }
  SUBCASE("older history does not mask the recent window") {
    const A h[] = {A::Up, A::Up, A::Keep, A::Keep, A::Keep};
    CHECK(freeze_skip(h));
  }
}

TEST_CASE("experience count law and training trend on a small pretrain") {
  CampaignSpec spec = desk_spec(Variant::RLIN, CampaignSpec::Mode::Pretrain, 5);
  const CampaignResult result = run_campaign(spec, nullptr);
  // episodes x steps x optimized cells, the law behind the published
  // 500 x 20 x 21 = 210,000 figure.
  CHECK(result.experiences_generated == 5 * 20 * 21);
  CHECK(static_cast<int64_t>(500) * 20 * 21 == 210000);
  CHECK(result.log.size() == 100);
  CHECK(result.final_net.has_value());
  CHECK(result.final_net->finite_parameters());
  // Epsilon decays along the schedule.
  CHECK(result.log.front().epsilon == 1.0);
  CHECK(result.log.back().epsilon < 1.0);
}

TEST_CASE("evaluation determinism and frozen parameters") {
  CampaignSpec pretrain = desk_spec(Variant::RLIN, CampaignSpec::Mode::Pretrain, 3);
  const CampaignResult trained = run_campaign(pretrain, nullptr);
  const rlcore::QNetwork net = *trained.final_net;

  CampaignSpec eval = desk_spec(Variant::RLIN, CampaignSpec::Mode::Evaluate, 3);
  const CampaignResult a = run_campaign(eval, &net);
  const CampaignResult b = run_campaign(eval, &net);
  CHECK(trace::trace_csv(trace::flatten(a.traces)) == trace::trace_csv(trace::flatten(b.traces)));
  CHECK(!a.final_net.has_value());  // frozen evaluation returns no new net

  // Worker fan-out must not change anything.
  eval.workers = 4;
  const CampaignResult c = run_campaign(eval, &net);
  CHECK(trace::trace_csv(trace::flatten(a.traces)) == trace::trace_csv(trace::flatten(c.traces)));
}

TEST_CASE("shared policy gives identical greedy actions for identical states") {
  const rlcore::QNetwork net({11, 64, 64, 3}, 5);
  kpi::StateVector s{};
  for (int i = 0; i < 11; ++i) s[static_cast<std::size_t>(i)] = 0.1 * i;
  Rng rng(1);
  const auto q = net.forward(s);
  const Action first = rlcore::select_action(q, 0.0, rng);
  for (int i = 0; i < 10; ++i) {
    CHECK(rlcore::select_action(net.forward(s), 0.0, rng) == first);
  }
}

TEST_CASE("paired seeds give identical environments across variants") {
  const CampaignSpec a = desk_spec(Variant::ES, CampaignSpec::Mode::Evaluate, 1);
  const CampaignSpec b = desk_spec(Variant::RLIN, CampaignSpec::Mode::Evaluate, 1);
  const EpisodeSetup ea = make_episode(a, derive_seed(a.seed, stream::kEpisode, 0));
  const EpisodeSetup eb = make_episode(b, derive_seed(b.seed, stream::kEpisode, 0));
  CHECK(ea.config.electrical_tilt_deg == eb.config.electrical_tilt_deg);
  CHECK(ea.config.carrier_frequency_ghz == eb.config.carrier_frequency_ghz);
  CHECK(ea.drop.x == eb.drop.x);
  CHECK(ea.drop.y == eb.drop.y);
}

TEST_CASE("pretrain rejects ES and RLIN+; evaluate requires a checkpoint") {
  CampaignSpec bad = desk_spec(Variant::ES, CampaignSpec::Mode::Pretrain, 1);
  CHECK_THROWS_AS(run_campaign(bad, nullptr), ConfigError);
  bad.variant = Variant::RLINPlus;
  CHECK_THROWS_AS(run_campaign(bad, nullptr), ConfigError);
  CampaignSpec eval = desk_spec(Variant::RLIN, CampaignSpec::Mode::Evaluate, 1);
  CHECK_THROWS_AS(run_campaign(eval, nullptr), ConfigError);
}

TEST_CASE("RLIN+ continues learning during evaluation") {
  CampaignSpec pretrain = desk_spec(Variant::RLIN, CampaignSpec::Mode::Pretrain, 2);
  const CampaignResult trained = run_campaign(pretrain, nullptr);

  CampaignSpec plus = desk_spec(Variant::RLINPlus, CampaignSpec::Mode::Evaluate, 2);
  const CampaignResult result = run_campaign(plus, &*trained.final_net);
  REQUIRE(result.final_net.has_value());
  CHECK(!result.final_net->equal_parameters(*trained.final_net));
  CHECK(result.log.size() == 40);
  // Test-phase exploration is off.
  for (const auto& row : result.log) CHECK(row.epsilon == 0.0);
}

TEST_CASE("variant names round-trip") {
  for (Variant v : {Variant::ES, Variant::RLEN, Variant::RLIN, Variant::RLINPlus}) {
    CHECK(variant_from_string(to_string(v)) == v);
  }
  CHECK_THROWS_AS(variant_from_string("bogus"), ConfigError);
}

TEST_SUITE_END();
