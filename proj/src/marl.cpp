#include "tiltopt/marl.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "tiltopt/errors.hpp"

namespace tiltopt::marl {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::ES: return "ES";
    case Variant::RLEN: return "RLEN";
    case Variant::RLIN: return "RLIN";
    case Variant::RLINPlus: return "RLIN+";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  if (name == "ES") return Variant::ES;
  if (name == "RLEN") return Variant::RLEN;
  if (name == "RLIN") return Variant::RLIN;
  if (name == "RLIN+" || name == "RLINplus" || name == "RLIN_PLUS") return Variant::RLINPlus;
  throw ConfigError("unknown variant: '" + name + "' (expected ES, RLEN, RLIN or RLIN+)");
}

Learner::Learner(rlcore::QNetwork net, const RlParams& params, int64_t total_env_steps,
                 uint64_t seed, bool explore)
    : net_(std::move(net)),
      buffer_(params.buffer_capacity),
      params_(params),
      total_env_steps_(total_env_steps),
      explore_(explore),
      sample_rng_(derive_seed(seed, stream::kReplay)) {}

double Learner::epsilon() const {
  if (!explore_) return 0.0;
  const double decay_steps =
      std::max(1.0, params_.epsilon_decay_fraction * static_cast<double>(total_env_steps_));
  const double t = std::min(1.0, static_cast<double>(env_step_) / decay_steps);
  return params_.epsilon_start + t * (params_.epsilon_end - params_.epsilon_start);
}

void Learner::push(const rlcore::Experience& e) {
  rlcore::Experience clipped = e;
  clipped.reward = std::clamp(clipped.reward, -params_.reward_clip, params_.reward_clip);
  buffer_.push(clipped);
  ++experiences_;
}

void Learner::end_step(double mean_reward) {
  TrainingLogRow row;
  row.step = env_step_;
  row.epsilon = epsilon();
  row.mean_reward = mean_reward;
  row.loss = std::numeric_limits<double>::quiet_NaN();
  auto batch = buffer_.sample(static_cast<std::size_t>(params_.batch_size), sample_rng_);
  if (batch) row.loss = net_.train_step(*batch);
  log_.push_back(row);
  ++env_step_;
}

EpisodeSetup make_episode(const CampaignSpec& spec, uint64_t config_seed) {
  // Structure (counts, optimized set) depends only on the ring counts, so a
  // placeholder-geometry layout is enough to sample against; the real layout
  // is rebuilt with the sampled inter-site distance.
  topology::SiteLayout proto = topology::generate_hex_grid(spec.rings, 1000.0);
  const std::vector<topology::CellId> optimized =
      topology::optimized_cells(proto, spec.optimized_rings);

  EpisodeSetup setup;
  setup.config = topology::sample_episode_config(proto, optimized, spec.sim.ranges,
                                                 derive_seed(config_seed, stream::kEpisodeConfig));
  setup.layout = topology::generate_hex_grid(spec.rings, setup.config.inter_site_distance_m);
  setup.drop = radiosim::drop_users(setup.layout, setup.config, spec.sim.radio,
                                    derive_seed(config_seed, stream::kUeDrop));
  return setup;
}

bool freeze_skip(std::span<const rlcore::Action> history) {
  const std::size_t n = history.size();
  if (n >= 3) {
    bool all_keep = true;
    for (std::size_t i = n - 3; i < n; ++i) {
      if (history[i] != rlcore::Action::Keep) all_keep = false;
    }
    if (all_keep) return true;
  }
  if (n >= 4) {
    bool oscillating = true;
    for (std::size_t i = n - 4; i < n; ++i) {
      if (history[i] == rlcore::Action::Keep) oscillating = false;
    }
    if (oscillating) {
      for (std::size_t i = n - 3; i < n; ++i) {
        if (history[i] == history[i - 1]) oscillating = false;
      }
    }
    if (oscillating) return true;
  }
  return false;
}

namespace {

bool neighbor_aware(Variant v) { return v == Variant::RLIN || v == Variant::RLINPlus; }

StepAggregate aggregate_step(std::span<const kpi::KpiRecord> records,
                             std::span<const topology::CellId> optimized) {
  StepAggregate agg;
  bool congestion_free = true;
  for (topology::CellId c : optimized) {
    const kpi::KpiRecord& r = records[static_cast<std::size_t>(c)];
    agg.mean_good_traffic += r.good_traffic;
    agg.mean_good_coverage += r.good_coverage;
    agg.mean_good_quality += r.good_quality;
    agg.mean_congestion += r.congestion_rate;
    if (r.congestion_rate > 0.0) congestion_free = false;
  }
  const double n = static_cast<double>(optimized.size());
  agg.mean_good_traffic /= n;
  agg.mean_good_coverage /= n;
  agg.mean_good_quality /= n;
  agg.mean_congestion /= n;
  agg.congestion_free = congestion_free;
  return agg;
}

void check_finite(const kpi::KpiRecord& r, int cell) {
  const double fields[] = {r.good_traffic,  r.congestion_rate, r.good_coverage,
                           r.good_quality,  r.overshooting,    r.overlap_high,
                           r.bad_coverage,  r.interference_indicator,
                           r.gt_neigh,      r.cr_neigh};
  for (double f : fields) {
    if (!std::isfinite(f)) {
      throw DivergenceError("non-finite KPI for cell " + std::to_string(cell));
    }
  }
}

}  // namespace

EpisodeTrace run_episode(const EpisodeSetup& setup, const CampaignSpec& spec, Policy& policy,
                         Learner* learner, Rng& action_rng) {
  const bool with_neighbors = neighbor_aware(spec.variant);
  const std::vector<topology::CellId>& optimized = setup.config.optimized_cells;
  const std::size_t n_opt = optimized.size();

  topology::EpisodeConfig config = setup.config;  // tilts evolve over steps

  EpisodeTrace trace;
  trace.config_seed = setup.config.rng_seed;
  trace.variant = spec.variant;
  trace.optimized = optimized;

  radiosim::RadioSnapshot snapshot =
      radiosim::evaluate_snapshot(setup.layout, config, setup.drop, spec.sim.radio);
  std::vector<kpi::KpiRecord> records =
      kpi::compute_cell_kpis(snapshot, setup.layout, config, spec.sim.kpi);
  for (topology::CellId c : optimized) check_finite(records[c], c);

  trace.baseline_kpi.reserve(n_opt);
  trace.baseline_tilt_deg.reserve(n_opt);
  for (topology::CellId c : optimized) {
    trace.baseline_kpi.push_back(records[c]);
    trace.baseline_tilt_deg.push_back(config.electrical_tilt_deg[c]);
  }
  trace.aggregates.push_back(aggregate_step(records, optimized));

  std::vector<std::vector<rlcore::Action>> history(n_opt);

  for (int step = 1; step <= spec.steps_per_episode; ++step) {
    // All agents observe the same pre-action snapshot; actions are chosen
    // before any tilt changes so no agent sees another's same-step move.
    std::vector<rlcore::Action> actions(n_opt);
    std::vector<kpi::StateVector> states(n_opt);
    std::vector<double> rm_before(n_opt);
    for (std::size_t i = 0; i < n_opt; ++i) {
      const topology::CellId c = optimized[i];
      const kpi::KpiRecord view =
          with_neighbors ? records[c] : kpi::without_neighbor_info(records[c]);
      states[i] = kpi::build_state(setup.layout, config, view, c, with_neighbors, spec.sim.kpi);
      rm_before[i] = kpi::reward_metric(view);
      actions[i] = policy.act(states[i], records[c], action_rng);
    }

    // Joint application, clipped to the optimized-tilt range.
    const double tilt_lo = static_cast<double>(spec.sim.ranges.tilt_optimized.lo);
    const double tilt_hi = static_cast<double>(spec.sim.ranges.tilt_optimized.hi);
    for (std::size_t i = 0; i < n_opt; ++i) {
      const topology::CellId c = optimized[i];
      config.electrical_tilt_deg[c] = std::clamp(
          config.electrical_tilt_deg[c] + rlcore::tilt_delta_deg(actions[i]), tilt_lo, tilt_hi);
    }

    snapshot = radiosim::evaluate_snapshot(setup.layout, config, setup.drop, spec.sim.radio);
    records = kpi::compute_cell_kpis(snapshot, setup.layout, config, spec.sim.kpi);
    for (topology::CellId c : optimized) check_finite(records[c], c);

    std::vector<CellStep> row(n_opt);
    double reward_sum = 0.0;
    for (std::size_t i = 0; i < n_opt; ++i) {
      const topology::CellId c = optimized[i];
      const kpi::KpiRecord view =
          with_neighbors ? records[c] : kpi::without_neighbor_info(records[c]);
      const double r = kpi::reward(rm_before[i], kpi::reward_metric(view));
      if (!std::isfinite(r)) {
        throw DivergenceError("non-finite reward for cell " + std::to_string(c));
      }
      row[i].state = states[i];
      row[i].action = actions[i];
      row[i].reward = r;
      row[i].kpi = records[c];
      row[i].tilt_deg = config.electrical_tilt_deg[c];
      reward_sum += r;
      history[i].push_back(actions[i]);
    }

    if (learner != nullptr) {
      for (std::size_t i = 0; i < n_opt; ++i) {
        if (spec.freeze_heuristic && freeze_skip(history[i])) continue;
        learner->push({states[i], actions[i], row[i].reward});
      }
      learner->end_step(reward_sum / static_cast<double>(n_opt));
    }

    trace.steps.push_back(std::move(row));
    trace.aggregates.push_back(aggregate_step(records, optimized));
  }
  return trace;
}

namespace {

// epsilon-greedy over the shared Q-network. The epsilon value is sampled
// from the learner schedule at episode-step granularity via callback.
class EpsilonGreedyPolicy final : public Policy {
 public:
  EpsilonGreedyPolicy(const rlcore::QNetwork& net, const Learner* learner)
      : net_(net), learner_(learner) {}

  rlcore::Action act(const kpi::StateVector& state, const kpi::KpiRecord&, Rng& rng) override {
    const double eps = learner_ ? learner_->epsilon() : 0.0;
    const std::vector<double> q = net_.forward(state);
    return rlcore::select_action(q, eps, rng);
  }

 private:
  const rlcore::QNetwork& net_;
  const Learner* learner_;
};

class ExpertPolicy final : public Policy {
 public:
  explicit ExpertPolicy(const expert::Thresholds& thresholds) : thresholds_(thresholds) {}

  rlcore::Action act(const kpi::StateVector&, const kpi::KpiRecord& record, Rng&) override {
    return expert::expert_action(record, thresholds_);
  }

 private:
  expert::Thresholds thresholds_;
};

std::vector<int> network_sizes(const RlParams& rl) {
  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(std::tuple_size<kpi::StateVector>::value));
  for (int h : rl.hidden) sizes.push_back(h);
  sizes.push_back(rlcore::kNumActions);
  return sizes;
}

}  // namespace

CampaignResult run_campaign(const CampaignSpec& spec, const rlcore::QNetwork* initial_net) {
  if (spec.episodes < 1) throw ConfigError("campaign needs at least one episode");
  if (spec.mode == CampaignSpec::Mode::Pretrain &&
      (spec.variant == Variant::ES || spec.variant == Variant::RLINPlus)) {
    throw ConfigError("pretrain is only defined for RLEN and RLIN");
  }

  CampaignResult result;
  const bool learning = spec.mode == CampaignSpec::Mode::Pretrain ||
                        spec.variant == Variant::RLINPlus;

  if (spec.variant == Variant::ES) {
    // Frozen rule set; episodes are independent.
    result.traces.resize(static_cast<std::size_t>(spec.episodes));
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int ep = next.fetch_add(1);
        if (ep >= spec.episodes) return;
        const EpisodeSetup setup = make_episode(spec, derive_seed(spec.seed, stream::kEpisode, ep));
        ExpertPolicy policy(spec.sim.expert);
        Rng rng(derive_seed(spec.seed, stream::kAction, ep));
        EpisodeTrace trace = run_episode(setup, spec, policy, nullptr, rng);
        trace.episode = ep;
        result.traces[static_cast<std::size_t>(ep)] = std::move(trace);
      }
    };
    const int n_workers = std::max(1, std::min(spec.workers, spec.episodes));
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return result;
  }

  if (!learning) {
    // RLEN / RLIN evaluation with a frozen checkpoint.
    if (initial_net == nullptr) throw ConfigError("evaluate mode requires a checkpoint");
    result.traces.resize(static_cast<std::size_t>(spec.episodes));
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int ep = next.fetch_add(1);
        if (ep >= spec.episodes) return;
        const EpisodeSetup setup = make_episode(spec, derive_seed(spec.seed, stream::kEpisode, ep));
        EpsilonGreedyPolicy policy(*initial_net, nullptr);
        Rng rng(derive_seed(spec.seed, stream::kAction, ep));
        EpisodeTrace trace = run_episode(setup, spec, policy, nullptr, rng);
        trace.episode = ep;
        result.traces[static_cast<std::size_t>(ep)] = std::move(trace);
      }
    };
    const int n_workers = std::max(1, std::min(spec.workers, spec.episodes));
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return result;
  }

  // Learning campaigns are sequential: every episode sees the policy updated
  // by the previous ones.
  rlcore::QNetwork net;
  if (initial_net != nullptr) {
    net = *initial_net;
  } else if (spec.mode == CampaignSpec::Mode::Pretrain) {
    net = rlcore::QNetwork(network_sizes(spec.rl), derive_seed(spec.seed, stream::kWeightInit),
                           spec.rl.adam);
  } else {
    throw ConfigError("RLIN+ evaluation requires the RLIN checkpoint");
  }

  const int64_t total_env_steps =
      static_cast<int64_t>(spec.episodes) * spec.steps_per_episode;
  const bool explore = spec.mode == CampaignSpec::Mode::Pretrain;
  Learner learner(std::move(net), spec.rl, total_env_steps, spec.seed, explore);

  for (int ep = 0; ep < spec.episodes; ++ep) {
    const EpisodeSetup setup = make_episode(spec, derive_seed(spec.seed, stream::kEpisode, ep));
    EpsilonGreedyPolicy policy(learner.net(), &learner);
    Rng rng(derive_seed(spec.seed, stream::kAction, ep));
    EpisodeTrace trace = run_episode(setup, spec, policy, &learner, rng);
    trace.episode = ep;
    result.traces.push_back(std::move(trace));
  }
  result.final_net = learner.net();
  result.log = learner.log();
  result.experiences_generated = learner.experiences();
  return result;
}

}  // namespace tiltopt::marl
