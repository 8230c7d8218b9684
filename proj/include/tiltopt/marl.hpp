#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tiltopt/expert.hpp"
#include "tiltopt/kpi.hpp"
#include "tiltopt/radiosim.hpp"
#include "tiltopt/rlcore.hpp"
#include "tiltopt/topology.hpp"

namespace tiltopt::marl {

enum class Variant { ES, RLEN, RLIN, RLINPlus };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct RlParams {
  std::vector<int> hidden{64, 64};
  rlcore::AdamParams adam{};
  int batch_size = 64;
  std::size_t buffer_capacity = 100000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;  // fraction of env steps spent decaying
  double reward_clip = 1000.0;
};

struct SimParams {
  topology::ParameterRanges ranges{};
  radiosim::RadioParams radio{};
  kpi::KpiParams kpi{};
  expert::Thresholds expert{};
};

struct CampaignSpec {
  enum class Mode { Pretrain, Evaluate };
  Variant variant = Variant::RLIN;
  Mode mode = Mode::Evaluate;
  int episodes = 0;
  int steps_per_episode = 20;
  int rings = 2;
  int optimized_rings = 1;
  uint64_t seed = 1;
  int workers = 1;
  bool freeze_heuristic = false;  // RLIN+ only: skip learning on settled cells
  SimParams sim{};
  RlParams rl{};
};

struct CellStep {
  kpi::StateVector state{};
  rlcore::Action action = rlcore::Action::Keep;
  double reward = 0.0;
  kpi::KpiRecord kpi{};
  double tilt_deg = 0.0;  // tilt after the joint action
};

struct StepAggregate {
  double mean_good_traffic = 0.0;
  double mean_good_coverage = 0.0;
  double mean_good_quality = 0.0;
  double mean_congestion = 0.0;
  bool congestion_free = false;  // every optimized cell at CR = 0
};

struct EpisodeTrace {
  int episode = 0;
  uint64_t config_seed = 0;
  Variant variant = Variant::ES;
  std::vector<topology::CellId> optimized;
  std::vector<kpi::KpiRecord> baseline_kpi;  // step 0, no action
  std::vector<double> baseline_tilt_deg;
  std::vector<std::vector<CellStep>> steps;  // [step-1][optimized cell index]
  std::vector<StepAggregate> aggregates;     // [0] = baseline, size steps+1
};

struct TrainingLogRow {
  int64_t step = 0;
  double loss = 0.0;  // NaN until the buffer can fill a batch
  double mean_reward = 0.0;
  double epsilon = 0.0;
};

// Action provider for one step of one cell. Implementations: expert rules,
// epsilon-greedy over the shared network, and forced policies in tests.
struct Policy {
  virtual ~Policy() = default;
  virtual rlcore::Action act(const kpi::StateVector& state, const kpi::KpiRecord& record,
                             Rng& rng) = 0;
};

// Shared-network trainer state threaded through learning campaigns.
class Learner {
 public:
  Learner(rlcore::QNetwork net, const RlParams& params, int64_t total_env_steps, uint64_t seed,
          bool explore);

  double epsilon() const;
  void push(const rlcore::Experience& e);
  // Trains once (if ready), logs, and advances the env-step counter.
  void end_step(double mean_reward);

  rlcore::QNetwork& net() { return net_; }
  const rlcore::QNetwork& net() const { return net_; }
  const std::vector<TrainingLogRow>& log() const { return log_; }
  int64_t experiences() const { return experiences_; }

 private:
  rlcore::QNetwork net_;
  rlcore::ReplayBuffer buffer_;
  RlParams params_;
  int64_t env_step_ = 0;
  int64_t total_env_steps_;
  bool explore_;
  Rng sample_rng_;
  std::vector<TrainingLogRow> log_;
  int64_t experiences_ = 0;
};

struct EpisodeSetup {
  topology::SiteLayout layout;
  topology::EpisodeConfig config;
  radiosim::UeDrop drop;
};

// Samples layout geometry, per-cell configuration and the UE drop for one
// episode. Identical seeds give identical setups across variants, which is
// what makes paired-seed comparisons valid.
EpisodeSetup make_episode(const CampaignSpec& spec, uint64_t config_seed);

// Freeze heuristic: skip learning for a cell whose recent actions indicate a
// settled or oscillating tilt.
bool freeze_skip(std::span<const rlcore::Action> history);

EpisodeTrace run_episode(const EpisodeSetup& setup, const CampaignSpec& spec, Policy& policy,
                         Learner* learner, Rng& action_rng);

struct CampaignResult {
  std::vector<EpisodeTrace> traces;
  std::optional<rlcore::QNetwork> final_net;
  std::vector<TrainingLogRow> log;
  int64_t experiences_generated = 0;
};

// Pretrain: sequential episodes sharing one network and buffer.
// Evaluate: frozen policy, episodes fan out over workers (ES/RLEN/RLIN);
// RLIN+ evaluates sequentially while continuing to learn.
CampaignResult run_campaign(const CampaignSpec& spec, const rlcore::QNetwork* initial_net);

}  // namespace tiltopt::marl
