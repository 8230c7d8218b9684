#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tiltopt/kpi.hpp"
#include "tiltopt/rng.hpp"

namespace tiltopt::rlcore {

enum class Action : int { Keep = 0, Down = 1, Up = 2 };
inline constexpr int kNumActions = 3;

// Tilt increment in degrees: down = +1 (shrink footprint), up = -1 (widen).
inline double tilt_delta_deg(Action a) {
  switch (a) {
    case Action::Down: return 1.0;
    case Action::Up: return -1.0;
    default: return 0.0;
  }
}

// With discount zero the target is the immediate reward, so no next state is
// stored and no target network exists: training is supervised regression of
// reward per taken action.
struct Experience {
  kpi::StateVector state{};
  Action action = Action::Keep;
  double reward = 0.0;
};

struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Small fully connected network, rectified-linear hidden layers and a linear
// output head, trained with adaptive-moment gradient steps.
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(std::vector<int> layer_sizes, uint64_t init_seed, AdamParams adam = {});

  std::vector<double> forward(std::span<const double> input) const;

  // One gradient step on the mean squared reward estimation error over the
  // batch; only the taken action's output contributes per sample. Returns the
  // pre-update loss. Throws DivergenceError on a non-finite loss.
  double train_step(std::span<const Experience> batch);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int64_t step_counter() const { return step_; }
  const AdamParams& adam() const { return adam_; }

  std::string save_checkpoint() const;
  static QNetwork load_checkpoint(const std::string& bytes);

  bool equal_parameters(const QNetwork& other) const;
  bool finite_parameters() const;

  // Direct parameter access for tests (gradient checks, constructed nets).
  struct Layer {
    int in = 0, out = 0;
    std::vector<double> w;  // row-major [out][in]
    std::vector<double> b;
    std::vector<double> mw, vw, mb, vb;  // Adam moment accumulators
  };
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

 private:
  std::vector<int> sizes_;
  std::vector<Layer> layers_;
  AdamParams adam_{};
  int64_t step_ = 0;
};

// epsilon-greedy: argmax with probability 1-epsilon (ties to the lowest
// index), otherwise uniform over all actions.
Action select_action(std::span<const double> qvalues, double epsilon, Rng& rng);

// Fixed-capacity FIFO ring with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000);

  void push(const Experience& e);
  // Empty optional until the buffer holds at least batch_size experiences.
  std::optional<std::vector<Experience>> sample(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& at(std::size_t i) const { return storage_[i]; }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // ring write position once full
  std::vector<Experience> storage_;
};

}  // namespace tiltopt::rlcore
