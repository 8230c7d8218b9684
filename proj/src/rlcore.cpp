#include "tiltopt/rlcore.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "tiltopt/errors.hpp"

namespace tiltopt::rlcore {

using nlohmann::json;

QNetwork::QNetwork(std::vector<int> layer_sizes, uint64_t init_seed, AdamParams adam)
    : sizes_(std::move(layer_sizes)), adam_(adam) {
  if (sizes_.size() < 2) throw ConfigError("QNetwork needs at least input and output layers");
  Rng rng(init_seed);
  layers_.resize(sizes_.size() - 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Layer& layer = layers_[l];
    layer.in = sizes_[l];
    layer.out = sizes_[l + 1];
    const std::size_t n = static_cast<std::size_t>(layer.in) * layer.out;
    layer.w.resize(n);
    layer.b.assign(static_cast<std::size_t>(layer.out), 0.0);
    // He-style uniform fan-in scaling.
    const double limit = std::sqrt(6.0 / layer.in);
    for (double& w : layer.w) w = rng.uniform_real(-limit, limit);
    layer.mw.assign(n, 0.0);
    layer.vw.assign(n, 0.0);
    layer.mb.assign(layer.b.size(), 0.0);
    layer.vb.assign(layer.b.size(), 0.0);
  }
}

std::vector<double> QNetwork::forward(std::span<const double> input) const {
  std::vector<double> act(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    next.assign(static_cast<std::size_t>(layer.out), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      double z = layer.b[o];
      const double* w_row = &layer.w[static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) z += w_row[i] * act[i];
      next[o] = (l + 1 < layers_.size()) ? std::max(0.0, z) : z;
    }
    act.swap(next);
  }
  return act;
}

double QNetwork::train_step(std::span<const Experience> batch) {
  if (batch.empty()) throw ConfigError("train_step on empty batch");
  const std::size_t n_layers = layers_.size();

  // Gradient accumulators.
  std::vector<std::vector<double>> gw(n_layers), gb(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    gw[l].assign(layers_[l].w.size(), 0.0);
    gb[l].assign(layers_[l].b.size(), 0.0);
  }

  // Per-sample forward pass keeping activations, then backprop of the
  // squared error on the taken action's head.
  std::vector<std::vector<double>> act(n_layers + 1);
  double loss = 0.0;
  for (const Experience& e : batch) {
    act[0].assign(e.state.begin(), e.state.end());
    for (std::size_t l = 0; l < n_layers; ++l) {
      const Layer& layer = layers_[l];
      act[l + 1].assign(static_cast<std::size_t>(layer.out), 0.0);
      for (int o = 0; o < layer.out; ++o) {
        double z = layer.b[o];
        const double* w_row = &layer.w[static_cast<std::size_t>(o) * layer.in];
        for (int i = 0; i < layer.in; ++i) z += w_row[i] * act[l][i];
        act[l + 1][o] = (l + 1 < n_layers) ? std::max(0.0, z) : z;
      }
    }
    const int a = static_cast<int>(e.action);
    const double err = act[n_layers][a] - e.reward;
    loss += err * err;

    // delta at the output: dL/dq = 2 * err / batch for the taken action.
    std::vector<double> delta(layers_.back().b.size(), 0.0);
    delta[a] = 2.0 * err / static_cast<double>(batch.size());
    for (std::size_t l = n_layers; l-- > 0;) {
      const Layer& layer = layers_[l];
      std::vector<double> prev_delta;
      if (l > 0) prev_delta.assign(static_cast<std::size_t>(layer.in), 0.0);
      for (int o = 0; o < layer.out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        double* gw_row = &gw[l][static_cast<std::size_t>(o) * layer.in];
        const double* w_row = &layers_[l].w[static_cast<std::size_t>(o) * layer.in];
        for (int i = 0; i < layer.in; ++i) {
          gw_row[i] += d * act[l][i];
          if (l > 0) prev_delta[i] += d * w_row[i];
        }
        gb[l][o] += d;
      }
      if (l > 0) {
        // ReLU derivative at the hidden activation.
        for (int i = 0; i < layer.in; ++i) {
          if (act[l][i] <= 0.0) prev_delta[i] = 0.0;
        }
        delta.swap(prev_delta);
      }
    }
  }
  loss /= static_cast<double>(batch.size());
  if (!std::isfinite(loss)) {
    throw DivergenceError("non-finite training loss (divergence)");
  }

  // Adam update with bias correction.
  step_ += 1;
  const double b1 = adam_.beta1, b2 = adam_.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t l = 0; l < n_layers; ++l) {
    Layer& layer = layers_[l];
    for (std::size_t i = 0; i < layer.w.size(); ++i) {
      const double g = gw[l][i];
      layer.mw[i] = b1 * layer.mw[i] + (1.0 - b1) * g;
      layer.vw[i] = b2 * layer.vw[i] + (1.0 - b2) * g * g;
      layer.w[i] -= adam_.learning_rate * (layer.mw[i] / corr1) /
                    (std::sqrt(layer.vw[i] / corr2) + adam_.epsilon);
    }
    for (std::size_t i = 0; i < layer.b.size(); ++i) {
      const double g = gb[l][i];
      layer.mb[i] = b1 * layer.mb[i] + (1.0 - b1) * g;
      layer.vb[i] = b2 * layer.vb[i] + (1.0 - b2) * g * g;
      layer.b[i] -= adam_.learning_rate * (layer.mb[i] / corr1) /
                    (std::sqrt(layer.vb[i] / corr2) + adam_.epsilon);
    }
  }
  return loss;
}

bool QNetwork::finite_parameters() const {
  for (const Layer& layer : layers_) {
    for (double v : layer.w)
      if (!std::isfinite(v)) return false;
    for (double v : layer.b)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

bool QNetwork::equal_parameters(const QNetwork& other) const {
  if (sizes_ != other.sizes_ || step_ != other.step_) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].w != other.layers_[l].w || layers_[l].b != other.layers_[l].b) return false;
    if (layers_[l].mw != other.layers_[l].mw || layers_[l].vw != other.layers_[l].vw) return false;
    if (layers_[l].mb != other.layers_[l].mb || layers_[l].vb != other.layers_[l].vb) return false;
  }
  return true;
}

namespace {
constexpr const char* kCheckpointFormat = "tiltopt-qnet";
constexpr int kCheckpointVersion = 1;
}  // namespace

std::string QNetwork::save_checkpoint() const {
  json doc;
  doc["format"] = kCheckpointFormat;
  doc["version"] = kCheckpointVersion;
  doc["layer_sizes"] = sizes_;
  doc["step"] = step_;
  doc["adam"] = {{"learning_rate", adam_.learning_rate},
                 {"beta1", adam_.beta1},
                 {"beta2", adam_.beta2},
                 {"epsilon", adam_.epsilon}};
  json layers = json::array();
  for (const Layer& layer : layers_) {
    layers.push_back({{"in", layer.in},
                      {"out", layer.out},
                      {"w", layer.w},
                      {"b", layer.b},
                      {"mw", layer.mw},
                      {"vw", layer.vw},
                      {"mb", layer.mb},
                      {"vb", layer.vb}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump();
}

QNetwork QNetwork::load_checkpoint(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint parse error: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kCheckpointFormat) {
      throw IoError("checkpoint format mismatch");
    }
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw IoError("unsupported checkpoint version");
    }
    QNetwork net;
    net.sizes_ = doc.at("layer_sizes").get<std::vector<int>>();
    if (net.sizes_.size() < 2) throw IoError("checkpoint has malformed layer sizes");
    net.step_ = doc.at("step").get<int64_t>();
    const json& adam = doc.at("adam");
    net.adam_.learning_rate = adam.at("learning_rate").get<double>();
    net.adam_.beta1 = adam.at("beta1").get<double>();
    net.adam_.beta2 = adam.at("beta2").get<double>();
    net.adam_.epsilon = adam.at("epsilon").get<double>();
    const json& layers = doc.at("layers");
    if (layers.size() != net.sizes_.size() - 1) throw IoError("checkpoint layer count mismatch");
    net.layers_.resize(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      Layer& layer = net.layers_[l];
      const json& jl = layers[l];
      layer.in = jl.at("in").get<int>();
      layer.out = jl.at("out").get<int>();
      if (layer.in != net.sizes_[l] || layer.out != net.sizes_[l + 1]) {
        throw IoError("checkpoint layer shape mismatch");
      }
      layer.w = jl.at("w").get<std::vector<double>>();
      layer.b = jl.at("b").get<std::vector<double>>();
      layer.mw = jl.at("mw").get<std::vector<double>>();
      layer.vw = jl.at("vw").get<std::vector<double>>();
      layer.mb = jl.at("mb").get<std::vector<double>>();
      layer.vb = jl.at("vb").get<std::vector<double>>();
      const std::size_t n = static_cast<std::size_t>(layer.in) * layer.out;
      const std::size_t m = static_cast<std::size_t>(layer.out);
      if (layer.w.size() != n || layer.mw.size() != n || layer.vw.size() != n ||
          layer.b.size() != m || layer.mb.size() != m || layer.vb.size() != m) {
        throw IoError("checkpoint array length mismatch");
      }
    }
    return net;
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint field error: ") + e.what());
  }
}

Action select_action(std::span<const double> qvalues, double epsilon, Rng& rng) {
  if (epsilon > 0.0 && rng.uniform01() < epsilon) {
    return static_cast<Action>(rng.index(qvalues.size()));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < qvalues.size(); ++i) {
    if (qvalues[i] > qvalues[best]) best = i;
  }
  return static_cast<Action>(best);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  storage_.reserve(std::min<std::size_t>(capacity, 1 << 20));
}

void ReplayBuffer::push(const Experience& e) {
  if (storage_.size() < capacity_) {
    storage_.push_back(e);
  } else {
    storage_[next_] = e;
    next_ = (next_ + 1) % capacity_;
  }
}

std::optional<std::vector<Experience>> ReplayBuffer::sample(std::size_t batch_size,
                                                            Rng& rng) const {
  if (storage_.size() < batch_size) return std::nullopt;
  std::vector<Experience> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    batch.push_back(storage_[rng.index(storage_.size())]);
  }
  return batch;
}

}  // namespace tiltopt::rlcore
