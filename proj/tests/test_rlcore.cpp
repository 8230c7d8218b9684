#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tiltopt/errors.hpp"
#include "tiltopt/rlcore.hpp"

using namespace tiltopt;
using namespace tiltopt::rlcore;

TEST_SUITE_BEGIN("rlcore");

namespace {

kpi::StateVector random_state(Rng& rng) {
  kpi::StateVector s;
  for (double& v : s) v = rng.uniform01();
  return s;
}

// Independent forward pass: plain nested loops over the layer structs.
std::vector<double> oracle_forward(const QNetwork& net, const kpi::StateVector& state) {
  std::vector<double> act(state.begin(), state.end());
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<double> next(static_cast<std::size_t>(layers[l].out));
    for (int o = 0; o < layers[l].out; ++o) {
      double z = layers[l].b[static_cast<std::size_t>(o)];
      for (int i = 0; i < layers[l].in; ++i) {
        z += layers[l].w[static_cast<std::size_t>(o * layers[l].in + i)] * act[static_cast<std::size_t>(i)];
      }
      next[static_cast<std::size_t>(o)] = l + 1 < layers.size() && z < 0.0 ? 0.0 : z;
    }
    act = std::move(next);
  }
  return act;
}

double loss_of(const QNetwork& net, std::span<const Experience> batch) {
  double loss = 0.0;
  for (const Experience& e : batch) {
    const double q = net.forward(e.state)[static_cast<std::size_t>(e.action)];
    loss += (q - e.reward) * (q - e.reward);
  }
  return loss / static_cast<double>(batch.size());
}

}  // namespace

TEST_CASE("forward pass") {
  SUBCASE("zero output head gives all zeros") {
    QNetwork net({11, 64, 64, 3}, 1);
    auto& head = net.layers().back();
    std::fill(head.w.begin(), head.w.end(), 0.0);
    std::fill(head.b.begin(), head.b.end(), 0.0);
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
      const auto q = net.forward(random_state(rng));
      CHECK(q == std::vector<double>{0.0, 0.0, 0.0});
    }
  }
  SUBCASE("deterministic") {
    QNetwork net({11, 64, 64, 3}, 3);
    Rng rng(4);
    const auto s = random_state(rng);
    CHECK(net.forward(s) == net.forward(s));
  }
  SUBCASE("matches the independent matrix oracle") {
    Rng rng(5);
    for (uint64_t seed = 0; seed < 5; ++seed) {
      QNetwork net({11, 64, 64, 3}, seed);
      for (int i = 0; i < 20; ++i) {
        const auto s = random_state(rng);
        const auto got = net.forward(s);
        const auto want = oracle_forward(net, s);
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
          CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-6));
        }
      }
    }
  }
}

TEST_CASE("epsilon-greedy selection") {
  SUBCASE("greedy limit picks the argmax") {
    Rng rng(1);
    const double q[] = {5.0, 1.0, 1.0};
    for (int i = 0; i < 100; ++i) CHECK(select_action(q, 0.0, rng) == Action::Keep);
    const double q2[] = {0.0, 2.0, 1.0};
    CHECK(select_action(q2, 0.0, rng) == Action::Down);
  }
  SUBCASE("ties break to the lowest index") {
    Rng rng(1);
    const double q[] = {1.0, 1.0, 1.0};
    CHECK(select_action(q, 0.0, rng) == Action::Keep);
    const double q2[] = {0.0, 3.0, 3.0};
    CHECK(select_action(q2, 0.0, rng) == Action::Down);
  }
  SUBCASE("full exploration is uniform within 0.02 of one third") {
    Rng rng(77);
    const double q[] = {9.0, 1.0, 2.0};
    std::array<int, 3> counts{};
    const int draws = 30000;
    for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(select_action(q, 1.0, rng))]++;
    for (int a = 0; a < 3; ++a) {
      CHECK(std::abs(counts[static_cast<std::size_t>(a)] / static_cast<double>(draws) - 1.0 / 3.0) <= 0.02);
    }
  }
  SUBCASE("greedy selection is invariant to a constant head-bias shift") {
    QNetwork net({11, 32, 3}, 11);
    QNetwork shifted = net;
    for (double& b : shifted.layers().back().b) b += 123.456;
    Rng rng(6), rng2(6);
    for (int i = 0; i < 200; ++i) {
      const auto s = random_state(rng);
      CHECK(select_action(net.forward(s), 0.0, rng2) ==
            select_action(shifted.forward(s), 0.0, rng2));
    }
  }
}

TEST_CASE("train step") {
  SUBCASE("zero error means zero loss and unchanged parameters") {
    QNetwork net({11, 16, 3}, 21);
    Rng rng(22);
    std::vector<Experience> batch;
    for (int i = 0; i < 8; ++i) {
      Experience e;
      e.state = random_state(rng);
      e.action = static_cast<Action>(i % 3);
      e.reward = net.forward(e.state)[static_cast<std::size_t>(e.action)];
      batch.push_back(e);
    }
    const QNetwork before = net;
    const double loss = net.train_step(batch);
    CHECK(loss == doctest::Approx(0.0).epsilon(1e-18));
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      for (std::size_t i = 0; i < net.layers()[l].w.size(); ++i) {
        CHECK(net.layers()[l].w[i] ==
              doctest::Approx(before.layers()[l].w[i]).epsilon(1e-12));
      }
    }
  }

  SUBCASE("repeating one sample converges to its reward") {
    QNetwork net({11, 64, 64, 3}, 31);
    Rng rng(32);
    Experience e;
    e.state = random_state(rng);
    e.action = Action::Down;
    e.reward = 3.0;
    const std::vector<Experience> batch{e};
    for (int i = 0; i < 500; ++i) net.train_step(batch);
    CHECK(net.forward(e.state)[1] == doctest::Approx(3.0).epsilon(1e-2));
  }

  SUBCASE("returns the pre-update loss") {
    QNetwork net({11, 16, 3}, 41);
    Rng rng(42);
    std::vector<Experience> batch;
    for (int i = 0; i < 16; ++i) {
      batch.push_back({random_state(rng), static_cast<Action>(i % 3), rng.uniform_real(-5, 5)});
    }
    const double expected = loss_of(net, batch);
    CHECK(net.train_step(batch) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("loss is order-independent within a batch") {
    QNetwork a({11, 32, 3}, 51);
    QNetwork b = a;
    Rng rng(52);
    std::vector<Experience> batch;
    for (int i = 0; i < 32; ++i) {
      batch.push_back({random_state(rng), static_cast<Action>(i % 3), rng.uniform_real(-9, 9)});
    }
    std::vector<Experience> shuffled = batch;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(a.train_step(batch) == doctest::Approx(b.train_step(shuffled)).epsilon(1e-12));
  }

  SUBCASE("analytic gradient matches central finite differences") {
    // Relative error below 1e-3 with h = 1e-4, on every parameter of a small
    // network; the full 20-batch sweep runs in the acceptance suite.
    Rng rng(61);
    QNetwork net({11, 12, 10, 3}, 62);
    std::vector<Experience> batch;
    for (int i = 0; i < 8; ++i) {
      batch.push_back({random_state(rng), static_cast<Action>(i % 3), rng.uniform_real(-3, 3)});
    }
    // Analytic gradient recovered from the first Adam step: m = (1-b1)g, so
    // g = m / (1-b1) right after one step from zero moments.
    QNetwork stepped = net;
    stepped.train_step(batch);
    const double h = 1e-4;
    int checked = 0;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      for (std::size_t i = 0; i < net.layers()[l].w.size(); i += 7) {
        QNetwork plus = net, minus = net;
        plus.layers()[l].w[i] += h;
        minus.layers()[l].w[i] -= h;
        const double fd = (loss_of(plus, batch) - loss_of(minus, batch)) / (2 * h);
        const double analytic = stepped.layers()[l].mw[i] / 0.1;
        const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-8});
        CHECK(std::abs(fd - analytic) / denom < 1e-3);
        ++checked;
      }
    }
    CHECK(checked > 50);
  }

  SUBCASE("parameters stay finite under clipped random rewards") {
    QNetwork net({11, 64, 64, 3}, 71);
    Rng rng(72);
    std::vector<Experience> batch(4);
    for (int step = 0; step < 20000; ++step) {
      for (Experience& e : batch) {
        e.state = random_state(rng);
        e.action = static_cast<Action>(rng.index(3));
        e.reward = std::clamp(rng.uniform_real(-2000.0, 2000.0), -1000.0, 1000.0);
      }
      net.train_step(batch);
    }
    CHECK(net.finite_parameters());
    CHECK(net.step_counter() == 20000);
  }
}

TEST_CASE("replay buffer") {
  SUBCASE("fifo eviction at capacity") {
    ReplayBuffer buf(3);
    for (int i = 0; i < 4; ++i) {
      Experience e;
      e.reward = i;
      buf.push(e);
    }
    CHECK(buf.size() == 3);
    std::vector<double> rewards;
    for (std::size_t i = 0; i < buf.size(); ++i) rewards.push_back(buf.at(i).reward);
    std::sort(rewards.begin(), rewards.end());
    CHECK(rewards == std::vector<double>{1.0, 2.0, 3.0});  // 0 evicted first
  }
  SUBCASE("underfull buffer is not ready") {
    ReplayBuffer buf(100);
    Rng rng(1);
    CHECK(!buf.sample(1, rng).has_value());
    for (int i = 0; i < 63; ++i) buf.push({});
    CHECK(!buf.sample(64, rng).has_value());
    buf.push({});
    CHECK(buf.sample(64, rng).has_value());
  }
  SUBCASE("sampling is uniform per slot within 4 sigma") {
    const std::size_t slots = 64;
    ReplayBuffer buf(slots);
    for (std::size_t i = 0; i < slots; ++i) {
      Experience e;
      e.reward = static_cast<double>(i);
      buf.push(e);
    }
    Rng rng(123);
    std::vector<int> counts(slots, 0);
    const int draws = 100000;
    const int per_sample = 10;
    for (int i = 0; i < draws / per_sample; ++i) {
      const auto batch = buf.sample(per_sample, rng);
      for (const Experience& e : *batch) counts[static_cast<std::size_t>(e.reward)]++;
    }
    const double p = 1.0 / static_cast<double>(slots);
    const double expected = draws * p;
    const double sigma = std::sqrt(draws * p * (1 - p));
    for (std::size_t i = 0; i < slots; ++i) {
      CHECK(std::abs(counts[i] - expected) <= 4.0 * sigma);
    }
  }
}

TEST_CASE("checkpoints") {
  SUBCASE("round trip is bit-exact") {
    QNetwork net({11, 64, 64, 3}, 81);
    Rng rng(82);
    std::vector<Experience> batch;
    for (int i = 0; i < 64; ++i) {
      batch.push_back({random_state(rng), static_cast<Action>(i % 3), rng.uniform_real(-50, 50)});
    }
    for (int i = 0; i < 10; ++i) net.train_step(batch);

    const QNetwork loaded = QNetwork::load_checkpoint(net.save_checkpoint());
    CHECK(loaded.equal_parameters(net));
    CHECK(loaded.step_counter() == net.step_counter());
    for (int i = 0; i < 100; ++i) {
      const auto s = random_state(rng);
      CHECK(net.forward(s) == loaded.forward(s));
    }
  }
  SUBCASE("truncated checkpoint fails to load") {
    QNetwork net({11, 8, 3}, 91);
    const std::string bytes = net.save_checkpoint();
    CHECK_THROWS_AS(QNetwork::load_checkpoint(bytes.substr(0, bytes.size() / 2)), IoError);
    CHECK_THROWS_AS(QNetwork::load_checkpoint("{}"), IoError);
  }
  SUBCASE("shape or format mismatch fails to load") {
    QNetwork net({11, 8, 3}, 92);
    std::string bytes = net.save_checkpoint();
    const auto pos = bytes.find("tiltopt-qnet");
    bytes.replace(pos, 12, "other-format");
    CHECK_THROWS_AS(QNetwork::load_checkpoint(bytes), IoError);
  }
}

TEST_SUITE_END();
