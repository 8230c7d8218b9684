#pragma once

#include <cstdint>
#include <random>

namespace tiltopt {

// Hash-based seed mixing, used to derive independent stream seeds from one
// master seed. Episode configs, UE drops, action noise and weight init each
// get their own stream so that runs stay reproducible regardless of worker
// count or evaluation order.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace stream {
inline constexpr uint64_t kEpisode = 0x00;
inline constexpr uint64_t kEpisodeConfig = 0x01;
inline constexpr uint64_t kUeDrop = 0x02;
inline constexpr uint64_t kAction = 0x03;
inline constexpr uint64_t kWeightInit = 0x04;
inline constexpr uint64_t kReplay = 0x05;
}  // namespace stream

inline uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
}

// mt19937_64 with portable bounded draws. The std distributions are
// implementation-defined, so integer and real draws are done by hand to keep
// byte-identical outputs a property of the seed alone.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Unbiased draw from [0, bound), bound >= 1.
  uint64_t bounded(uint64_t bound) {
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Discrete uniform over the closed range [lo, hi], step 1.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(bounded(static_cast<uint64_t>(hi - lo) + 1));
  }

  // Uniform over [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(bounded(n)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tiltopt
