// Seeded random source. Every stochastic component takes an Rng explicitly;
// nothing in the library touches global random state, so runs are
// reproducible from a single master seed.
#pragma once

#include <cstdint>
#include <random>

namespace pcvx {

// splitmix64; used to derive independent stream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  // [0, n)
  int uniform_int(int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(gen_);
  }

  // Distribution objects are constructed per call so no hidden state
  // survives between draws; the draw sequence depends only on the seed.
  double normal(double mean, double stddev) {
    if (stddev <= 0.0) return mean;
    return std::normal_distribution<double>(mean, stddev)(gen_);
  }

  // Unit-mean exponential models Rayleigh-fading power gains.
  double exponential_unit_mean() {
    return std::exponential_distribution<double>(1.0)(gen_);
  }

  // Independent child stream.
  Rng fork() { return Rng(gen_()); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace pcvx
