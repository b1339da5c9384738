#pragma once

#include <cstdint>
#include <random>

namespace cabandit {

// One SplitMix64 step; mixes a 64-bit key into a well-distributed value.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the sub-stream addressed by (base, counter). Streams for distinct
// counters are independent for practical purposes, and the mapping is pure,
// so batch trajectories can be generated in any order or in parallel.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter) {
  return splitmix64(splitmix64(base) ^ splitmix64(counter * 0x9e3779b97f4a7c15ULL + 1));
}

// A single reproducible random stream. Distribution objects are constructed
// per call so no hidden cache state survives between draws; the sequence is a
// pure function of the seed and the call sequence.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  double normal(double mean, double sigma) {
    return std::normal_distribution<double>(mean, sigma)(gen_);
  }
  double bernoulli(double p) {
    return std::bernoulli_distribution(p)(gen_) ? 1.0 : 0.0;
  }
  double poisson(double mean) {
    return static_cast<double>(std::poisson_distribution<long>(mean)(gen_));
  }

  std::mt19937_64& raw() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cabandit
