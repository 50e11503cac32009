#pragma once

#include <cstdint>
#include <random>

namespace cutgraph {

// Deterministic pseudo-random stream. Identical (seed, stream) pairs
// reproduce the same draws bit-for-bit; distinct stream ids give
// statistically independent sequences, so replicas and annealing chains
// can run concurrently on derived streams.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Child stream; derive(i) != derive(j) for i != j.
  RngStream derive(std::uint64_t substream) const {
    return RngStream(mix(seed_, stream_), substream);
  }

  std::mt19937_64& engine() { return engine_; }

  // Uniform in [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  // Uniform integer in [0, bound); bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    return static_cast<std::uint64_t>(
        std::poisson_distribution<long long>(mean)(engine_));
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace cutgraph
