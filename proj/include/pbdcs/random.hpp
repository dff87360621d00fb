#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace pbdcs {

/// SplitMix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x);

/// Per-trial seed: splitmix64 chained over (master, sparsity, trial, stream).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sparsity, std::uint64_t trial, std::uint64_t stream);

/// mt19937_64 with the value transforms fixed here rather than taken from
/// <random> distributions, whose outputs differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on the open interval (0, 1): (bits53 + 0.5) / 2^53.
  double uniform_open();
  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }
  /// Uniform integer in [0, n); consumes no draws when n <= 1.
  std::size_t below(std::size_t n);
  /// Standard normal, Box-Muller cosine branch (two draws per value).
  double normal();
  /// t distinct indices from [0, n), ascending (partial Fisher-Yates).
  std::vector<std::size_t> sample(std::size_t n, std::size_t t);

 private:
  std::mt19937_64 engine_;
};

}  // namespace pbdcs
