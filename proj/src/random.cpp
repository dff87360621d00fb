#include "pbdcs/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pbdcs {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sparsity, std::uint64_t trial, std::uint64_t stream) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ sparsity);
  h = splitmix64(h ^ trial);
  return splitmix64(h ^ stream);
}

double Rng::uniform_open() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t Rng::below(std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t m = n;
  const std::uint64_t threshold = (0 - m) % m;  // 2^64 mod n
  while (true) {
    const std::uint64_t x = next();
    if (x >= threshold) return static_cast<std::size_t>(x % m);
  }
}

double Rng::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> Rng::sample(std::size_t n, std::size_t t) {
  if (t > n) throw std::invalid_argument("cannot sample " + std::to_string(t) + " of " + std::to_string(n) + " indices");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < t; ++i) std::swap(pool[i], pool[i + below(n - i)]);
  pool.resize(t);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace pbdcs
