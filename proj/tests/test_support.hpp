#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pbdcs/certify.hpp"
#include "pbdcs/design.hpp"
#include "pbdcs/hadamard.hpp"
#include "pbdcs/random.hpp"
#include "pbdcs/sensing.hpp"

namespace testing {

using namespace pbdcs;

inline std::shared_ptr<const SensingMatrix> make_matrix(const Design& d, HadamardFamily f) {
  return std::make_shared<const SensingMatrix>(build(d, hadamards_for(d, f)));
}

struct CorpusEntry {
  std::string name;
  std::shared_ptr<const SensingMatrix> matrix;
};

inline Design pg_minus_oval(unsigned q) {
  const Design pg = projective_plane(q);
  return remove_points(pg, find_conic_oval(pg, q));
}

inline Design pg11_minus_two_blocks() { return remove_blocks_with_points(projective_plane(11), {0, 1}); }

// The matrices the simulations are run on, plus small ones with the
// witnesses' preconditions.
inline std::vector<CorpusEntry> corpus() {
  return {
      {"fano-fourier", make_matrix(projective_plane(2), HadamardFamily::fourier)},
      {"pg3-real", make_matrix(projective_plane(3), HadamardFamily::real)},
      {"pg7-oval-fourier", make_matrix(pg_minus_oval(7), HadamardFamily::fourier)},
      {"pg7-fourier", make_matrix(projective_plane(7), HadamardFamily::fourier)},
      {"pg7-real", make_matrix(projective_plane(7), HadamardFamily::real)},
      {"pg11-blocks-fourier", make_matrix(pg11_minus_two_blocks(), HadamardFamily::fourier)},
      {"pg11-oval-fourier", make_matrix(pg_minus_oval(11), HadamardFamily::fourier)},
      {"sts25-real", make_matrix(steiner_triple_system(25), HadamardFamily::real)},
      {"sts25-fourier", make_matrix(steiner_triple_system(25), HadamardFamily::fourier)},
  };
}

// Number of blocks containing each unordered pair, counted from scratch.
inline std::vector<std::vector<int>> pair_coverage(const Design& d) {
  std::vector<std::vector<int>> c(d.v(), std::vector<int>(d.v(), 0));
  for (const Block& b : d.blocks())
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i + 1; j < b.size(); ++j) {
        ++c[b[i]][b[j]];
        ++c[b[j]][b[i]];
      }
  return c;
}

inline double smallest_singular_value(const Eigen::MatrixXcd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Calls f on every k-subset of {0..n-1} in lexicographic order; stops when f returns true.
template <typename F>
bool any_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (f(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline Eigen::MatrixXcd columns(const Eigen::MatrixXcd& m, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXcd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(static_cast<Eigen::Index>(cols[j]));
  return out;
}

// Complex t-sparse signal with uniform magnitudes in [lo, hi] and uniform phases.
inline Eigen::VectorXcd random_complex_sparse(Rng& rng, std::size_t N, std::size_t t, double lo = 0.1, double hi = 1.0) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N));
  for (std::size_t i : rng.sample(N, t)) {
    const double mag = rng.uniform(lo, hi);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    x(static_cast<Eigen::Index>(i)) = std::polar(mag, phase);
  }
  return x;
}

}  // namespace testing
