#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "pbdcs/recovery.hpp"

namespace pbdcs {

namespace {

using Eigen::Index;

constexpr double max_condition = 1e12;
constexpr std::size_t max_row_sets = 100'000;

// Advances idx to the next q-subset of {0..n-1}; false when exhausted.
bool next_subset(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t q = idx.size();
  std::size_t i = q;
  while (i > 0 && idx[i - 1] == n - q + i - 1) --i;
  if (i == 0) return false;
  ++idx[i - 1];
  for (std::size_t j = i; j < q; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

}  // namespace

Eigen::VectorXcd initial_estimate(const SensingStructure& s, const Eigen::VectorXcd& y) {
  if (static_cast<std::size_t>(y.size()) != s.n())
    throw std::invalid_argument("initial_estimate: measurement length does not match row count");
  Eigen::VectorXcd est(static_cast<Index>(s.N()));
  for (Point p = 0; p < s.v(); ++p) {
    const auto& pl = s.point(p);
    Eigen::VectorXcd yp(static_cast<Index>(pl.width));
    for (std::size_t k = 0; k < pl.width; ++k)
      yp(static_cast<Index>(pl.had_rows[k])) = y(static_cast<Index>(pl.rows[k]));
    est.segment(static_cast<Index>(pl.first_col), static_cast<Index>(pl.width)) =
        s.hadamard(p).entries().adjoint() * yp / std::sqrt(static_cast<double>(pl.width));
  }
  return est;
}

ComplexRecovery alg1_recover(const SensingStructure& s, const Eigen::VectorXcd& y, std::size_t support_size) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t r1 = s.min_replication();
  if (support_size == 0) support_size = r1;
  if (support_size > r1)
    throw std::invalid_argument("alg1_recover: support size " + std::to_string(support_size) +
                                " exceeds the smallest replication number " + std::to_string(r1));
  support_size = std::min(support_size, s.N());

  ComplexRecovery res;
  res.status = RecoveryStatus::converged;

  // Step 1.
  const Eigen::VectorXcd est = initial_estimate(s, y);

  // Step 2: largest magnitudes, ties to the lowest index.
  std::vector<std::size_t> order(s.N());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(est(static_cast<Index>(a))) > std::abs(est(static_cast<Index>(b)));
  });
  order.resize(support_size);
  std::sort(order.begin(), order.end());
  std::vector<std::vector<std::size_t>> cols_of(s.v());
  for (auto c : order) cols_of[s.point_of_column(c)].push_back(c);
  std::vector<char> active(s.v(), 0);
  for (Point p = 0; p < s.v(); ++p) active[p] = !cols_of[p].empty();

  res.estimate = Eigen::VectorXcd::Zero(static_cast<Index>(s.N()));
  for (Point p = 0; p < s.v() && res.status == RecoveryStatus::converged; ++p) {
    if (!active[p]) continue;
    const auto& pl = s.point(p);
    const auto& cols = cols_of[p];
    const std::size_t q = cols.size();

    // Step 3: rows of p meeting no other active point.
    std::vector<std::size_t> clean;  // positions k into pl.rows
    for (std::size_t k = 0; k < pl.width; ++k) {
      const auto& pts = s.row_points(pl.rows[k]);
      if (std::none_of(pts.begin(), pts.end(), [&](Point o) { return o != p && active[o]; })) clean.push_back(k);
    }
    if (clean.size() < q) {
      res.status = RecoveryStatus::singularSystem;
      break;
    }

    // Step 4: local q x q solve, retrying later row sets when ill-conditioned.
    const double scale = 1.0 / std::sqrt(static_cast<double>(pl.width));
    std::vector<std::size_t> pick(q);
    std::iota(pick.begin(), pick.end(), 0);
    bool solved = false;
    for (std::size_t attempt = 0; attempt < max_row_sets; ++attempt) {
      Eigen::MatrixXcd sys(static_cast<Index>(q), static_cast<Index>(q));
      Eigen::VectorXcd rhs(static_cast<Index>(q));
      for (std::size_t a = 0; a < q; ++a) {
        const std::size_t k = clean[pick[a]];
        rhs(static_cast<Index>(a)) = y(static_cast<Index>(pl.rows[k]));
        for (std::size_t b = 0; b < q; ++b)
          sys(static_cast<Index>(a), static_cast<Index>(b)) = scale * s.hadamard(p)(pl.had_rows[k], cols[b] - pl.first_col);
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double smin = sv(static_cast<Index>(q) - 1);
      if (smin > 0.0 && sv(0) / smin <= max_condition) {
        const Eigen::VectorXcd z = svd.solve(rhs);
        for (std::size_t b = 0; b < q; ++b) res.estimate(static_cast<Index>(cols[b])) = z(static_cast<Index>(b));
        ++res.iterations;
        solved = true;
        break;
      }
      if (!next_subset(pick, clean.size())) break;
    }
    if (!solved) res.status = RecoveryStatus::singularSystem;
  }

  res.residualNorm = (s.apply(res.estimate) - y).norm();
  res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace pbdcs
