#include "pbdcs/certify.hpp"

#include <algorithm>
#include <cmath>

namespace pbdcs {

namespace {

std::optional<std::size_t> shared_row(const SensingStructure& s, Point a, Point b) {
  const auto& ra = s.point(a).rows;
  const auto& rb = s.point(b).rows;
  std::vector<std::size_t> common;
  std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(common));
  if (common.empty()) return std::nullopt;
  return common.front();
}

// Position k with rows[k] == row.
std::size_t slot_of(const PointLayout& pl, std::size_t row) {
  auto it = std::lower_bound(pl.rows.begin(), pl.rows.end(), row);
  return static_cast<std::size_t>(it - pl.rows.begin());
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  long double r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return r > 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(r + 0.5L);
}

bool arc_ready(const SensingStructure& s, Point p, std::size_t r) {
  return s.replication(p) == r && s.hadamard(p).is_real();
}

}  // namespace

std::size_t sparsity(const Eigen::VectorXcd& x, double rel) {
  if (x.size() == 0) return 0;
  const double cut = rel * x.cwiseAbs().maxCoeff();
  std::size_t s = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i)) > cut) ++s;
  return s;
}

Eigen::VectorXcd spark_witness_two_points(const SensingMatrix& m, Point p1, Point p2) {
  const auto& s = m.structure();
  if (p1 == p2) throw ConstructionError("two-point witness needs distinct points");
  if (p1 >= s.v() || p2 >= s.v()) throw ConstructionError("two-point witness: point out of range");
  auto row = shared_row(s, p1, p2);
  if (!row) throw ConstructionError("points share no block");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.N()));
  const Point pts[2] = {p1, p2};
  for (int i = 0; i < 2; ++i) {
    const auto& pl = s.point(pts[i]);
    const double r = static_cast<double>(pl.width);
    const double target = i == 0 ? 1.0 / r : -1.0 / r;
    const std::size_t hrow = pl.had_rows[slot_of(pl, *row)];
    for (std::size_t c = 0; c < pl.width; ++c) {
      const std::complex<double> entry = s.hadamard(pts[i])(hrow, c) / std::sqrt(r);
      v(static_cast<Eigen::Index>(pl.first_col + c)) = target / entry;
    }
  }
  return v;
}

Eigen::VectorXcd arc_nullvector(const SensingMatrix& m, const PointSet& arc) {
  const auto& s = m.structure();
  if (arc.size() != 3) throw ConstructionError("arc nullvector needs exactly three points");
  const auto& p = arc.indices();
  for (Point x : p)
    if (x >= s.v()) throw ConstructionError("arc point out of range");
  const std::size_t r = s.replication(p[0]);
  for (Point x : p) {
    if (!s.hadamard(x).is_real())
      throw ConstructionError("arc nullvector: point " + std::to_string(x) + " has a complex Hadamard block");
    if (s.replication(x) != r) throw ConstructionError("arc nullvector: replication numbers differ");
  }
  if (r % 4 != 0) throw ConstructionError("arc nullvector: replication number must be divisible by 4");
  for (std::size_t row = 0; row < s.n(); ++row) {
    const auto& pts = s.row_points(row);
    if (std::all_of(p.begin(), p.end(), [&](Point x) { return std::binary_search(pts.begin(), pts.end(), x); }))
      throw ConstructionError("arc nullvector: the three points lie in a common block (not an arc)");
  }
  auto ab = shared_row(s, p[0], p[1]), ac = shared_row(s, p[0], p[2]), bc = shared_row(s, p[1], p[2]);
  if (!ab || !ac || !bc) throw ConstructionError("arc nullvector: points do not pairwise share blocks");

  // Point x contributes +(r/2)/sqrt(r) in its first row and -(r/2)/sqrt(r)
  // in its second; the orientation below cancels all three shared rows.
  const std::pair<std::size_t, std::size_t> oriented[3] = {{*ab, *ac}, {*bc, *ab}, {*ac, *bc}};
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.N()));
  for (int i = 0; i < 3; ++i) {
    const auto& pl = s.point(p[i]);
    const auto& h = s.hadamard(p[i]);
    const std::size_t h1 = pl.had_rows[slot_of(pl, oriented[i].first)];
    const std::size_t h2 = pl.had_rows[slot_of(pl, oriented[i].second)];
    for (std::size_t c = 0; c < r; ++c) {
      const double a = h(h1, c).real(), b = h(h2, c).real();
      if (a != b) v(static_cast<Eigen::Index>(pl.first_col + c)) = a;
    }
  }
  return v;
}

std::optional<PointSet> find_arc_triple(const SensingStructure& s) {
  if (s.v() < 3) return std::nullopt;
  const std::size_t r = s.replication(0);
  if (r % 4 != 0) return std::nullopt;
  for (Point a = 0; a < s.v(); ++a) {
    if (!arc_ready(s, a, r)) continue;
    for (Point b = a + 1; b < s.v(); ++b) {
      if (!arc_ready(s, b, r)) continue;
      auto ab = shared_row(s, a, b);
      if (!ab) continue;
      const auto& line = s.row_points(*ab);
      for (Point c = b + 1; c < s.v(); ++c) {
        if (!arc_ready(s, c, r) || std::binary_search(line.begin(), line.end(), c)) continue;
        if (shared_row(s, a, c) && shared_row(s, b, c)) return PointSet({a, b, c});
      }
    }
  }
  return std::nullopt;
}

SparkResult brute_spark(const SensingMatrix& m, std::size_t smax, std::uint64_t budget) {
  const std::size_t N = m.N();
  const std::size_t n = m.n();
  SparkResult result;
  result.smax = smax;
  std::uint64_t needed = 0;
  for (std::size_t s = 1; s <= std::min(smax, N); ++s) {
    const auto c = binomial(N, s);
    needed = (c == UINT64_MAX || needed + c < needed) ? UINT64_MAX : needed + c;
  }
  if (needed > budget) throw SearchBudgetExceeded(needed, budget);

  const double threshold = 1e-9 * std::sqrt(static_cast<double>(N));
  const auto& a = m.entries();
  for (std::size_t s = 1; s <= std::min(smax, N); ++s) {
    if (s > n) {
      result.spark = s;
      return result;
    }
    std::vector<Eigen::Index> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = static_cast<Eigen::Index>(i);
    while (true) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a(Eigen::all, idx));
      if (svd.singularValues()(static_cast<Eigen::Index>(s) - 1) < threshold) {
        result.spark = s;
        return result;
      }
      std::size_t i = s;
      while (i > 0 && static_cast<std::size_t>(idx[i - 1]) == N - s + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return result;
}

NonrecoverablePair split_nonrecoverable(const SensingMatrix& m, const Eigen::VectorXcd& nullvec, double tol) {
  if (static_cast<std::size_t>(nullvec.size()) != m.N()) throw ConstructionError("split: vector length mismatch");
  const double residual = (m.entries() * nullvec).cwiseAbs().maxCoeff();
  if (residual > tol)
    throw ConstructionError("split: vector is not in the nullspace (||Phi v||_inf = " + std::to_string(residual) + ")");
  std::vector<Eigen::Index> support;
  const double cut = 1e-12 * nullvec.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < nullvec.size(); ++i)
    if (std::abs(nullvec(i)) > cut) support.push_back(i);
  if (support.size() < 2) throw ConstructionError("split: nullvector sparsity must be at least 2");

  NonrecoverablePair out;
  out.m1 = Eigen::VectorXcd::Zero(nullvec.size());
  out.m2 = Eigen::VectorXcd::Zero(nullvec.size());
  const std::size_t half = support.size() / 2;
  for (std::size_t k = 0; k < support.size(); ++k)
    (k < half ? out.m1 : out.m2)(support[k]) = nullvec(support[k]);
  out.image_gap = (m.entries() * out.m2 + m.entries() * out.m1).cwiseAbs().maxCoeff();
  if (out.image_gap > tol) throw ConstructionError("split: halves do not have equal images");
  return out;
}

RecoveryBounds recovery_guarantee_bounds(const SensingMatrix& m) {
  const auto& s = m.structure();
  RecoveryBounds b;
  const std::size_t n = s.n();
  while (16 * b.t_guaranteed * b.t_guaranteed < n) ++b.t_guaranteed;
  if (b.t_guaranteed == 0) b.t_guaranteed = 1;

  if (s.v() >= 2) {
    std::vector<std::size_t> r;
    for (Point p = 0; p < s.v(); ++p) r.push_back(s.replication(p));
    std::partial_sort(r.begin(), r.begin() + 2, r.end());
    b.witness_sparsity = r[0] + r[1];
    b.witness = "two-point";
  }
  if (s.equireplicate()) {
    if (auto arc = find_arc_triple(s)) {
      const std::size_t arc_sparsity = 3 * s.replication(0) / 2;
      if (b.witness_sparsity == 0 || arc_sparsity < b.witness_sparsity) {
        b.witness_sparsity = arc_sparsity;
        b.witness = "arc";
      }
    }
  }
  if (b.witness_sparsity > 0) b.t_impossible = (b.witness_sparsity + 1) / 2;
  return b;
}

}  // namespace pbdcs
