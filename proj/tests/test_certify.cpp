#include <doctest.h>

#include "test_support.hpp"

using namespace pbdcs;
using testing::make_matrix;

namespace {

// Smallest k <= kmax such that some k columns have rank < k; 0 if none.
std::size_t oracle_spark(const Eigen::MatrixXcd& a, std::size_t kmax) {
  const std::size_t N = static_cast<std::size_t>(a.cols());
  for (std::size_t k = 1; k <= kmax; ++k) {
    const bool found = testing::any_subset(N, k, [&](const std::vector<std::size_t>& cols) {
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(testing::columns(a, cols));
      lu.setThreshold(1e-10);
      return lu.rank() < static_cast<Eigen::Index>(k);
    });
    if (found) return k;
  }
  return 0;
}

double image_inf(const SensingMatrix& m, const Eigen::VectorXcd& v) { return (m.entries() * v).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("certify") {

TEST_CASE("Fano spark matches the rank oracle") {
  const auto m = make_matrix(projective_plane(2), HadamardFamily::fourier);
  CHECK(oracle_spark(m->entries(), 6) == 6);
  const SparkResult sr = brute_spark(*m, 6);
  REQUIRE(sr.spark.has_value());
  CHECK(*sr.spark == 6);
  CHECK_FALSE(brute_spark(*m, 5).spark.has_value());
  CHECK(brute_spark(*m, 5).exceeds_smax());
}

TEST_CASE("PG(2,3) with real blocks has no four dependent columns") {
  const auto m = make_matrix(projective_plane(3), HadamardFamily::real);
  CHECK(oracle_spark(m->entries(), 4) == 0);
  CHECK_FALSE(brute_spark(*m, 4).spark.has_value());
}

TEST_CASE("brute_spark refuses oversized searches") {
  const auto m = make_matrix(testing::pg_minus_oval(7), HadamardFamily::fourier);
  CHECK_THROWS_AS(brute_spark(*m, 16, 1000), SearchBudgetExceeded);
}

TEST_CASE("two-point witnesses are nullvectors of sparsity r1 + r2") {
  for (const auto& [name, m] : testing::corpus()) {
    CAPTURE(name);
    const SensingStructure& s = m->structure();
    pbdcs::Rng rng(4);
    for (int trial = 0; trial < 5; ++trial) {
      const auto pts = rng.sample(s.v(), 2);
      const Eigen::VectorXcd v = spark_witness_two_points(*m, pts[0], pts[1]);
      CHECK(sparsity(v) == s.replication(pts[0]) + s.replication(pts[1]));
      CHECK(image_inf(*m, v) < 1e-9);
      for (std::size_t c = 0; c < m->N(); ++c) {
        const Point p = s.point_of_column(c);
        if (p != pts[0] && p != pts[1]) CHECK(v(Eigen::Index(c)) == 0.0);
      }
    }
  }
}

TEST_CASE("arc nullvectors need real blocks and an arc") {
  const auto real = make_matrix(projective_plane(3), HadamardFamily::real);
  const auto arc = find_arc_triple(real->structure());
  REQUIRE(arc.has_value());
  CHECK(is_arc(projective_plane(3), *arc));
  const Eigen::VectorXcd v = arc_nullvector(*real, *arc);
  CHECK(sparsity(v) == 6);
  CHECK(image_inf(*real, v) < 1e-12);

  const auto fourier_m = make_matrix(projective_plane(3), HadamardFamily::fourier);
  CHECK_FALSE(find_arc_triple(fourier_m->structure()).has_value());
}

TEST_CASE("splitting a nullvector gives two preimages of one sample") {
  const auto m = make_matrix(testing::pg_minus_oval(7), HadamardFamily::fourier);
  const Eigen::VectorXcd v = spark_witness_two_points(*m, 0, 1);
  const NonrecoverablePair pr = split_nonrecoverable(*m, v);
  CHECK(sparsity(pr.m1) == 8);
  CHECK(sparsity(pr.m2) == 8);
  CHECK(((m->entries() * pr.m2) - (m->entries() * (-pr.m1))).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(pr.image_gap < 1e-9);
  CHECK((pr.m1 + pr.m2 - v).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("odd witness sparsity splits floor and ceil") {
  // Near-pencil on four points: replication 3 at the centre, 2 elsewhere.
  const auto m = make_matrix(Design(4, {{1, 2, 3}, {0, 1}, {0, 2}, {0, 3}}), HadamardFamily::fourier);
  const SensingStructure& s = m->structure();
  Point lo = 0, hi = 0;
  for (Point p = 0; p < s.v(); ++p) {
    if (s.replication(p) < s.replication(lo)) lo = p;
    if (s.replication(p) > s.replication(hi)) hi = p;
  }
  REQUIRE(s.replication(lo) != s.replication(hi));
  const Eigen::VectorXcd v = spark_witness_two_points(*m, lo, hi);
  REQUIRE(sparsity(v) % 2 == 1);
  const NonrecoverablePair pr = split_nonrecoverable(*m, v);
  CHECK(sparsity(pr.m1) == sparsity(v) / 2);
  CHECK(sparsity(pr.m2) == sparsity(v) / 2 + 1);
}

TEST_CASE("split rejects vectors outside the kernel") {
  const auto m = make_matrix(projective_plane(2), HadamardFamily::fourier);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(21);
  e(0) = 1.0;
  CHECK_THROWS(split_nonrecoverable(*m, e));
}

TEST_CASE("recovery bounds") {
  const auto oval7 = make_matrix(testing::pg_minus_oval(7), HadamardFamily::fourier);
  const RecoveryBounds b = recovery_guarantee_bounds(*oval7);
  CHECK(b.t_guaranteed == 2);  // ceil(sqrt(57) / 4)
  REQUIRE(b.t_impossible.has_value());
  CHECK(*b.t_impossible == 8);
  CHECK(b.witness == "two-point");

  const auto sts = make_matrix(steiner_triple_system(25), HadamardFamily::real);
  const RecoveryBounds bs = recovery_guarantee_bounds(*sts);
  CHECK(bs.witness == "arc");
  CHECK(bs.witness_sparsity == 18);
  CHECK(*bs.t_impossible == 9);
}

TEST_CASE("sparsity counts relative to the largest entry") {
  Eigen::VectorXcd x(4);
  x << 1.0, 1e-13, 0.0, std::complex<double>(0, -2);
  CHECK(sparsity(x) == 2);
  CHECK(sparsity(x, 1e-14) == 3);
  CHECK(sparsity(Eigen::VectorXcd::Zero(3)) == 0);
}

}
