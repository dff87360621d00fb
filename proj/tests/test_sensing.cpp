#include <doctest.h>

#include <sstream>

#include "test_support.hpp"

using namespace pbdcs;
using testing::make_matrix;

TEST_SUITE("sensing") {

TEST_CASE("Fano plane with Fourier blocks is 7 x 21") {
  const auto m = make_matrix(projective_plane(2), HadamardFamily::fourier);
  CHECK(m->n() == 7);
  CHECK(m->N() == 21);
  const Eigen::MatrixXcd& e = m->entries();
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    CHECK(e.col(j).norm() == doctest::Approx(1.0).epsilon(1e-14));
    int nonzero = 0;
    for (Eigen::Index i = 0; i < e.rows(); ++i)
      if (std::abs(e(i, j)) > 0) {
        ++nonzero;
        CHECK(std::abs(e(i, j)) == doctest::Approx(1.0 / std::sqrt(3.0)));
      }
    CHECK(nonzero == 3);
  }
}

TEST_CASE("column blocks sit on the rows of the blocks through each point") {
  const Design d = testing::pg_minus_oval(5);
  const auto m = make_matrix(d, HadamardFamily::fourier);
  const SensingStructure& s = m->structure();
  CHECK(m->n() == d.block_count());
  CHECK(m->N() == d.total_replication());
  for (Point p = 0; p < d.v(); ++p) {
    CHECK(s.point(p).rows == d.blocks_through(p));
    CHECK(s.replication(p) == d.replication(p));
    for (std::size_t k = 0; k < s.replication(p); ++k) CHECK(s.point_of_column(s.point(p).first_col + k) == p);
  }
}

TEST_CASE("metadata reproduces the dense entries") {
  for (const auto& [name, m] : testing::corpus()) {
    if (m->N() > 1500) continue;
    CAPTURE(name);
    const SensingStructure& s = m->structure();
    double worst = 0;
    for (std::size_t i = 0; i < m->n(); ++i)
      for (std::size_t j = 0; j < m->N(); ++j)
        worst = std::max(worst, std::abs(s.entry(i, j) - m->entries()(Eigen::Index(i), Eigen::Index(j))));
    CHECK(worst < 1e-15);
    pbdcs::Rng rng(31);
    for (int t = 0; t < 5; ++t) {
      const Eigen::VectorXcd x = testing::random_complex_sparse(rng, m->N(), 1 + rng.below(20));
      CHECK((s.apply(x) - m->entries() * x).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Gram law and coherence on equireplicate matrices") {
  for (const auto& [name, m] : testing::corpus()) {
    CAPTURE(name);
    CHECK(gram_law_deviation(*m) < 1e-9);
    if (m->structure().equireplicate()) {
      const double r = double(m->structure().min_replication());
      CHECK(coherence(*m) == doctest::Approx(1.0 / r).epsilon(1e-12));
    }
  }
}

TEST_CASE("wrong Hadamard order is a construction error") {
  const Design d = projective_plane(2);
  std::vector<HadamardRef> hs(d.v(), std::make_shared<const HadamardMatrix>(fourier(4)));
  CHECK_THROWS_AS(build(d, hs), ConstructionError);
  hs.pop_back();
  CHECK_THROWS_AS(build(d, hs), ConstructionError);
}

TEST_CASE("hadamards_for shares one matrix per replication number") {
  const Design d = remove_points(projective_plane(3), PointSet({0}));
  const auto hs = hadamards_for(d, HadamardFamily::fourier);
  REQUIRE(hs.size() == d.v());
  for (Point a = 0; a < d.v(); ++a) {
    CHECK(hs[a]->order() == d.replication(a));
    for (Point b = 0; b < d.v(); ++b)
      if (d.replication(a) == d.replication(b)) CHECK(hs[a].get() == hs[b].get());
  }
}

TEST_CASE("realification is an isometry compatible with the vector map") {
  const auto m = make_matrix(testing::pg_minus_oval(5), HadamardFamily::fourier);
  const RealSensingMatrix rm = realify(m);
  CHECK(rm.rows() == 2 * m->n());
  CHECK(rm.cols() == 2 * m->N());
  CHECK(RealSensingMatrix::complex_column(7) == 3);
  pbdcs::Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXcd z = testing::random_complex_sparse(rng, m->N(), 10);
    const Eigen::VectorXd x = realify_vector(z);
    CHECK(x.norm() == doctest::Approx(z.norm()));
    CHECK((rm.entries() * x - realify_vector(m->entries() * z)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((complexify_vector(x) - z).cwiseAbs().maxCoeff() == 0.0);
  }
  // Block form of a single entry.
  Eigen::MatrixXcd one(1, 1);
  one(0, 0) = {2.0, 3.0};
  const Eigen::MatrixXd blk = realify(one);
  CHECK(blk(0, 0) == 2.0);
  CHECK(blk(0, 1) == 3.0);
  CHECK(blk(1, 0) == -3.0);
  CHECK(blk(1, 1) == 2.0);
}

TEST_CASE("sensing matrix file round-trip keeps entries and metadata") {
  const auto m = make_matrix(steiner_triple_system(13), HadamardFamily::fourier);
  std::stringstream ss;
  write_sensing_matrix(ss, *m);
  const SensingMatrix back = read_sensing_matrix(ss);
  CHECK(back.n() == m->n());
  CHECK(back.N() == m->N());
  CHECK((back.entries() - m->entries()).cwiseAbs().maxCoeff() == 0.0);
  for (Point p = 0; p < m->structure().v(); ++p) {
    CHECK(back.structure().point(p).rows == m->structure().point(p).rows);
    CHECK(back.structure().point(p).had_rows == m->structure().point(p).had_rows);
  }

  const Eigen::MatrixXd real = realify(m->entries());
  std::stringstream rs;
  write_real_matrix(rs, real);
  CHECK((read_real_matrix(rs) - real).cwiseAbs().maxCoeff() == 0.0);
}

}
