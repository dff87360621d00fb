#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "test_support.hpp"

using namespace pbdcs;
using testing::pair_coverage;

namespace {

// Every pair of points is covered exactly once.
void check_pairwise_balanced(const Design& d) {
  const auto c = pair_coverage(d);
  for (Point a = 0; a < d.v(); ++a)
    for (Point b = a + 1; b < d.v(); ++b) REQUIRE(c[a][b] == 1);
}

long det3(const std::array<unsigned, 3>& a, const std::array<unsigned, 3>& b, const std::array<unsigned, 3>& c) {
  const long x = long(a[0]) * (long(b[1]) * c[2] - long(b[2]) * c[1]);
  const long y = long(a[1]) * (long(b[0]) * c[2] - long(b[2]) * c[0]);
  const long z = long(a[2]) * (long(b[0]) * c[1] - long(b[1]) * c[0]);
  return x - y + z;
}

}  // namespace

TEST_SUITE("design") {

TEST_CASE("projective planes have the BIBD(q^2+q+1, q+1, 1) parameters") {
  for (unsigned q : {2u, 3u, 5u, 7u, 11u}) {
    CAPTURE(q);
    const Design d = projective_plane(q);
    const std::size_t v = q * q + q + 1;
    CHECK(d.v() == v);
    CHECK(d.block_count() == v);
    CHECK(d.block_sizes() == std::set<std::size_t>{q + 1});
    for (std::size_t r : d.replication()) CHECK(r == q + 1);
    CHECK(d.total_replication() == v * (q + 1));
    check_pairwise_balanced(d);
    CHECK(validate_pbd(d).valid());
  }
}

TEST_CASE("plane coordinates round-trip through the point index") {
  const unsigned q = 5;
  for (Point p = 0; p < q * q + q + 1; ++p) CHECK(plane_point_index(q, plane_coordinates(q, p)) == p);
  // Scalar multiples name the same point.
  CHECK(plane_point_index(q, {2, 4, 1}) == plane_point_index(q, {1, 2, 3}));
}

TEST_CASE("plane blocks are collinear triples by coordinates") {
  const unsigned q = 5;
  const Design d = projective_plane(q);
  for (const Block& b : d.blocks())
    for (std::size_t i = 2; i < b.size(); ++i)
      CHECK(det3(plane_coordinates(q, b[0]), plane_coordinates(q, b[1]), plane_coordinates(q, b[i])) % long(q) == 0);
}

TEST_CASE("non-prime plane orders are rejected") {
  CHECK_THROWS_AS(projective_plane(4), DesignError);
  CHECK_THROWS_AS(projective_plane(9), DesignError);
  CHECK_THROWS_AS(projective_plane(1), DesignError);
}

TEST_CASE("Steiner triple systems on admissible orders") {
  for (std::size_t v : {3u, 7u, 9u, 13u, 15u, 19u, 21u, 25u, 27u, 31u}) {
    CAPTURE(v);
    const Design d = steiner_triple_system(v);
    CHECK(d.v() == v);
    CHECK(d.block_count() == v * (v - 1) / 6);
    CHECK(d.block_sizes() == std::set<std::size_t>{3});
    for (std::size_t r : d.replication()) CHECK(r == (v - 1) / 2);
    check_pairwise_balanced(d);
  }
  for (std::size_t v : {4u, 5u, 8u, 11u, 2u}) CHECK_THROWS_AS(steiner_triple_system(v), DesignError);
}

TEST_CASE("the conic is an oval: q+1 points, no three collinear") {
  for (unsigned q : {3u, 5u, 7u, 11u}) {
    CAPTURE(q);
    const Design d = projective_plane(q);
    const PointSet oval = find_conic_oval(d, q);
    CHECK(oval.size() == q + 1);
    CHECK(is_arc(d, oval));
    const auto& ix = oval.indices();
    for (std::size_t a = 0; a < ix.size(); ++a)
      for (std::size_t b = a + 1; b < ix.size(); ++b)
        for (std::size_t c = b + 1; c < ix.size(); ++c)
          CHECK(det3(plane_coordinates(q, ix[a]), plane_coordinates(q, ix[b]), plane_coordinates(q, ix[c])) % long(q) != 0);
  }
}

TEST_CASE("a line is not an arc") {
  const Design d = projective_plane(3);
  CHECK_FALSE(is_arc(d, PointSet(d.block(0))));
}

TEST_CASE("removing an oval from PG(2,7)") {
  const Design d = testing::pg_minus_oval(7);
  CHECK(d.v() == 49);
  CHECK(d.block_count() == 57);
  CHECK(d.block_sizes() == std::set<std::size_t>{6, 7, 8});
  for (std::size_t r : d.replication()) CHECK(r == 8);
  check_pairwise_balanced(d);
  CHECK(d.total_replication() == 392);
}

TEST_CASE("removing two blocks and their points from PG(2,11)") {
  const Design d = testing::pg11_minus_two_blocks();
  CHECK(d.v() == 110);
  CHECK(d.block_count() == 131);
  CHECK(d.block_sizes() == std::set<std::size_t>{10, 11});
  for (std::size_t r : d.replication()) CHECK(r == 12);
  check_pairwise_balanced(d);
}

TEST_CASE("point maps record the parent indices") {
  const Design pg = projective_plane(3);
  const PointSet gone({0, 5});
  const Design d = remove_points(pg, gone);
  CHECK(d.v() == pg.v() - 2);
  REQUIRE(d.point_map().size() == pg.v());
  CHECK(d.point_map()[0] == Design::removed);
  CHECK(d.point_map()[5] == Design::removed);
  CHECK(d.point_map()[1] == 0);
}

TEST_CASE("random point removals keep the design pairwise balanced") {
  const Design pg = projective_plane(5);
  pbdcs::Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const auto drop = rng.sample(pg.v(), 1 + rng.below(10));
    const Design d = remove_points(pg, PointSet(drop));
    CAPTURE(trial);
    CHECK(d.v() == pg.v() - drop.size());
    check_pairwise_balanced(d);
    const ValidationReport rep = validate_pbd(d);
    CHECK(rep.valid());
    CHECK(rep.replication_sum == rep.block_size_sum);
    for (const Block& b : d.blocks()) CHECK(b.size() >= 2);
  }
}

TEST_CASE("validate_pbd flags a doubly covered pair") {
  const Design bad(4, {{0, 1, 2}, {0, 1, 3}, {2, 3}});
  const ValidationReport rep = validate_pbd(bad);
  CHECK_FALSE(rep.valid());
  CHECK_FALSE(rep.pair_violations.empty());
}

TEST_CASE("blocks_through and block_containing agree") {
  const Design d = projective_plane(3);
  for (Point a = 0; a < d.v(); ++a) {
    CHECK(d.blocks_through(a).size() == d.replication(a));
    for (Point b = a + 1; b < d.v(); ++b) {
      const auto blk = d.block_containing(a, b);
      REQUIRE(blk.has_value());
      const Block& B = d.block(*blk);
      CHECK(std::find(B.begin(), B.end(), a) != B.end());
      CHECK(std::find(B.begin(), B.end(), b) != B.end());
    }
  }
}

TEST_CASE("design text round-trip") {
  const Design d = testing::pg_minus_oval(5);
  std::stringstream ss;
  write_design(ss, d);
  const Design back = read_design(ss);
  CHECK(back == d);
  std::istringstream junk("pbd v=3 lambda=1\n0 1 7\n");
  CHECK_THROWS(read_design(junk));
}

}
