#include <doctest.h>

#include <sstream>

#include "test_support.hpp"

using namespace pbdcs;

namespace {

bool is_prime(std::size_t r) {
  if (r < 2) return false;
  for (std::size_t d = 2; d * d <= r; ++d)
    if (r % d == 0) return false;
  return true;
}

}  // namespace

TEST_SUITE("hadamard") {

TEST_CASE("Fourier entries are the roots of unity") {
  for (std::size_t r = 1; r <= 16; ++r) {
    const HadamardMatrix h = fourier(r);
    CHECK(h.order() == r);
    CHECK(h.kind() == HadamardKind::fourier);
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t k = 0; k < r; ++k) {
        const std::complex<double> expected = std::polar(1.0, 2.0 * M_PI * double(j * k % r) / double(r));
        CHECK(std::abs(h(j, k) - expected) < 1e-13);
      }
    CHECK(h.orthogonality_error() < 1e-12);
  }
}

TEST_CASE("real Hadamard matrices are +-1 and orthogonal") {
  for (std::size_t r : {1u, 2u, 4u, 8u, 12u, 16u, 20u, 24u, 32u, 44u}) {
    CAPTURE(r);
    const HadamardMatrix h = real_hadamard(r);
    CHECK(h.is_real());
    const Eigen::MatrixXd re = h.entries().real();
    CHECK(((re.array().abs() - 1.0).abs() < 1e-15).all());
    const Eigen::MatrixXd gram = re * re.transpose();
    CHECK((gram - double(r) * Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(real_hadamard(12).kind() == HadamardKind::paley);
  CHECK(real_hadamard(8).kind() == HadamardKind::sylvester);
  for (std::size_t r : {3u, 6u, 10u}) CHECK_THROWS_AS(real_hadamard(r), HadamardError);
}

TEST_CASE("constructor rejects matrices that break either invariant") {
  Eigen::MatrixXcd not_unimodular = fourier(3).entries();
  not_unimodular(1, 1) *= 1.1;
  CHECK_THROWS_AS(HadamardMatrix(not_unimodular, HadamardKind::custom), HadamardError);
  Eigen::MatrixXcd not_orthogonal = Eigen::MatrixXcd::Ones(2, 2);
  CHECK_THROWS_AS(HadamardMatrix(not_orthogonal, HadamardKind::custom), HadamardError);
}

TEST_CASE("minimum support of column combinations") {
  for (std::size_t r = 2; r <= 8; ++r) {
    const HadamardMatrix h = fourier(r);
    for (std::size_t u = 1; u <= r; ++u) {
      CAPTURE(r);
      CAPTURE(u);
      const std::size_t s = min_support_combination(h, u);
      CHECK(s >= (r + u - 1) / u);
      if (r % u == 0) CHECK(s == r / u);
      if (is_prime(r)) CHECK(s == r - u + 1);
    }
  }
  // Two rows of a real Hadamard matrix agree on half the coordinates.
  CHECK(min_support_combination(real_hadamard(8), 2) == 4);
}

TEST_CASE("random combinations never beat the computed minimum") {
  pbdcs::Rng rng(8);
  for (std::size_t r : {4u, 6u}) {
    const HadamardMatrix h = fourier(r);
    for (std::size_t u = 1; u <= 3; ++u) {
      const std::size_t floor = min_support_combination(h, u);
      for (int trial = 0; trial < 200; ++trial) {
        const auto cols = rng.sample(r, u);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(r);
        for (std::size_t c : cols)
          v += std::complex<double>(double(rng.below(3)) - 1.0, double(rng.below(3)) - 1.0) *
               h.entries().col(static_cast<Eigen::Index>(c));
        if (v.norm() < 1e-9) continue;
        CHECK(sparsity(v, 1e-9) >= floor);
      }
    }
  }
}

TEST_CASE("optimality") {
  // Prime-order Fourier matrices have every minor nonzero.
  CHECK(is_optimal(fourier(5), 5));
  CHECK(is_optimal(fourier(7), 3));
  // Rows 0 and 2 of F_4 agree on two coordinates.
  CHECK_FALSE(is_optimal(fourier(4), 2));
  CHECK(is_optimal(fourier(4), 1));
  CHECK_FALSE(is_optimal(real_hadamard(4), 2));
}

TEST_CASE("exhaustive searches respect their budget") {
  CHECK_THROWS_AS(is_optimal(fourier(12), 6, 100), SearchBudgetExceeded);
  CHECK_THROWS_AS(min_support_combination(fourier(8), 4, 10), SearchBudgetExceeded);
}

TEST_CASE("hadamard text round-trip") {
  for (const HadamardMatrix& h : {fourier(6), real_hadamard(12)}) {
    std::stringstream ss;
    write_hadamard(ss, h);
    const HadamardMatrix back = read_hadamard(ss);
    CHECK(back.kind() == h.kind());
    CHECK((back.entries() - h.entries()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

}
