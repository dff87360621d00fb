#include <doctest.h>

#include <sstream>

#include "pbdcs/experiments.hpp"
#include "pbdcs/recovery.hpp"
#include "test_support.hpp"

using namespace pbdcs;
using testing::make_matrix;

namespace {

Eigen::VectorXd random_sparse_real(Rng& rng, std::size_t N, std::size_t t, bool is_signed) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(Eigen::Index(N));
  for (std::size_t i : rng.sample(N, t)) x(Eigen::Index(i)) = is_signed ? rng.uniform(-1, 1) : rng.uniform_open();
  return x;
}

template <typename R, typename M, typename V>
void check_residual_consistent(const R& r, const M& phi, const V& y) {
  CHECK(std::abs(r.residualNorm - (phi * r.estimate - y).norm()) <= 1e-12);
}

}  // namespace

TEST_SUITE("recovery") {

TEST_CASE("omp: one column in one iteration") {
  const Eigen::MatrixXd phi = gaussian_ensemble(20, 50, 3);
  const Eigen::VectorXd y = phi.col(17);
  const RealRecovery r = omp(phi, y);
  CHECK(r.status == RecoveryStatus::converged);
  CHECK(r.iterations == 1);
  CHECK(r.estimate(17) == doctest::Approx(1.0));
  CHECK(r.estimate.cwiseAbs().sum() == doctest::Approx(1.0));
  CHECK_FALSE(r.normalized);
  check_residual_consistent(r, phi, y);
}

TEST_CASE("omp: zero sample") {
  const Eigen::MatrixXd phi = gaussian_ensemble(10, 30, 1);
  const RealRecovery r = omp(phi, Eigen::VectorXd::Zero(10));
  CHECK(r.iterations == 0);
  CHECK(r.estimate.isZero());
  CHECK(r.status == RecoveryStatus::converged);
}

TEST_CASE("omp: residual orthogonal to the active set and non-increasing") {
  const Eigen::MatrixXd phi = gaussian_ensemble(40, 120, 9);
  pbdcs::Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = random_sparse_real(rng, 120, 1 + rng.below(12), true);
    const Eigen::VectorXd y = phi * x;
    for (std::size_t cap = 1; cap <= 6; ++cap) {
      const RealRecovery r = omp(phi, y, cap, 1e-12);
      const Eigen::VectorXd res = y - phi * r.estimate;
      for (Eigen::Index j = 0; j < r.estimate.size(); ++j)
        if (r.estimate(j) != 0.0) CHECK(std::abs(phi.col(j).dot(res)) < 1e-9);
    }
    const RealRecovery full = omp(phi, y);
    for (std::size_t k = 1; k < full.residualHistory.size(); ++k)
      CHECK(full.residualHistory[k] <= full.residualHistory[k - 1] + 1e-15);
    check_residual_consistent(full, phi, y);
  }
}

TEST_CASE("omp: rescales non-unit columns and reports it") {
  Eigen::MatrixXd phi = gaussian_ensemble(20, 40, 4);
  phi.col(3) *= 5.0;
  const Eigen::VectorXd y = 2.0 * phi.col(3);
  const RealRecovery r = omp(phi, y);
  CHECK(r.normalized);
  CHECK(r.estimate(3) == doctest::Approx(2.0));
  check_residual_consistent(r, phi, y);
}

TEST_CASE("omp: exact recovery on the 114 x 784 matrix at low sparsity") {
  const auto m = make_matrix(testing::pg_minus_oval(7), HadamardFamily::fourier);
  const Eigen::MatrixXd phi = realify(m->entries());
  pbdcs::Rng rng(10);
  int ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd x = random_sparse_real(rng, 784, 10, false);
    const RealRecovery r = omp(phi, phi * x);
    ok += (r.estimate - x).norm() < 1e-8;
  }
  CHECK(ok >= 49);
}

TEST_CASE("bp: scaled column") {
  const Eigen::MatrixXd phi = gaussian_ensemble(15, 40, 2);
  const Eigen::VectorXd y = 2.5 * phi.col(11);
  const RealRecovery r = basis_pursuit(phi, y);
  CHECK(r.status == RecoveryStatus::converged);
  CHECK(r.estimate(11) == doctest::Approx(2.5).epsilon(1e-9));
  CHECK((r.estimate - 2.5 * Eigen::VectorXd::Unit(40, 11)).norm() < 1e-8);
  check_residual_consistent(r, phi, y);
}

TEST_CASE("bp: square invertible matrix pins the solution") {
  pbdcs::Rng rng(6);
  Eigen::MatrixXd phi(6, 6);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) phi(i, j) = rng.normal();
  phi += 3.0 * Eigen::MatrixXd::Identity(6, 6);
  Eigen::VectorXd x(6);
  x << 1, -2, 0.5, 3, -0.25, 0;
  const RealRecovery r = basis_pursuit(phi, phi * x);
  CHECK(r.status == RecoveryStatus::converged);
  CHECK((r.estimate - x).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("bp: feasible, and no worse in l1 than any known feasible point") {
  const Eigen::MatrixXd phi = gaussian_ensemble(30, 90, 5);
  pbdcs::Rng rng(5);
  const double tol = 1e-9;
  for (int trial = 0; trial < 15; ++trial) {
    const Eigen::VectorXd x0 = random_sparse_real(rng, 90, 5 + rng.below(20), true);
    const Eigen::VectorXd y = phi * x0;
    const RealRecovery r = basis_pursuit(phi, y);
    CAPTURE(trial);
    REQUIRE(r.status == RecoveryStatus::converged);
    CHECK((phi * r.estimate - y).norm() <= tol * (1 + y.norm()));
    CHECK(r.estimate.lpNorm<1>() <= x0.lpNorm<1>() + tol * (1 + x0.lpNorm<1>()));
    CHECK(r.dualityGap <= tol * (1 + r.estimate.lpNorm<1>()));
    check_residual_consistent(r, phi, y);
  }
}

TEST_CASE("bp: inconsistent system is reported infeasible") {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(2, 3);
  phi(0, 0) = 1;
  phi(0, 1) = 1;
  phi(0, 2) = -1;
  Eigen::VectorXd y(2);
  y << 1, 1;
  const RealRecovery r = basis_pursuit(phi, y);
  CHECK(r.status == RecoveryStatus::infeasible);
  CHECK(r.certificateNorm > 0);
}

TEST_CASE("initial estimate: zero in, zero out; one point exact") {
  const auto m = make_matrix(testing::pg11_minus_two_blocks(), HadamardFamily::fourier);
  const SensingStructure& s = m->structure();
  CHECK(initial_estimate(s, Eigen::VectorXcd::Zero(Eigen::Index(s.n()))).isZero());

  pbdcs::Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Point p = rng.below(s.v());
    const PointLayout& pl = s.point(p);
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(Eigen::Index(s.N()));
    for (std::size_t k = 0; k < pl.width; ++k)
      x(Eigen::Index(pl.first_col + k)) = std::polar(rng.uniform(0.1, 1.0), rng.uniform(0, 2 * M_PI));
    const Eigen::VectorXcd est = initial_estimate(s, s.apply(x));
    const double l1 = x.cwiseAbs().sum();
    for (std::size_t c = 0; c < s.N(); ++c) {
      const double err = std::abs(est(Eigen::Index(c)) - x(Eigen::Index(c)));
      if (s.point_of_column(c) == p) CHECK(err < 1e-12);
      else CHECK(err <= l1 / 12.0 + 1e-12);
    }
  }
}

TEST_CASE("initial estimate error is bounded by ||m||_1 / r") {
  const auto m = make_matrix(testing::pg_minus_oval(7), HadamardFamily::fourier);
  const SensingStructure& s = m->structure();
  pbdcs::Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXcd x = testing::random_complex_sparse(rng, s.N(), 8);
    const Eigen::VectorXcd est = initial_estimate(s, s.apply(x));
    CHECK((est - x).cwiseAbs().maxCoeff() <= x.cwiseAbs().sum() / 8.0 + 1e-12);
  }
}

TEST_CASE("alg1: 1-sparse recovery with support size 1") {
  const auto m = make_matrix(testing::pg_minus_oval(7), HadamardFamily::fourier);
  const SensingStructure& s = m->structure();
  pbdcs::Rng rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXcd x = testing::random_complex_sparse(rng, s.N(), 1, 1e-3, 1e3);
    const ComplexRecovery r = alg1_recover(s, s.apply(x), 1);
    CHECK(r.status == RecoveryStatus::converged);
    CHECK((r.estimate - x).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff()));
    check_residual_consistent(r, m->entries(), s.apply(x));
  }
}

TEST_CASE("alg1: signal on one point, equal magnitudes") {
  const auto m = make_matrix(testing::pg11_minus_two_blocks(), HadamardFamily::fourier);
  const SensingStructure& s = m->structure();
  pbdcs::Rng rng(16);
  for (std::size_t t = 1; t <= 12; ++t) {
    const Point p = rng.below(s.v());
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(Eigen::Index(s.N()));
    for (std::size_t k : rng.sample(12, t)) x(Eigen::Index(s.point(p).first_col + k)) = std::polar(1.0, rng.uniform(0, 2 * M_PI));
    const ComplexRecovery r = alg1_recover(s, s.apply(x), t);
    CAPTURE(t);
    CHECK((r.estimate - x).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("alg1: support size 0 means r1") {
  const auto m = make_matrix(testing::pg_minus_oval(7), HadamardFamily::fourier);
  const SensingStructure& s = m->structure();
  pbdcs::Rng rng(17);
  const Eigen::VectorXcd x = testing::random_complex_sparse(rng, s.N(), 3);
  const Eigen::VectorXcd y = s.apply(x);
  const ComplexRecovery a = alg1_recover(s, y, 0), b = alg1_recover(s, y, s.min_replication());
  CHECK(a.estimate == b.estimate);
  CHECK(a.iterations == b.iterations);
  CHECK_THROWS(alg1_recover(s, y, s.min_replication() + 1));
}

TEST_CASE("vector text round-trip") {
  Eigen::VectorXcd z(3);
  z << std::complex<double>(1, -2), 0.0, std::complex<double>(0.1, 1e-300);
  std::stringstream ss;
  write_vector(ss, z);
  CHECK(read_complex_vector(ss) == z);

  Eigen::VectorXd x(2);
  x << 0.1, -3e10;
  std::stringstream rs;
  write_vector(rs, x);
  CHECK(read_real_vector(rs) == x);

  std::stringstream cs;
  write_vector(cs, z);
  CHECK_THROWS(read_real_vector(cs));
}

TEST_CASE("recovery summary names the fields") {
  RealRecovery r;
  r.estimate = Eigen::VectorXd::Zero(4);
  r.status = RecoveryStatus::maxIterations;
  std::ostringstream os;
  write_recovery_summary(os, r, "bp");
  const std::string s = os.str();
  CHECK(s.find("status=maxIterations") != std::string::npos);
  CHECK(s.find("residualNorm=") != std::string::npos);
  CHECK(s.find("dualityGap=") != std::string::npos);
  CHECK(s.find("length=4") != std::string::npos);
}

}
