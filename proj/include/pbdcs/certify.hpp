#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "pbdcs/sensing.hpp"

namespace pbdcs {

/// Nullvector of sparsity r_{p1} + r_{p2} supported on the columns of the
/// two points: each point's columns are scaled so the row of their shared
/// block reads 1/r_{p1} (resp. -1/r_{p2}).
Eigen::VectorXcd spark_witness_two_points(const SensingMatrix& m, Point p1, Point p2);

/// Nullvector of sparsity 3r/2 on three arc points with real Hadamard
/// blocks of a common order r = 0 (mod 4). On each point it is +-1 on the
/// r/2 columns where the Hadamard rows in the two relevant shared blocks
/// disagree.
Eigen::VectorXcd arc_nullvector(const SensingMatrix& m, const PointSet& arc);

/// Three points of the matrix's design no row contains together, with all
/// of them satisfying the arc_nullvector preconditions; nullopt if none.
std::optional<PointSet> find_arc_triple(const SensingStructure& s);

struct SparkResult {
  std::optional<std::size_t> spark;  ///< empty: every set of <= smax columns is independent
  std::size_t smax = 0;
  bool exceeds_smax() const { return !spark.has_value(); }
};

/// Smallest number of linearly dependent columns, searched up to smax.
/// A column set counts as dependent when its smallest singular value is
/// below 1e-9 sqrt(N). Throws SearchBudgetExceeded if more than `budget`
/// column subsets would be needed.
SparkResult brute_spark(const SensingMatrix& m, std::size_t smax, std::uint64_t budget = 20'000'000);

struct NonrecoverablePair {
  Eigen::VectorXcd m1;  ///< floor(s/2)-sparse
  Eigen::VectorXcd m2;  ///< ceil(s/2)-sparse, Phi m2 == Phi(-m1)
  double image_gap = 0.0;  ///< ||Phi m2 - Phi(-m1)||_inf
};

/// Splits a nullvector into two halves with equal images; one of -m1 or m2
/// cannot be the unique l1-minimal preimage.
NonrecoverablePair split_nonrecoverable(const SensingMatrix& m, const Eigen::VectorXcd& nullvec, double tol = 1e-9);

struct RecoveryBounds {
  std::size_t t_guaranteed = 0;                ///< ceil(sqrt(n)/4)
  std::optional<std::size_t> t_impossible;     ///< ceil(s/2) for the sparsest known witness s
  std::size_t witness_sparsity = 0;
  std::string witness;                          ///< "two-point" or "arc"
};

RecoveryBounds recovery_guarantee_bounds(const SensingMatrix& m);

/// Number of entries with |x_i| > rel * ||x||_inf.
std::size_t sparsity(const Eigen::VectorXcd& x, double rel = 1e-12);

}  // namespace pbdcs
