#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pbdcs/sensing.hpp"

namespace pbdcs {

enum class RecoveryStatus { converged, maxIterations, singularSystem, infeasible };

std::string_view to_string(RecoveryStatus s);

template <typename Vector>
struct RecoveryResult {
  Vector estimate;
  std::size_t iterations = 0;
  double residualNorm = 0.0;  ///< ||Phi estimate - y||_2, recomputed from estimate
  RecoveryStatus status = RecoveryStatus::converged;
  double elapsed = 0.0;       ///< seconds

  // Algorithm-specific diagnostics.
  bool normalized = false;          ///< OMP rescaled non-unit columns
  double dualityGap = 0.0;          ///< basis pursuit
  double certificateNorm = 0.0;     ///< basis pursuit, infeasible only
  std::vector<double> residualHistory;  ///< OMP, residual after each iteration
};

using RealRecovery = RecoveryResult<Eigen::VectorXd>;
using ComplexRecovery = RecoveryResult<Eigen::VectorXcd>;

/// Orthogonal matching pursuit. The sparsity is not an input; iteration
/// stops once ||r||_2 <= tol or after max_iter selections (0: row count).
RealRecovery omp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, std::size_t max_iter = 0, double tol = 1e-10);

struct BasisPursuitOptions {
  double tol = 1e-9;
  std::size_t max_iterations = 200;
  /// Snap the interior-point iterate to the vertex its complementarity
  /// pattern identifies, keeping it only if the duality gap certifies it.
  bool purify = true;
};

/// min ||x||_1 s.t. phi x = y, solved as the split LP over x+ and x- with
/// a primal-dual interior-point method.
RealRecovery basis_pursuit(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, const BasisPursuitOptions& opts = {});

/// (1/sqrt(r_i)) H_i^* y_i per point, concatenated in column order.
Eigen::VectorXcd initial_estimate(const SensingStructure& s, const Eigen::VectorXcd& y);

/// The design-tailored thresholding recovery. Uses only the structure
/// metadata and Hadamard matrices. support_size 0 means r_1 (the smallest
/// replication number).
ComplexRecovery alg1_recover(const SensingStructure& s, const Eigen::VectorXcd& y, std::size_t support_size = 0);

/// key=value lines named after the RecoveryResult fields.
template <typename Vector>
void write_recovery_summary(std::ostream& os, const RecoveryResult<Vector>& r, std::string_view algorithm);

/// `vector length=<N> field=real|complex`, then one entry per line
/// (re,im for complex).
void write_vector(std::ostream& os, const Eigen::VectorXd& x);
void write_vector(std::ostream& os, const Eigen::VectorXcd& x);
Eigen::VectorXd read_real_vector(std::istream& is);
/// Accepts either field; real vectors come back with zero imaginary part.
Eigen::VectorXcd read_complex_vector(std::istream& is);

}  // namespace pbdcs
