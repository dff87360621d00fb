#include <chrono>
#include <cmath>

#include "pbdcs/recovery.hpp"

namespace pbdcs {

RealRecovery omp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, std::size_t max_iter, double tol) {
  const auto start = std::chrono::steady_clock::now();
  if (y.size() != phi.rows()) throw std::invalid_argument("omp: measurement length does not match matrix rows");
  const Eigen::Index m = phi.rows(), N = phi.cols();
  if (max_iter == 0) max_iter = static_cast<std::size_t>(m);

  RealRecovery res;
  Eigen::VectorXd norms = phi.colwise().norm().transpose();
  Eigen::MatrixXd scaled;
  const Eigen::MatrixXd* a = &phi;
  if (((norms.array() - 1.0).abs() > 1e-6).any()) {
    res.normalized = true;
    Eigen::VectorXd inv = norms.unaryExpr([](double x) { return x > 0.0 ? 1.0 / x : 0.0; });
    scaled = phi * inv.asDiagonal();
    a = &scaled;
  }

  std::vector<Eigen::Index> active;
  std::vector<char> chosen(static_cast<std::size_t>(N), 0);
  // Thin QR of the active columns, grown one column at a time.
  Eigen::MatrixXd q(m, 0), r(0, 0);
  Eigen::VectorXd resid = y;
  res.status = RecoveryStatus::maxIterations;

  while (true) {
    if (resid.norm() <= tol) {
      res.status = RecoveryStatus::converged;
      break;
    }
    if (res.iterations >= max_iter) break;
    const Eigen::VectorXd corr = a->transpose() * resid;
    Eigen::Index best = -1;
    double best_val = -1.0;
    for (Eigen::Index j = 0; j < N; ++j) {
      if (chosen[static_cast<std::size_t>(j)]) continue;
      const double c = std::abs(corr(j));
      if (c > best_val) {
        best_val = c;
        best = j;
      }
    }
    if (best < 0) break;

    const Eigen::VectorXd col = a->col(best);
    Eigen::VectorXd w = col;
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(q.cols());
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = q.transpose() * w;
      w -= q * c;
      coeffs += c;
    }
    const double wn = w.norm();
    if (wn <= 1e-10 * std::max(1.0, col.norm())) {
      res.status = RecoveryStatus::singularSystem;
      break;
    }
    const Eigen::Index k = q.cols();
    q.conservativeResize(Eigen::NoChange, k + 1);
    q.col(k) = w / wn;
    r.conservativeResize(k + 1, k + 1);
    r.col(k).head(k) = coeffs;
    r.row(k).setZero();
    r(k, k) = wn;
    active.push_back(best);
    chosen[static_cast<std::size_t>(best)] = 1;
    ++res.iterations;

    resid = y - q * (q.transpose() * y);
    res.residualHistory.push_back(resid.norm());
  }

  res.estimate = Eigen::VectorXd::Zero(N);
  if (!active.empty()) {
    const Eigen::Index k = static_cast<Eigen::Index>(active.size());
    const Eigen::VectorXd coef =
        r.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(q.leftCols(k).transpose() * y);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto j = active[static_cast<std::size_t>(i)];
      res.estimate(j) = res.normalized ? coef(i) / norms(j) : coef(i);
    }
  }
  res.residualNorm = (phi * res.estimate - y).norm();
  res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace pbdcs
