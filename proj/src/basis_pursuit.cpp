#include <Eigen/Sparse>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "pbdcs/recovery.hpp"

namespace pbdcs {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

// The constraint matrix in whichever storage suits its density.
class ConstraintMatrix {
 public:
  explicit ConstraintMatrix(const Eigen::MatrixXd& a) : dense_(a) {
    const Index nnz = (a.array() != 0.0).count();
    sparse_path_ = a.size() > 0 && static_cast<double>(nnz) < 0.3 * static_cast<double>(a.size());
    if (sparse_path_) {
      sparse_ = a.sparseView();
      sparse_.makeCompressed();
    }
  }

  Index rows() const { return dense_.rows(); }
  Index cols() const { return dense_.cols(); }

  VectorXd mul(const VectorXd& x) const { return sparse_path_ ? VectorXd(sparse_ * x) : VectorXd(dense_ * x); }
  VectorXd tmul(const VectorXd& l) const {
    return sparse_path_ ? VectorXd(sparse_.transpose() * l) : VectorXd(dense_.transpose() * l);
  }

  // A diag(d) A^T, full symmetric.
  Eigen::MatrixXd normal(const VectorXd& d) const {
    const Index m = rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    if (sparse_path_) {
      std::vector<std::pair<Index, double>> nz;
      for (Index j = 0; j < sparse_.outerSize(); ++j) {
        nz.clear();
        for (Eigen::SparseMatrix<double>::InnerIterator it(sparse_, j); it; ++it) nz.emplace_back(it.row(), it.value());
        const double dj = d(j);
        for (std::size_t a = 0; a < nz.size(); ++a) {
          const double va = dj * nz[a].second;
          for (std::size_t b = a; b < nz.size(); ++b) out(nz[b].first, nz[a].first) += va * nz[b].second;
        }
      }
    } else {
      const Eigen::MatrixXd ad = dense_ * d.cwiseSqrt().asDiagonal();
      out.selfadjointView<Eigen::Lower>().rankUpdate(ad);
    }
    out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
    return out;
  }

  auto col(Index j) const { return dense_.col(j); }

  // Columns `idx` as a dense matrix.
  Eigen::MatrixXd columns(const std::vector<Index>& idx) const { return dense_(Eigen::all, idx); }

 private:
  const Eigen::MatrixXd& dense_;
  Eigen::SparseMatrix<double> sparse_;
  bool sparse_path_ = false;
};

double max_step(const VectorXd& x, const VectorXd& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  return alpha;
}

struct Certified {
  VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
};

// Scales lambda into the dual feasible set |A^T lambda| <= 1 and reports
// ||x||_1 - y^T lambda.
Certified certify(const ConstraintMatrix& a, const VectorXd& y, VectorXd x, const VectorXd& lambda) {
  Certified c;
  c.residual = (a.mul(x) - y).norm();
  const double worst = a.tmul(lambda).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, worst);
  c.gap = x.lpNorm<1>() - y.dot(lambda) / scale;
  c.x = std::move(x);
  return c;
}

// Rows i whose unit vectors e_i complete the independent columns of `b` to a
// basis of R^m.
std::vector<Index> complementary_units(const Eigen::MatrixXd& b) {
  const Index m = b.rows(), k = b.cols();
  std::vector<Index> out;
  if (k >= m) return out;
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(m, m);
  if (k > 0) q = Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ() * q;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> cq(q.rightCols(m - k).transpose());
  for (Index i = 0; i < m - k; ++i) out.push_back(cq.colsPermutation().indices()(i));
  return out;
}

// Moves x along null directions of its support columns, never letting a
// coordinate change sign, until the support is linearly independent. On the
// optimal face the objective is constant along such moves, so the result is
// a basic optimal solution. Returns the remaining support.
std::vector<Index> reduce_to_basic(const ConstraintMatrix& a, VectorXd& x, const std::vector<Index>& support) {
  const Index m = a.rows();
  const Index s = static_cast<Index>(support.size());
  const Eigen::MatrixXd as = a.columns(support);
  Eigen::VectorXd weight(s);
  for (Index k = 0; k < s; ++k) weight(k) = std::abs(x(support[static_cast<std::size_t>(k)]));
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(as * weight.asDiagonal());
  const Index rank = qr.rank();
  if (rank == s) return support;

  // Basis: the `rank` heaviest independent support columns, completed by unit
  // vectors spanning the rest of R^m. Those stay at zero throughout.
  std::vector<Index> basic(static_cast<std::size_t>(m), -1);  // column, or -1 for a unit vector
  Eigen::MatrixXd b(m, m);
  std::vector<bool> in_basis(static_cast<std::size_t>(s), false);
  for (Index k = 0; k < rank; ++k) {
    const Index pos = qr.colsPermutation().indices()(k);
    in_basis[static_cast<std::size_t>(pos)] = true;
    basic[static_cast<std::size_t>(k)] = support[static_cast<std::size_t>(pos)];
    b.col(k) = a.col(basic[static_cast<std::size_t>(k)]);
  }
  const std::vector<Index> units = complementary_units(b.leftCols(rank));
  for (Index k = rank; k < m; ++k) {
    b.col(k).setZero();
    b(units[static_cast<std::size_t>(k - rank)], k) = 1.0;
  }
  Eigen::MatrixXd binv = b.partialPivLu().inverse();
  VectorXd xb = VectorXd::Zero(m);
  for (Index k = 0; k < rank; ++k) xb(k) = x(basic[static_cast<std::size_t>(k)]);

  std::size_t pivots = 0;
  for (Index pos = 0; pos < s; ++pos) {
    if (in_basis[static_cast<std::size_t>(pos)]) continue;
    const Index j = support[static_cast<std::size_t>(pos)];
    const double xj = x(j);
    if (xj == 0.0) continue;
    // Driving x_j to zero moves the basic part by xj * B^{-1} a_j.
    const VectorXd eta = binv * a.col(j);
    double theta = 1.0;
    Index leave = -1;
    for (Index k = 0; k < m; ++k) {
      if (basic[static_cast<std::size_t>(k)] < 0 || xb(k) == 0.0) continue;
      const double change = xj * eta(k);
      if (xb(k) * change < 0.0 && -xb(k) / change < theta) {
        theta = -xb(k) / change;
        leave = k;
      }
    }
    xb += (theta * xj) * eta;
    if (leave < 0) {
      x(j) = 0.0;
      continue;
    }
    x(basic[static_cast<std::size_t>(leave)]) = 0.0;
    xb(leave) = (1.0 - theta) * xj;
    x(j) = xb(leave);
    basic[static_cast<std::size_t>(leave)] = j;
    b.col(leave) = a.col(j);
    const double piv = eta(leave);
    if (++pivots % 64 == 0 || std::abs(piv) < 1e-10 * eta.cwiseAbs().maxCoeff()) {
      binv = b.partialPivLu().inverse();
    } else {
      const Eigen::RowVectorXd row = binv.row(leave) / piv;
      VectorXd e = eta;
      e(leave) -= 1.0;
      binv.noalias() -= e * row;
    }
  }

  std::vector<Index> out;
  for (Index k = 0; k < m; ++k)
    if (basic[static_cast<std::size_t>(k)] >= 0 && xb(k) != 0.0) out.push_back(basic[static_cast<std::size_t>(k)]);
  std::sort(out.begin(), out.end());
  return out;
}

struct Vertex {
  VectorXd x;
  VectorXd lambda;
};

// Revised primal simplex on the split columns +a_j (code j) and -a_j (code
// j + N), warm-started from an independent support. Signed unit artificials
// (code 2N + i) complete the basis; phase 1 drives them to zero and phase 2
// minimises the l1 objective. The basis inverse is kept explicitly, updated
// per pivot and refactorised periodically.
std::optional<Vertex> simplex_finish(const ConstraintMatrix& a, const VectorXd& y, const std::vector<Index>& support,
                                     const VectorXd& x0) {
  const Index m = a.rows(), N = a.cols();
  const Index s = static_cast<Index>(support.size());
  if (s > m) return std::nullopt;
  constexpr double cost_tol = 1e-12, pivot_tol = 1e-11;

  std::vector<Index> code(static_cast<std::size_t>(m));
  std::vector<double> art_sign(static_cast<std::size_t>(m), 1.0);
  auto column = [&](Index c, std::size_t pos) -> VectorXd {
    if (c < N) return a.col(c);
    if (c < 2 * N) return -a.col(c - N);
    VectorXd e = VectorXd::Zero(m);
    e(c - 2 * N) = art_sign[pos];
    return e;
  };
  Eigen::MatrixXd b(m, m);
  for (Index k = 0; k < s; ++k) {
    const Index j = support[static_cast<std::size_t>(k)];
    code[static_cast<std::size_t>(k)] = x0(j) >= 0.0 ? j : j + N;
    b.col(k) = column(code[static_cast<std::size_t>(k)], static_cast<std::size_t>(k));
  }
  const std::vector<Index> units = complementary_units(b.leftCols(s));
  for (Index k = s; k < m; ++k) {
    code[static_cast<std::size_t>(k)] = 2 * N + units[static_cast<std::size_t>(k - s)];
    b.col(k) = column(code[static_cast<std::size_t>(k)], static_cast<std::size_t>(k));
  }

  Eigen::MatrixXd binv;
  VectorXd xb;
  auto refactor = [&] {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    binv = lu.inverse();
    xb = lu.solve(y);
    // Negative basics switch to their mirror column.
    for (Index k = 0; k < m; ++k) {
      if (xb(k) >= 0.0) continue;
      Index& c = code[static_cast<std::size_t>(k)];
      if (c < 2 * N) {
        c = c < N ? c + N : c - N;
      } else {
        art_sign[static_cast<std::size_t>(k)] = -art_sign[static_cast<std::size_t>(k)];
      }
      b.col(k) = -b.col(k);
      binv.row(k) = -binv.row(k);
      xb(k) = -xb(k);
    }
  };
  refactor();
  if (!binv.allFinite()) return std::nullopt;

  std::vector<char> is_basic(static_cast<std::size_t>(2 * N), 0);
  for (Index c : code)
    if (c < 2 * N) is_basic[static_cast<std::size_t>(c)] = 1;

  const double feas_tol = 1e-14 * (1.0 + y.norm());
  int phase = 1;
  const std::size_t max_pivots = static_cast<std::size_t>(20 * m + 1000);
  std::size_t pivots = 0;
  VectorXd cb(m);
  // Consecutive degenerate pivots; past a threshold Bland's rule (lowest
  // index enters and leaves) takes over until progress resumes.
  std::size_t degenerate = 0;
  auto artificial_sum = [&] {
    double sum = 0.0;
    for (Index k = 0; k < m; ++k)
      if (code[static_cast<std::size_t>(k)] >= 2 * N) sum += xb(k);
    return sum;
  };
  while (true) {
    if (phase == 1 && artificial_sum() <= feas_tol) phase = 2;
    const bool bland = degenerate >= 30;
    for (Index k = 0; k < m; ++k) {
      const bool art = code[static_cast<std::size_t>(k)] >= 2 * N;
      cb(k) = phase == 1 ? (art ? 1.0 : 0.0) : (art ? 0.0 : 1.0);
    }
    const VectorXd lambda = binv.transpose() * cb;
    const VectorXd g = a.tmul(lambda);
    const double c0 = phase == 1 ? 0.0 : 1.0;
    Index enter = -1;
    double best = -cost_tol;
    for (Index j = 0; j < 2 * N && !(bland && enter >= 0); ++j) {
      const double d = j < N ? c0 - g(j) : c0 + g(j - N);
      if (!is_basic[static_cast<std::size_t>(j)] && d < best) {
        best = d;
        enter = j;
      }
    }
    if (enter < 0) {
      if (phase == 2) {
        Vertex v{VectorXd::Zero(N), lambda};
        for (Index k = 0; k < m; ++k) {
          const Index c = code[static_cast<std::size_t>(k)];
          if (c < N) v.x(c) += xb(k);
          else if (c < 2 * N) v.x(c - N) -= xb(k);
        }
        return v;
      }
      return std::nullopt;  // phase 1 stalled with artificials still positive
    }
    if (++pivots > max_pivots) return std::nullopt;

    const VectorXd alpha = binv * column(enter, 0);
    Index leave = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < m; ++k) {
      const bool art = code[static_cast<std::size_t>(k)] >= 2 * N;
      double t;
      if (phase == 2 && art && std::abs(alpha(k)) > pivot_tol) {
        t = 0.0;  // a zero artificial must not move
      } else if (alpha(k) > pivot_tol) {
        t = std::max(xb(k), 0.0) / alpha(k);
      } else {
        continue;
      }
      const bool tie = t == theta && leave >= 0 &&
                       (bland ? code[static_cast<std::size_t>(k)] < code[static_cast<std::size_t>(leave)]
                              : std::abs(alpha(k)) > std::abs(alpha(leave)));
      if (t < theta || tie) {
        theta = t;
        leave = k;
      }
    }
    if (leave < 0) return std::nullopt;

    degenerate = theta == 0.0 ? degenerate + 1 : 0;
    xb -= theta * alpha;
    xb(leave) = theta;
    const Index old = code[static_cast<std::size_t>(leave)];
    if (old < 2 * N) is_basic[static_cast<std::size_t>(old)] = 0;
    code[static_cast<std::size_t>(leave)] = enter;
    is_basic[static_cast<std::size_t>(enter)] = 1;
    b.col(leave) = column(enter, static_cast<std::size_t>(leave));
    if (pivots % 100 == 0 || std::abs(alpha(leave)) < 1e-8 * alpha.cwiseAbs().maxCoeff()) {
      refactor();
      std::fill(is_basic.begin(), is_basic.end(), 0);
      for (Index c : code)
        if (c < 2 * N) is_basic[static_cast<std::size_t>(c)] = 1;
    } else {
      const Eigen::RowVectorXd row = binv.row(leave) / alpha(leave);
      VectorXd e = alpha;
      e(leave) -= 1.0;
      binv.noalias() -= e * row;
    }
  }
}

}  // namespace

RealRecovery basis_pursuit(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, const BasisPursuitOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (y.size() != phi.rows()) throw std::invalid_argument("basis_pursuit: measurement length does not match matrix rows");
  const Index m = phi.rows(), N = phi.cols();
  const double ynorm = y.norm();
  const double tol = opts.tol;
  RealRecovery res;
  auto finish = [&](RealRecovery& r) {
    r.residualNorm = (phi * r.estimate - y).norm();
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };

  if (ynorm == 0.0) {
    res.estimate = VectorXd::Zero(N);
    res.status = RecoveryStatus::converged;
    return finish(res);
  }

  ConstraintMatrix a(phi);

  // Consistency of phi x = y: the split LP is feasible iff y is in the
  // range of phi, and then bounded below by 0.
  const Eigen::MatrixXd gram = a.normal(VectorXd::Ones(N));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const VectorXd& ev = eig.eigenvalues();
  const double cut = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  VectorXd inv = ev.unaryExpr([cut](double e) { return e > cut ? 1.0 / e : 0.0; });
  const VectorXd z = eig.eigenvectors() * inv.asDiagonal() * (eig.eigenvectors().transpose() * y);
  const VectorXd range_gap = y - gram * z;
  if (range_gap.norm() > 1e-8 * (1.0 + ynorm)) {
    res.estimate = VectorXd::Zero(N);
    res.status = RecoveryStatus::infeasible;
    res.certificateNorm = range_gap.norm();
    return finish(res);
  }

  // Mehrotra starting point from the least-norm solution.
  const VectorXd xls = a.tmul(z);
  VectorXd u = xls.cwiseMax(0.0), w = (-xls).cwiseMax(0.0);
  VectorXd su = VectorXd::Ones(N), sw = VectorXd::Ones(N), lambda = VectorXd::Zero(m);
  {
    const double dx = std::max(0.0, -1.5 * std::min(u.minCoeff(), w.minCoeff())) + 1e-3;
    u.array() += dx;
    w.array() += dx;
    const double xs = u.dot(su) + w.dot(sw);
    const double hx = 0.5 * xs / (su.sum() + sw.sum());
    const double hs = 0.5 * xs / (u.sum() + w.sum());
    u.array() += hx;
    w.array() += hx;
    su.array() += hs;
    sw.array() += hs;
  }

  const double ipm_tol = std::min(tol, 1e-10);
  const double reg_base = std::max(1.0, gram.diagonal().maxCoeff());
  const double reg = 1e-14 * reg_base;
  res.status = RecoveryStatus::maxIterations;
  std::size_t stalled = 0;
  // Once mu has collapsed the normal equations are too ill-conditioned to
  // make progress and later iterates can drift; keep the best one seen.
  struct Iterate {
    VectorXd u, w, su, sw, lambda;
  };
  Iterate best_it{u, w, su, sw, lambda};
  double best_merit = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    const VectorXd rp = y - a.mul(u - w);
    const VectorXd atl = a.tmul(lambda);
    const VectorXd rdu = VectorXd::Ones(N) - atl - su;
    const VectorXd rdw = VectorXd::Ones(N) + atl - sw;
    const double mu = (u.dot(su) + w.dot(sw)) / static_cast<double>(2 * N);
    const double pobj = u.sum() + w.sum();
    const double dobj = y.dot(lambda);
    if (rp.norm() <= ipm_tol * (1.0 + ynorm) && std::max(rdu.norm(), rdw.norm()) <= ipm_tol * (1.0 + std::sqrt(double(N))) &&
        std::abs(pobj - dobj) <= ipm_tol * (1.0 + std::abs(pobj))) {
      res.status = RecoveryStatus::converged;
      best_it = {u, w, su, sw, lambda};
      break;
    }
    const double merit = std::max({rp.norm() / (1.0 + ynorm), std::max(rdu.norm(), rdw.norm()) / (1.0 + std::sqrt(double(N))),
                                   std::abs(pobj - dobj) / (1.0 + std::abs(pobj))});
    if (merit < best_merit) {
      best_merit = merit;
      best_it = {u, w, su, sw, lambda};
      since_best = 0;
    } else if (++since_best >= 5 && mu < 1e-12 * (1.0 + std::abs(pobj))) {
      break;
    }
    res.iterations = it + 1;

    const VectorXd du_scale = u.cwiseQuotient(su), dw_scale = w.cwiseQuotient(sw);
    const VectorXd dsum = du_scale + dw_scale;
    const Eigen::MatrixXd normal = a.normal(dsum);
    // Regularisation is scaled to A A^T, not to the iterate, whose scaling
    // spans many orders of magnitude near the optimum. Raised only when the
    // factorisation breaks down.
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    bool factored = false;
    for (double r = reg; r <= 1e-2 * reg_base && !factored; r *= 100.0) {
      Eigen::MatrixXd reg_normal = normal;
      reg_normal.diagonal().array() += r;
      ldlt.compute(reg_normal);
      factored = ldlt.info() == Eigen::Success && ldlt.isPositive();
    }
    if (!factored) {
      res.status = RecoveryStatus::singularSystem;
      break;
    }

    struct Step {
      VectorXd du, dw, dl, dsu, dsw;
    };
    auto solve = [&](const VectorXd& rcu, const VectorXd& rcw) {
      Step s;
      const VectorXd tu = rcu.cwiseQuotient(su) - du_scale.cwiseProduct(rdu);
      const VectorXd tw = rcw.cwiseQuotient(sw) - dw_scale.cwiseProduct(rdw);
      const VectorXd rhs = rp - a.mul(tu - tw);
      s.dl = ldlt.solve(rhs);
      VectorXd atdl = a.tmul(s.dl);
      // Iterative refinement against the unformed operator; the factorised
      // matrix loses digits once the scaling spreads out.
      double err = (rhs - a.mul(dsum.cwiseProduct(atdl))).norm();
      for (int pass = 0; pass < 4 && err > 1e-15 * (1.0 + rhs.norm()); ++pass) {
        const VectorXd dl = s.dl + ldlt.solve(rhs - a.mul(dsum.cwiseProduct(atdl)));
        const VectorXd at = a.tmul(dl);
        const double e = (rhs - a.mul(dsum.cwiseProduct(at))).norm();
        if (!(e < 0.5 * err)) break;
        s.dl = dl;
        atdl = at;
        err = e;
      }
      s.du = tu + du_scale.cwiseProduct(atdl);
      s.dw = tw - dw_scale.cwiseProduct(atdl);
      s.dsu = rdu - atdl;
      s.dsw = rdw + atdl;
      return s;
    };

    const Step aff = solve(-u.cwiseProduct(su), -w.cwiseProduct(sw));
    const double ap_aff = std::min({1.0, max_step(u, aff.du), max_step(w, aff.dw)});
    const double ad_aff = std::min({1.0, max_step(su, aff.dsu), max_step(sw, aff.dsw)});
    const double mu_aff = ((u + ap_aff * aff.du).dot(su + ad_aff * aff.dsu) +
                           (w + ap_aff * aff.dw).dot(sw + ad_aff * aff.dsw)) /
                          static_cast<double>(2 * N);
    const double sigma = std::pow(mu_aff / mu, 3);

    const VectorXd rcu = (sigma * mu) * VectorXd::Ones(N) - u.cwiseProduct(su) - aff.du.cwiseProduct(aff.dsu);
    const VectorXd rcw = (sigma * mu) * VectorXd::Ones(N) - w.cwiseProduct(sw) - aff.dw.cwiseProduct(aff.dsw);
    const Step st = solve(rcu, rcw);
    const double ap = std::min(1.0, 0.995 * std::min(max_step(u, st.du), max_step(w, st.dw)));
    const double ad = std::min(1.0, 0.995 * std::min(max_step(su, st.dsu), max_step(sw, st.dsw)));
    u += ap * st.du;
    w += ap * st.dw;
    su += ad * st.dsu;
    sw += ad * st.dsw;
    lambda += ad * st.dl;
    stalled = (ap < 1e-8 && ad < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 5) break;
  }

  u = std::move(best_it.u);
  w = std::move(best_it.w);
  su = std::move(best_it.su);
  sw = std::move(best_it.sw);
  lambda = std::move(best_it.lambda);
  Certified best = certify(a, y, u - w, lambda);

  auto within = [&](const Certified& c) {
    return c.residual <= tol * (1.0 + ynorm) && c.gap <= tol * (1.0 + c.x.lpNorm<1>());
  };

  if (opts.purify) {
    // Columns whose primal variable dominates its slack carry the solution;
    // when they are dependent, cross over to a basic solution on the face.
    std::vector<Index> support;
    VectorXd xs = VectorXd::Zero(N);
    for (Index j = 0; j < N; ++j)
      if (u(j) > su(j) || w(j) > sw(j)) {
        support.push_back(j);
        xs(j) = u(j) - w(j);
      }
    if (!support.empty()) support = reduce_to_basic(a, xs, support);
    bool snapped = false;
    if (!support.empty()) {
      // Least-squares fit on the support with a least-norm correction making
      // lambda an exact subgradient certificate there.
      const Eigen::MatrixXd as = a.columns(support);
      const VectorXd zs = as.colPivHouseholderQr().solve(y);
      VectorXd x = VectorXd::Zero(N);
      VectorXd sign(static_cast<Index>(support.size()));
      for (std::size_t k = 0; k < support.size(); ++k) {
        x(support[k]) = zs(static_cast<Index>(k));
        sign(static_cast<Index>(k)) = zs(static_cast<Index>(k)) >= 0.0 ? 1.0 : -1.0;
      }
      const VectorXd delta = as.transpose().completeOrthogonalDecomposition().solve(sign - as.transpose() * lambda);
      Certified pure = certify(a, y, std::move(x), lambda + delta);
      if (within(pure)) {
        best = std::move(pure);
        snapped = true;
      }
    }
    // Otherwise (typically a perturbed measurement whose small components
    // the interior-point iterate cannot resolve) finish with the simplex.
    if (!snapped) {
      if (auto v = simplex_finish(a, y, support, xs)) {
        Certified vert = certify(a, y, std::move(v->x), v->lambda);
        if (within(vert)) best = std::move(vert);
      }
    }
  }

  if (!within(best)) {
    // Least-norm correction onto phi x = y; accepted only when certified.
    const VectorXd r = y - a.mul(best.x);
    const VectorXd zr = eig.eigenvectors() * inv.asDiagonal() * (eig.eigenvectors().transpose() * r);
    Certified fixed = certify(a, y, best.x + a.tmul(zr), lambda);
    if (within(fixed)) best = std::move(fixed);
  }

  const bool ok = within(best);
  res.estimate = std::move(best.x);
  res.dualityGap = best.gap;
  res.status = ok ? RecoveryStatus::converged
                  : (res.status == RecoveryStatus::singularSystem ? res.status : RecoveryStatus::maxIterations);
  return finish(res);
}

}  // namespace pbdcs
