#include "pbdcs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "csv_util.hpp"
#include "pbdcs/random.hpp"
#include "pbdcs/recovery.hpp"

namespace pbdcs {

using detail::format_double;

std::string_view to_string(ValueModel m) { return m == ValueModel::uniform ? "uniform" : "grid"; }
std::string_view to_string(NoiseModel m) { return m == NoiseModel::uniform ? "uniform" : "burst"; }

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::omp: return "omp";
    case Algorithm::bp: return "bp";
    case Algorithm::alg1: return "alg1";
  }
  return "?";
}

ValueModel parse_value_model(std::string_view s) {
  if (s == "uniform") return ValueModel::uniform;
  if (s == "grid") return ValueModel::grid;
  throw std::invalid_argument("unknown value model '" + std::string(s) + "'");
}

NoiseModel parse_noise_model(std::string_view s) {
  if (s == "uniform") return NoiseModel::uniform;
  if (s == "burst") return NoiseModel::burst;
  throw std::invalid_argument("unknown noise model '" + std::string(s) + "'");
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "omp") return Algorithm::omp;
  if (s == "bp" || s == "lp") return Algorithm::bp;
  if (s == "alg1") return Algorithm::alg1;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

Eigen::VectorXd gen_sparse_signal(const SignalSpec& spec) {
  if (spec.t > spec.N) throw std::invalid_argument("signal sparsity exceeds its length");
  Rng rng(spec.seed);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.N));
  for (std::size_t i : rng.sample(spec.N, spec.t)) {
    double v = spec.value_model == ValueModel::uniform ? rng.uniform_open()
                                                       : static_cast<double>(rng.below(100) + 1) / 100.0;
    if (spec.is_signed && (rng.next() >> 63)) v = -v;
    x(static_cast<Eigen::Index>(i)) = v;
  }
  if (spec.normalize && spec.t > 0) x /= x.norm();
  return x;
}

Eigen::VectorXd gen_noise(const NoiseSpec& spec, std::size_t N) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
  if (spec.target_l2 == 0.0 || N == 0) return e;
  std::size_t len = N, start = 0;
  Rng rng(spec.seed);
  if (spec.model == NoiseModel::burst) {
    len = spec.burst_len ? spec.burst_len : (N + 19) / 20;
    if (len > N) throw std::invalid_argument("burst length exceeds the signal length");
    start = rng.below(N - len + 1);
  }
  for (std::size_t i = start; i < start + len; ++i)
    e(static_cast<Eigen::Index>(i)) = spec.is_signed ? rng.uniform(-1.0, 1.0) : rng.uniform_open();
  return e * (spec.target_l2 / e.norm());
}

Eigen::MatrixXd gaussian_ensemble(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
    if (rows) g.col(j).normalize();
  }
  return g;
}

namespace {

struct TrialOutcome {
  bool success = false;
  bool solver_failure = false;
  double error = 0.0;
  double residual = 0.0;
  double elapsed = 0.0;
};

// One recovery given the clean signal and the measurement.
using Recover = std::function<TrialOutcome(const Eigen::VectorXd& m, const Eigen::VectorXd& noisy)>;

template <typename Result, typename Signal>
TrialOutcome outcome(const Result& r, const Signal& m, double eps) {
  TrialOutcome o;
  o.error = (r.estimate - m).norm();
  o.residual = r.residualNorm;
  o.elapsed = r.elapsed;
  o.solver_failure = r.status != RecoveryStatus::converged;
  o.success = std::isfinite(o.error) && o.error < eps;
  return o;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
    });
  for (auto& th : pool) th.join();
}

SweepResult sweep(std::size_t N, const SweepConfig& cfg, const Recover& recover) {
  SweepResult res;
  res.config = cfg;
  std::vector<std::size_t> ts = cfg.sparsities;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  res.config.sparsities = ts;

  for (std::size_t t : ts) {
    std::vector<TrialOutcome> outs(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
      SignalSpec spec = cfg.signal;
      spec.N = N;
      spec.t = t;
      spec.seed = derive_seed(cfg.master_seed, t, trial, 0);
      const Eigen::VectorXd m = gen_sparse_signal(spec);
      Eigen::VectorXd noisy = m;
      if (cfg.noise) {
        NoiseSpec ns = *cfg.noise;
        ns.seed = derive_seed(cfg.master_seed, t, trial, 1);
        noisy += gen_noise(ns, N);
      }
      try {
        outs[trial] = recover(m, noisy);
      } catch (const std::exception&) {
        outs[trial] = TrialOutcome{false, true, std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN(), 0.0};
      }
    });

    SweepRow row;
    row.sparsity = t;
    row.trials = cfg.trials;
    std::size_t finite = 0;
    for (const auto& o : outs) {  // fixed order keeps the sums reproducible
      row.successes += o.success;
      row.solver_failures += o.solver_failure;
      row.mean_elapsed += o.elapsed;
      if (std::isfinite(o.error) && std::isfinite(o.residual)) {
        row.mean_error += o.error;
        row.mean_residual += o.residual;
        ++finite;
      }
    }
    if (finite) {
      row.mean_error /= double(finite);
      row.mean_residual /= double(finite);
    }
    if (cfg.trials) row.mean_elapsed /= double(cfg.trials);
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace

SweepResult run_sweep(const Eigen::MatrixXd& phi, const SweepConfig& cfg) {
  if (cfg.algorithm == Algorithm::alg1)
    throw std::invalid_argument("alg1 needs the sensing structure, not a dense matrix");
  const double eps = cfg.epsilon;
  Recover rec;
  if (cfg.algorithm == Algorithm::omp) {
    const double tol = cfg.tolerance > 0 ? cfg.tolerance : 1e-10;
    rec = [&phi, tol, eps](const Eigen::VectorXd& m, const Eigen::VectorXd& noisy) {
      return outcome(omp(phi, phi * noisy, 0, tol), m, eps);
    };
  } else {
    BasisPursuitOptions opts;
    if (cfg.tolerance > 0) opts.tol = cfg.tolerance;
    rec = [&phi, opts, eps](const Eigen::VectorXd& m, const Eigen::VectorXd& noisy) {
      return outcome(basis_pursuit(phi, phi * noisy, opts), m, eps);
    };
  }
  return sweep(static_cast<std::size_t>(phi.cols()), cfg, rec);
}

SweepResult run_sweep(const SensingStructure& s, const SweepConfig& cfg) {
  if (cfg.algorithm != Algorithm::alg1)
    throw std::invalid_argument("the structured sweep runs alg1 only");
  const double eps = cfg.epsilon;
  const std::size_t k = cfg.support_size;
  Recover rec = [&s, k, eps](const Eigen::VectorXd& m, const Eigen::VectorXd& noisy) {
    const Eigen::VectorXcd y = s.apply(noisy.cast<std::complex<double>>());
    return outcome(alg1_recover(s, y, k), Eigen::VectorXcd(m.cast<std::complex<double>>()), eps);
  };
  return sweep(s.N(), cfg, rec);
}

NoiseTable run_noise_table(const Eigen::MatrixXd& phi, const SweepConfig& cfg, const std::vector<double>& levels) {
  NoiseTable table;
  table.config = cfg;
  if (!table.config.noise) table.config.noise = NoiseSpec{};
  table.levels = levels;
  for (double level : levels) {
    SweepConfig c = table.config;
    c.noise->target_l2 = level;
    table.columns.push_back(run_sweep(phi, c));
  }
  return table;
}

double SpectrumResult::min_eigenvalue() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& tr : per_trial)
    if (tr.eigenvalues.size()) v = std::min(v, tr.eigenvalues.minCoeff());
  return v;
}

double SpectrumResult::max_eigenvalue() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& tr : per_trial)
    if (tr.eigenvalues.size()) v = std::max(v, tr.eigenvalues.maxCoeff());
  return v;
}

double SpectrumResult::max_psi_norm() const {
  double v = 0.0;
  for (const auto& tr : per_trial) v = std::max(v, tr.psi_norm);
  return v;
}

SpectrumResult gram_spectrum_experiment(const SensingMatrix& m, std::size_t t, std::size_t trials,
                                        bool distinct_points, std::uint64_t seed) {
  const SensingStructure& s = m.structure();
  const std::size_t k = 2 * t;
  if (distinct_points && k > s.v())
    throw std::invalid_argument("2t distinct points requested but the design has " + std::to_string(s.v()));
  if (!distinct_points && k > s.N()) throw std::invalid_argument("2t exceeds the column count");

  SpectrumResult res;
  res.t = t;
  res.trials = trials;
  res.distinct_points = distinct_points;
  res.seed = seed;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, k, trial, 2));
    SpectrumTrial tr;
    if (distinct_points) {
      for (Point p : rng.sample(s.v(), k)) {
        const PointLayout& pl = s.point(p);
        tr.columns.push_back(pl.first_col + rng.below(pl.width));
      }
    } else {
      tr.columns = rng.sample(s.N(), k);
    }
    const Eigen::MatrixXcd cols = m.entries()(Eigen::all, tr.columns);
    const Eigen::MatrixXcd g = cols.adjoint() * cols;
    tr.hermitian_residual = k ? (g - g.adjoint()).cwiseAbs().maxCoeff() : 0.0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        if (a == b) continue;
        const double mag = std::abs(g(Eigen::Index(a), Eigen::Index(b)));
        const double rr = double(s.replication(s.point_of_column(tr.columns[a]))) *
                          double(s.replication(s.point_of_column(tr.columns[b])));
        tr.offdiag_law_deviation = std::max(tr.offdiag_law_deviation, std::min(mag, std::abs(mag - 1.0 / std::sqrt(rr))));
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    tr.eigenvalues = es.eigenvalues();
    for (Eigen::Index i = 0; i < tr.eigenvalues.size(); ++i)
      tr.psi_norm = std::max(tr.psi_norm, std::abs(tr.eigenvalues(i) - 1.0));
    res.per_trial.push_back(std::move(tr));
  }
  return res;
}

namespace {

void write_sweep_header(std::ostream& os, const SweepConfig& c) {
  os << "# matrix=" << c.matrix_id << '\n'
     << "# algorithm=" << to_string(c.algorithm) << '\n'
     << "# trials=" << c.trials << '\n'
     << "# epsilon=" << format_double(c.epsilon) << '\n'
     << "# tolerance=" << format_double(c.tolerance) << '\n'
     << "# master_seed=" << c.master_seed << '\n'
     << "# seed_derivation=splitmix64(master,sparsity,trial,stream) rng=mt19937_64\n"
     << "# signal_values=" << to_string(c.signal.value_model) << '\n'
     << "# signal_signed=" << c.signal.is_signed << '\n'
     << "# signal_normalize=" << c.signal.normalize << '\n';
  if (c.algorithm == Algorithm::alg1) os << "# support_size=" << c.support_size << '\n';
  if (c.noise) {
    os << "# noise_model=" << to_string(c.noise->model) << '\n'
       << "# noise_signed=" << c.noise->is_signed << '\n'
       << "# noise_l2=" << format_double(c.noise->target_l2) << '\n';
    if (c.noise->model == NoiseModel::burst) os << "# burst_len=" << c.noise->burst_len << '\n';
  }
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& r, bool with_timings) {
  write_sweep_header(os, r.config);
  os << "sparsity,trials,successes,success_rate,solver_failures,mean_error,mean_residual";
  if (with_timings) os << ",mean_elapsed";
  os << '\n';
  for (const auto& row : r.rows) {
    os << row.sparsity << ',' << row.trials << ',' << row.successes << ',' << format_double(row.success_rate())
       << ',' << row.solver_failures << ',' << format_double(row.mean_error) << ','
       << format_double(row.mean_residual);
    if (with_timings) os << ',' << format_double(row.mean_elapsed);
    os << '\n';
  }
}

void write_sweep_plot_csv(std::ostream& os, const SweepResult& r) {
  os << "sparsity,success_rate\n";
  for (const auto& row : r.rows) os << row.sparsity << ',' << format_double(row.success_rate()) << '\n';
}

void write_noise_table_csv(std::ostream& os, const NoiseTable& t) {
  SweepConfig c = t.config;
  write_sweep_header(os, c);
  os << "# cells=successes\n";
  os << "sparsity";
  for (double l : t.levels) os << ",noise_" << format_double(l);
  os << '\n';
  if (t.columns.empty()) return;
  for (std::size_t i = 0; i < t.columns.front().rows.size(); ++i) {
    os << t.columns.front().rows[i].sparsity;
    for (const auto& col : t.columns) os << ',' << col.rows[i].successes;
    os << '\n';
  }
}

namespace {

void write_spectrum_header(std::ostream& os, const SpectrumResult& r) {
  os << "# matrix=" << r.matrix_id << '\n'
     << "# t=" << r.t << " columns=" << 2 * r.t << '\n'
     << "# trials=" << r.trials << '\n'
     << "# distinct_points=" << r.distinct_points << '\n'
     << "# seed=" << r.seed << '\n'
     << "# seed_derivation=splitmix64(seed,2t,trial,2) rng=mt19937_64\n";
  if (!r.per_trial.empty())
    os << "# min_eigenvalue=" << format_double(r.min_eigenvalue()) << '\n'
       << "# max_eigenvalue=" << format_double(r.max_eigenvalue()) << '\n'
       << "# max_psi_norm=" << format_double(r.max_psi_norm()) << '\n';
}

}  // namespace

void write_spectrum_csv(std::ostream& os, const SpectrumResult& r) {
  write_spectrum_header(os, r);
  os << "trial,min_eigenvalue,max_eigenvalue,psi_norm,offdiag_law_deviation\n";
  for (std::size_t i = 0; i < r.per_trial.size(); ++i) {
    const auto& tr = r.per_trial[i];
    const bool any = tr.eigenvalues.size() > 0;
    os << i << ',' << format_double(any ? tr.eigenvalues.minCoeff() : 0.0) << ','
       << format_double(any ? tr.eigenvalues.maxCoeff() : 0.0) << ',' << format_double(tr.psi_norm) << ','
       << format_double(tr.offdiag_law_deviation) << '\n';
  }
}

void write_spectrum_eigenvalues_csv(std::ostream& os, const SpectrumResult& r) {
  write_spectrum_header(os, r);
  os << "trial,index,eigenvalue\n";
  for (std::size_t i = 0; i < r.per_trial.size(); ++i)
    for (Eigen::Index j = 0; j < r.per_trial[i].eigenvalues.size(); ++j)
      os << i << ',' << j << ',' << format_double(r.per_trial[i].eigenvalues(j)) << '\n';
}

}  // namespace pbdcs
