// pbdcs: build, certify and exercise PBD-based compressed sensing matrices.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "pbdcs/certify.hpp"
#include "pbdcs/design.hpp"
#include "pbdcs/experiments.hpp"
#include "pbdcs/hadamard.hpp"
#include "pbdcs/recovery.hpp"
#include "pbdcs/sensing.hpp"

namespace fs = std::filesystem;
using namespace pbdcs;

namespace {

constexpr const char* kOutDirEnv = "PBDCS_OUT_DIR";

// A failure attributed to one stage of a command ("design", "removal", ...).
struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& what) : std::runtime_error(stage + ": " + what) {}
};

template <typename F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

fs::path resolve_output(const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return path;
  const char* dir = std::getenv(kOutDirEnv);
  return (dir && *dir) ? fs::path(dir) / path : path;
}

// Writes through a temporary in the same directory and renames it into place.
void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    body(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// "1:50", "30:60:5", "1:15,50".
std::vector<std::size_t> parse_grid(const std::string& spec) {
  std::vector<std::size_t> out;
  std::stringstream items(spec);
  std::string item;
  while (std::getline(items, item, ',')) {
    std::vector<std::size_t> parts;
    std::stringstream ps(item);
    std::string p;
    while (std::getline(ps, p, ':')) parts.push_back(std::stoull(p));
    if (parts.size() == 1) {
      out.push_back(parts[0]);
    } else if (parts.size() == 2 || parts.size() == 3) {
      const std::size_t step = parts.size() == 3 ? parts[2] : 1;
      if (step == 0) throw std::invalid_argument("zero step in '" + item + "'");
      for (std::size_t t = parts[0]; t <= parts[1]; t += step) out.push_back(t);
    } else {
      throw std::invalid_argument("bad grid item '" + item + "'");
    }
  }
  return out;
}

struct LoadedMatrix {
  std::string id;
  std::shared_ptr<const SensingMatrix> complex;  // null for plain real matrices
  Eigen::MatrixXd real;
};

LoadedMatrix load_matrix(const std::string& path) {
  const std::string text = slurp(path);
  std::istringstream is(text);
  LoadedMatrix lm;
  lm.id = fs::path(path).filename().string();
  if (text.rfind("csmatrix-real", 0) == 0) {
    lm.real = read_real_matrix(is);
  } else {
    lm.complex = std::make_shared<const SensingMatrix>(read_sensing_matrix(is));
    lm.real = realify(lm.complex->entries());
  }
  return lm;
}

LoadedMatrix gaussian_matrix(const std::string& shape, std::uint64_t seed) {
  const auto x = shape.find('x');
  if (x == std::string::npos) throw std::invalid_argument("gaussian shape must be ROWSxCOLS");
  const std::size_t rows = std::stoull(shape.substr(0, x)), cols = std::stoull(shape.substr(x + 1));
  LoadedMatrix lm;
  lm.id = "gaussian:" + shape + ":" + std::to_string(seed);
  lm.real = gaussian_ensemble(rows, cols, seed);
  return lm;
}

const SensingMatrix& require_structure(const LoadedMatrix& lm) {
  if (!lm.complex) throw std::runtime_error(lm.id + " has no design metadata (needs a file written by build)");
  return *lm.complex;
}

// The resolved options of the running subcommand, readable back through --config.
void emit_config(const CLI::App& sub, const fs::path& path) {
  write_atomic(path, [&](std::ostream& os) { os << "[" << sub.get_name() << "]\n" << sub.config_to_str(true, false); });
}

fs::path config_path_for(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".config.toml");
  return p;
}

// ---------------------------------------------------------------- build

struct BuildArgs {
  std::string source;
  unsigned param = 0;
  bool remove_oval = false;
  std::vector<std::size_t> remove_blocks;
  std::string hadamard = "fourier";
  bool realify = false;
  std::string name;
};

int cmd_build(const BuildArgs& a, const CLI::App& app) {
  Design d = stage("design", [&] {
    if (a.source == "pg") return projective_plane(a.param);
    if (a.source == "sts") return steiner_triple_system(a.param);
    throw std::invalid_argument("unknown design source '" + a.source + "' (pg or sts)");
  });
  std::string name = a.source + std::to_string(a.param);
  std::string description = a.source == "pg" ? "PG(2," + std::to_string(a.param) + ")"
                                             : "STS(" + std::to_string(a.param) + ")";
  if (a.remove_oval) {
    d = stage("removal", [&] {
      if (a.source != "pg") throw std::invalid_argument("--remove-oval needs a projective plane");
      return remove_points(d, find_conic_oval(d, a.param));
    });
    name += "-oval";
    description += " minus an oval";
  }
  if (!a.remove_blocks.empty()) {
    d = stage("removal", [&] { return remove_blocks_with_points(d, a.remove_blocks); });
    name += "-blocks";
    for (std::size_t b : a.remove_blocks) name += "_" + std::to_string(b);
    description += " minus " + std::to_string(a.remove_blocks.size()) + " blocks and their points";
  }
  const HadamardFamily family = stage("hadamard", [&] {
    if (a.hadamard == "fourier") return HadamardFamily::fourier;
    if (a.hadamard == "real") return HadamardFamily::real;
    throw std::invalid_argument("unknown Hadamard kind '" + a.hadamard + "' (fourier or real)");
  });
  name += "-" + a.hadamard;
  if (!a.name.empty()) name = a.name;

  const auto hs = stage("hadamard", [&] { return hadamards_for(d, family); });
  auto m = stage("construction", [&] { return std::make_shared<const SensingMatrix>(build(d, hs)); });

  const fs::path base = resolve_output(name);
  write_atomic(fs::path(base.string() + ".design"), [&](std::ostream& os) { write_design(os, d); });
  write_atomic(fs::path(base.string() + ".csm"), [&](std::ostream& os) { write_sensing_matrix(os, *m); });
  std::optional<RealSensingMatrix> rm;
  if (a.realify) {
    rm = realify(m);
    write_atomic(fs::path(base.string() + ".real.csv"), [&](std::ostream& os) { write_real_matrix(os, rm->entries()); });
  }
  emit_config(app, fs::path(base.string() + ".config.toml"));

  std::map<std::size_t, std::size_t> reps;
  for (std::size_t r : d.replication()) ++reps[r];
  std::cout << "design: " << description << ", v=" << d.v() << " blocks=" << d.block_count() << " K={";
  bool first = true;
  for (std::size_t k : d.block_sizes()) std::cout << (first ? "" : ",") << k, first = false;
  std::cout << "}\n";
  std::cout << "matrix: " << m->n() << " x " << m->N() << " (" << a.hadamard << " Hadamard blocks)\n";
  if (rm) std::cout << "realified: " << rm->rows() << " x " << rm->cols() << "\n";
  std::cout << "replication:";
  for (auto [r, count] : reps) std::cout << " r=" << r << " (" << count << " points)";
  std::cout << "\n";
  std::cout << "coherence: " << coherence(*m) << "\n";
  const RecoveryBounds b = recovery_guarantee_bounds(*m);
  std::cout << "recovery guaranteed for t <= " << b.t_guaranteed;
  if (b.t_impossible)
    std::cout << "; impossible for some t = " << *b.t_impossible << "-sparse vectors (" << b.witness
              << " witness, sparsity " << b.witness_sparsity << ")";
  std::cout << "\n";
  std::cout << "wrote " << base.string() << ".{design,csm" << (rm ? ",real.csv" : "") << ",config.toml}\n";
  return 0;
}

// ---------------------------------------------------------------- certify

struct CertifyArgs {
  std::string matrix;
  std::size_t smax = 0;
  std::uint64_t budget = 20'000'000;
  double tolerance = 1e-9;
};

double image_norm(const SensingMatrix& m, const Eigen::VectorXcd& v) {
  return (m.entries() * v).cwiseAbs().maxCoeff();
}

int cmd_certify(const CertifyArgs& a) {
  const LoadedMatrix lm = load_matrix(a.matrix);
  const SensingMatrix& m = require_structure(lm);
  const SensingStructure& s = m.structure();
  std::cout << "matrix: " << lm.id << " (" << m.n() << " x " << m.N() << ")\n";

  std::optional<Eigen::VectorXcd> best;
  std::string best_name;
  if (s.v() >= 2) {
    // The two points of smallest replication.
    std::vector<Point> order(s.v());
    for (Point p = 0; p < s.v(); ++p) order[p] = p;
    std::stable_sort(order.begin(), order.end(),
                     [&](Point x, Point y) { return s.replication(x) < s.replication(y); });
    const Eigen::VectorXcd v = spark_witness_two_points(m, order[0], order[1]);
    std::cout << "two-point witness: points " << order[0] << "," << order[1] << " sparsity " << sparsity(v)
              << " (r1+r2=" << s.replication(order[0]) + s.replication(order[1]) << "), |Phi v|_inf = "
              << image_norm(m, v) << "\n";
    best = v;
    best_name = "two-point";
  }
  if (auto arc = find_arc_triple(s)) {
    const Eigen::VectorXcd v = arc_nullvector(m, *arc);
    const auto& ix = arc->indices();
    std::cout << "arc nullvector: points " << ix[0] << "," << ix[1] << "," << ix[2] << " sparsity " << sparsity(v)
              << " (3r/2=" << 3 * s.replication(ix[0]) / 2 << "), |Phi v|_inf = " << image_norm(m, v) << "\n";
    if (!best || sparsity(v) < sparsity(*best)) {
      best = v;
      best_name = "arc";
    }
  } else {
    std::cout << "arc nullvector: not applicable (needs three arc points with equal real Hadamard blocks of order 0 mod 4)\n";
  }

  const std::size_t smax = a.smax ? a.smax : (best ? sparsity(*best) : 0);
  try {
    const SparkResult sr = brute_spark(m, smax, a.budget);
    if (sr.spark)
      std::cout << "spark = " << *sr.spark << "\n";
    else
      std::cout << "spark > " << smax << "\n";
  } catch (const SearchBudgetExceeded& e) {
    std::cout << "brute-force spark: budget exceeded (needs ";
    if (e.needed() == std::numeric_limits<std::uint64_t>::max()) std::cout << "more than 2^64";
    else std::cout << e.needed();
    std::cout << " subsets, budget " << e.budget() << ")";
    if (best) std::cout << "; spark <= " << sparsity(*best);
    std::cout << "\n";
  }

  if (best) {
    const NonrecoverablePair pr = split_nonrecoverable(m, *best, a.tolerance);
    const std::size_t s1 = sparsity(pr.m1), s2 = sparsity(pr.m2);
    std::cout << "split of the " << best_name << " witness: " << s1 << "-sparse and " << s2
              << "-sparse vectors with equal images (gap " << pr.image_gap << ")\n";
    std::cout << "spark <= " << sparsity(*best) << "; " << std::max(s1, s2) << "-sparse non-recoverable pair exhibited\n";
  }
  return 0;
}

// ---------------------------------------------------------------- recover

struct RecoverArgs {
  std::string matrix;
  std::string signal;
  std::string sample;
  std::string algorithm = "omp";
  std::size_t support_size = 0;
  double tolerance = 0.0;
  std::size_t max_iter = 0;
  double epsilon = 1e-8;
  std::string out;
};

Eigen::VectorXcd read_any_vector(const std::string& path) {
  std::istringstream is(slurp(path));
  return read_complex_vector(is);
}

int cmd_recover(const RecoverArgs& a) {
  if (a.signal.empty() == a.sample.empty()) throw std::invalid_argument("give exactly one of --signal and --sample");
  const LoadedMatrix lm = load_matrix(a.matrix);
  const Algorithm alg = parse_algorithm(a.algorithm);
  const std::optional<Eigen::VectorXcd> signal =
      a.signal.empty() ? std::nullopt : std::optional<Eigen::VectorXcd>(read_any_vector(a.signal));
  const std::optional<Eigen::VectorXcd> sample =
      a.sample.empty() ? std::nullopt : std::optional<Eigen::VectorXcd>(read_any_vector(a.sample));
  const fs::path out = resolve_output(a.out.empty() ? "recovery" : a.out);

  auto report = [&](const auto& res, const auto& truth) {
    write_atomic(fs::path(out.string() + ".result"), [&](std::ostream& os) {
      write_recovery_summary(os, res, to_string(alg));
      if (truth) os << "error=" << (res.estimate - *truth).norm() << '\n';
    });
    write_atomic(fs::path(out.string() + ".estimate"), [&](std::ostream& os) { write_vector(os, res.estimate); });
    write_recovery_summary(std::cout, res, to_string(alg));
    if (truth) {
      const double err = (res.estimate - *truth).norm();
      std::cout << "error=" << err << "\nsuccess=" << (err < a.epsilon) << "\n";
    }
  };

  if (alg == Algorithm::alg1) {
    const SensingStructure& s = require_structure(lm).structure();
    const auto N = static_cast<Eigen::Index>(s.N());
    if (signal && signal->size() != N)
      throw std::invalid_argument("signal length " + std::to_string(signal->size()) + " != N = " + std::to_string(N));
    const Eigen::VectorXcd y = sample ? *sample : s.apply(*signal);
    if (y.size() != static_cast<Eigen::Index>(s.n()))
      throw std::invalid_argument("sample length " + std::to_string(y.size()) + " != n = " + std::to_string(s.n()));
    report(alg1_recover(s, y, a.support_size), signal);
    return 0;
  }

  // OMP and basis pursuit run on the real matrix; complex vectors of the
  // complex dimensions are realified first.
  const Eigen::MatrixXd& phi = lm.real;
  auto to_real = [&](const Eigen::VectorXcd& v, Eigen::Index real_len, const char* what) -> Eigen::VectorXd {
    if (v.size() == real_len && v.imag().cwiseAbs().maxCoeff() == 0.0) return v.real();
    if (lm.complex && 2 * v.size() == real_len) return realify_vector(v);
    throw std::invalid_argument(std::string(what) + " length " + std::to_string(v.size()) + " does not fit a " +
                                std::to_string(phi.rows()) + " x " + std::to_string(phi.cols()) + " matrix");
  };
  std::optional<Eigen::VectorXd> truth;
  if (signal) truth = to_real(*signal, phi.cols(), "signal");
  const Eigen::VectorXd y = sample ? to_real(*sample, phi.rows(), "sample") : Eigen::VectorXd(phi * *truth);
  if (alg == Algorithm::omp) {
    report(omp(phi, y, a.max_iter, a.tolerance > 0 ? a.tolerance : 1e-10), truth);
  } else {
    BasisPursuitOptions opts;
    if (a.tolerance > 0) opts.tol = a.tolerance;
    if (a.max_iter > 0) opts.max_iterations = a.max_iter;
    report(basis_pursuit(phi, y, opts), truth);
  }
  return 0;
}

// ---------------------------------------------------------------- experiments

struct ExperimentArgs {
  std::string matrix;
  std::string gaussian;
  std::uint64_t gaussian_seed = 1;
  std::string algorithm = "omp";
  std::string sparsities = "1:50";
  std::size_t trials = 100;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  double tolerance = 0.0;
  std::size_t support_size = 0;
  std::string values = "uniform";
  bool is_signed = false;
  bool normalize = true;
  double noise_l2 = 0.0;
  std::string noise_model = "uniform";
  bool noise_signed = false;
  std::size_t burst_len = 0;
  std::string levels = "0,1e-12,1e-10,1e-9,2e-9";
  unsigned threads = 1;
  std::string out;
  std::string plot;
  bool timings = false;
};

void add_experiment_options(CLI::App* sub, ExperimentArgs& a, bool noise_level) {
  sub->add_option("--matrix", a.matrix, "Matrix file written by build (.csm or .real.csv)");
  sub->add_option("--gaussian", a.gaussian, "Use a Gaussian ensemble of shape ROWSxCOLS instead");
  sub->add_option("--gaussian-seed", a.gaussian_seed, "Seed of the Gaussian ensemble")->capture_default_str();
  sub->add_option("--algorithm", a.algorithm, "omp, bp or alg1")->capture_default_str();
  sub->add_option("--sparsities", a.sparsities, "Grid such as 1:50, 30:60:5 or 1:15,50")->capture_default_str();
  sub->add_option("--trials", a.trials, "Trials per sparsity")->capture_default_str();
  sub->add_option("--epsilon", a.epsilon, "Success threshold on ||m - m_hat||_2")->capture_default_str();
  sub->add_option("--seed", a.seed, "Master seed")->capture_default_str();
  sub->add_option("--tolerance", a.tolerance, "Solver tolerance (0: solver default)")->capture_default_str();
  sub->add_option("--support-size", a.support_size, "alg1 support size (0: r1)")->capture_default_str();
  sub->add_option("--values", a.values, "Signal values: uniform or grid")->capture_default_str();
  sub->add_flag("--signed,!--unsigned", a.is_signed, "Random signs on the nonzeros")->default_str(a.is_signed ? "true" : "false");
  sub->add_flag("--normalize,!--no-normalize", a.normalize, "Scale signals to unit l2 norm")->default_str(a.normalize ? "true" : "false");
  if (noise_level) sub->add_option("--noise-l2", a.noise_l2, "Noise l2 norm (0: noiseless)")->capture_default_str();
  else sub->add_option("--levels", a.levels, "Comma-separated noise l2 norms")->capture_default_str();
  sub->add_option("--noise-model", a.noise_model, "uniform or burst")->capture_default_str();
  sub->add_flag("--noise-signed,!--noise-unsigned", a.noise_signed, "Noise entries from (-1,1) instead of (0,1)")->default_str(a.noise_signed ? "true" : "false");
  sub->add_option("--burst-len", a.burst_len, "Burst window length (0: ceil(N/20))")->capture_default_str();
  sub->add_option("--threads", a.threads, "Worker threads for trials")->capture_default_str();
  sub->add_option("--out", a.out, "CSV output path")->required();
  sub->add_option("--plot", a.plot, "Optional sparsity,success_rate CSV");
  sub->add_flag("--timings", a.timings, "Add mean elapsed seconds (makes the CSV machine-dependent)");
}

SweepConfig sweep_config(const ExperimentArgs& a, const LoadedMatrix& lm) {
  SweepConfig c;
  c.matrix_id = lm.id;
  c.algorithm = parse_algorithm(a.algorithm);
  c.sparsities = parse_grid(a.sparsities);
  c.trials = a.trials;
  c.epsilon = a.epsilon;
  c.master_seed = a.seed;
  c.tolerance = a.tolerance;
  c.support_size = a.support_size;
  c.signal.value_model = parse_value_model(a.values);
  c.signal.is_signed = a.is_signed;
  c.signal.normalize = a.normalize;
  c.threads = a.threads;
  NoiseSpec n;
  n.model = parse_noise_model(a.noise_model);
  n.is_signed = a.noise_signed;
  n.burst_len = a.burst_len;
  n.target_l2 = a.noise_l2;
  if (a.noise_l2 > 0) c.noise = n;
  return c;
}

LoadedMatrix experiment_matrix(const ExperimentArgs& a) {
  if (a.matrix.empty() == a.gaussian.empty()) throw std::invalid_argument("give exactly one of --matrix and --gaussian");
  return a.matrix.empty() ? gaussian_matrix(a.gaussian, a.gaussian_seed) : load_matrix(a.matrix);
}

int cmd_sweep(const ExperimentArgs& a, const CLI::App& app) {
  const LoadedMatrix lm = experiment_matrix(a);
  const SweepConfig c = sweep_config(a, lm);
  const SweepResult r = c.algorithm == Algorithm::alg1 ? run_sweep(require_structure(lm).structure(), c)
                                                       : run_sweep(lm.real, c);
  const fs::path out = resolve_output(a.out);
  write_atomic(out, [&](std::ostream& os) { write_sweep_csv(os, r, a.timings); });
  if (!a.plot.empty()) write_atomic(resolve_output(a.plot), [&](std::ostream& os) { write_sweep_plot_csv(os, r); });
  emit_config(app, config_path_for(out));
  std::size_t failures = 0;
  for (const auto& row : r.rows) {
    std::cout << "t=" << row.sparsity << " " << row.successes << "/" << row.trials << "\n";
    failures += row.solver_failures;
  }
  if (failures) std::cout << failures << " trials ended without solver convergence (counted as failures)\n";
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_noise_table(const ExperimentArgs& a, const CLI::App& app) {
  const LoadedMatrix lm = experiment_matrix(a);
  SweepConfig c = sweep_config(a, lm);
  if (c.algorithm == Algorithm::alg1) throw std::invalid_argument("noise-table runs omp or bp");
  NoiseSpec n;
  n.model = parse_noise_model(a.noise_model);
  n.is_signed = a.noise_signed;
  n.burst_len = a.burst_len;
  c.noise = n;
  std::vector<double> levels;
  std::stringstream ls(a.levels);
  for (std::string item; std::getline(ls, item, ',');) levels.push_back(std::stod(item));
  const NoiseTable t = run_noise_table(lm.real, c, levels);
  const fs::path out = resolve_output(a.out);
  write_atomic(out, [&](std::ostream& os) { write_noise_table_csv(os, t); });
  emit_config(app, config_path_for(out));
  std::cout << "sparsity";
  for (double l : levels) std::cout << "  " << l;
  std::cout << "\n";
  for (std::size_t i = 0; i < (t.columns.empty() ? 0 : t.columns.front().rows.size()); ++i) {
    std::cout << t.columns.front().rows[i].sparsity;
    for (const auto& col : t.columns) std::cout << "  " << col.rows[i].successes;
    std::cout << "\n";
  }
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

struct SpectrumArgs {
  std::string matrix;
  std::size_t t = 12;
  std::size_t trials = 500;
  bool distinct = true;
  std::uint64_t seed = 1;
  std::string out;
  std::string eigenvalues;
};

int cmd_spectrum(const SpectrumArgs& a, const CLI::App& app) {
  const LoadedMatrix lm = load_matrix(a.matrix);
  SpectrumResult r = gram_spectrum_experiment(require_structure(lm), a.t, a.trials, a.distinct, a.seed);
  r.matrix_id = lm.id;
  const fs::path out = resolve_output(a.out);
  write_atomic(out, [&](std::ostream& os) { write_spectrum_csv(os, r); });
  if (!a.eigenvalues.empty())
    write_atomic(resolve_output(a.eigenvalues), [&](std::ostream& os) { write_spectrum_eigenvalues_csv(os, r); });
  emit_config(app, config_path_for(out));
  std::cout << "eigenvalues in [" << r.min_eigenvalue() << ", " << r.max_eigenvalue() << "], max ||Psi_S||_op = "
            << r.max_psi_norm() << "\n";
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- hadamard-check

struct HadamardArgs {
  std::string kind = "fourier";
  std::size_t order = 4;
  std::size_t kmax = 0;
  std::uint64_t budget = 50'000'000;
  std::string out;
};

int cmd_hadamard_check(const HadamardArgs& a) {
  const HadamardMatrix h = stage("hadamard", [&] {
    if (a.kind == "fourier") return fourier(a.order);
    if (a.kind == "real") return real_hadamard(a.order);
    throw std::invalid_argument("unknown kind '" + a.kind + "' (fourier or real)");
  });
  std::cout << "order " << h.order() << ", kind " << to_string(h.kind()) << ", real " << h.is_real()
            << ", orthogonality error " << h.orthogonality_error() << "\n";
  if (h.order() <= 12) {
    std::cout << "u,min_support,ceil(r/u)\n";
    for (std::size_t u = 1; u <= h.order(); ++u)
      std::cout << u << "," << min_support_combination(h, u, a.budget) << "," << (h.order() + u - 1) / u << "\n";
  }
  if (a.kmax) std::cout << "optimal up to k=" << a.kmax << ": " << is_optimal(h, a.kmax, a.budget) << "\n";
  if (!a.out.empty()) write_atomic(resolve_output(a.out), [&](std::ostream& os) { write_hadamard(os, h); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed sensing matrices from pairwise balanced designs"};
  app.set_config("--config", "", "Read options from a TOML file (as emitted next to every output)");
  app.require_subcommand(1);
  app.footer(std::string("Relative output paths are placed under $") + kOutDirEnv + " when it is set.");

  BuildArgs ba;
  auto* build_cmd = app.add_subcommand("build", "Construct a sensing matrix from a design recipe");
  build_cmd->add_option("source", ba.source, "pg or sts")->required();
  build_cmd->add_option("param", ba.param, "q for pg, v for sts")->required();
  build_cmd->add_flag("--remove-oval", ba.remove_oval, "Delete the points of a conic");
  build_cmd->add_option("--remove-blocks", ba.remove_blocks, "Delete these blocks and their points")->delimiter(',');
  build_cmd->add_option("--hadamard", ba.hadamard, "fourier or real")->capture_default_str();
  build_cmd->add_flag("--realify", ba.realify, "Also write the real 2n x 2N matrix");
  build_cmd->add_option("--name", ba.name, "Output file stem (default derived from the recipe)");

  CertifyArgs ca;
  auto* certify_cmd = app.add_subcommand("certify", "Spark witnesses and non-recoverable pairs");
  certify_cmd->add_option("matrix", ca.matrix, "Matrix file (.csm)")->required();
  certify_cmd->add_option("--smax", ca.smax, "Brute-force spark bound (0: witness sparsity)")->capture_default_str();
  certify_cmd->add_option("--budget", ca.budget, "Brute-force subset budget")->capture_default_str();
  certify_cmd->add_option("--tolerance", ca.tolerance, "Image agreement tolerance")->capture_default_str();

  RecoverArgs ra;
  auto* recover_cmd = app.add_subcommand("recover", "Run one recovery");
  recover_cmd->add_option("matrix", ra.matrix, "Matrix file")->required();
  recover_cmd->add_option("--signal", ra.signal, "Signal vector file (the sample is computed from it)");
  recover_cmd->add_option("--sample", ra.sample, "Sample vector file");
  recover_cmd->add_option("--algorithm", ra.algorithm, "omp, bp or alg1")->capture_default_str();
  recover_cmd->add_option("--support-size", ra.support_size, "alg1 support size (0: r1)")->capture_default_str();
  recover_cmd->add_option("--tolerance", ra.tolerance, "Solver tolerance (0: default)")->capture_default_str();
  recover_cmd->add_option("--max-iter", ra.max_iter, "Iteration cap (0: default)")->capture_default_str();
  recover_cmd->add_option("--epsilon", ra.epsilon, "Success threshold when --signal is given")->capture_default_str();
  recover_cmd->add_option("--out", ra.out, "Output stem for .result and .estimate")->capture_default_str();

  ExperimentArgs sa;
  auto* sweep_cmd = app.add_subcommand("sweep", "Success rate against sparsity");
  add_experiment_options(sweep_cmd, sa, true);

  ExperimentArgs na;
  na.algorithm = "bp";
  na.sparsities = "30:60:5";
  auto* noise_cmd = app.add_subcommand("noise-table", "Success counts over sparsity and noise level");
  add_experiment_options(noise_cmd, na, false);

  SpectrumArgs pa;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Gram spectra of random column subsets");
  spectrum_cmd->add_option("--matrix", pa.matrix, "Matrix file (.csm)")->required();
  spectrum_cmd->add_option("--t", pa.t, "Half the number of columns per trial")->capture_default_str();
  spectrum_cmd->add_option("--trials", pa.trials, "Number of trials")->capture_default_str();
  spectrum_cmd->add_flag("--distinct,!--any-columns", pa.distinct, "Columns from distinct points")->default_str(pa.distinct ? "true" : "false");
  spectrum_cmd->add_option("--seed", pa.seed, "Seed")->capture_default_str();
  spectrum_cmd->add_option("--out", pa.out, "CSV output path")->required();
  spectrum_cmd->add_option("--eigenvalues", pa.eigenvalues, "Optional long-form eigenvalue CSV");

  HadamardArgs ha;
  auto* had_cmd = app.add_subcommand("hadamard-check", "Hadamard matrix properties");
  had_cmd->add_option("--kind", ha.kind, "fourier or real")->capture_default_str();
  had_cmd->add_option("--order", ha.order, "Order r")->capture_default_str();
  had_cmd->add_option("--kmax", ha.kmax, "Check optimality up to k rows (0: skip)")->capture_default_str();
  had_cmd->add_option("--budget", ha.budget, "Search budget")->capture_default_str();
  had_cmd->add_option("--out", ha.out, "Write the matrix here");

  for (auto* sub : app.get_subcommands({})) sub->configurable();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build_cmd) return cmd_build(ba, *build_cmd);
    if (*certify_cmd) return cmd_certify(ca);
    if (*recover_cmd) return cmd_recover(ra);
    if (*sweep_cmd) return cmd_sweep(sa, *sweep_cmd);
    if (*noise_cmd) return cmd_noise_table(na, *noise_cmd);
    if (*spectrum_cmd) return cmd_spectrum(pa, *spectrum_cmd);
    if (*had_cmd) return cmd_hadamard_check(ha);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
