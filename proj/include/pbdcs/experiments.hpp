#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbdcs/sensing.hpp"

namespace pbdcs {

enum class ValueModel { uniform, grid };
enum class NoiseModel { uniform, burst };
enum class Algorithm { omp, bp, alg1 };

std::string_view to_string(ValueModel m);
std::string_view to_string(NoiseModel m);
std::string_view to_string(Algorithm a);
ValueModel parse_value_model(std::string_view s);
NoiseModel parse_noise_model(std::string_view s);
Algorithm parse_algorithm(std::string_view s);

struct SignalSpec {
  std::size_t N = 0;
  std::size_t t = 0;
  ValueModel value_model = ValueModel::uniform;  ///< (0,1) or {i/100 : 1 <= i <= 100}
  bool is_signed = false;
  bool normalize = true;
  std::uint64_t seed = 0;
};

/// Exactly t nonzeros on a uniformly random support.
Eigen::VectorXd gen_sparse_signal(const SignalSpec& spec);

struct NoiseSpec {
  NoiseModel model = NoiseModel::uniform;
  bool is_signed = false;
  double target_l2 = 0.0;
  std::size_t burst_len = 0;  ///< 0: ceil(N / 20)
  std::uint64_t seed = 0;
};

/// Entries from (0,1) or (-1,1) (a contiguous window of them for burst
/// noise), scaled to ||e||_2 = target_l2.
Eigen::VectorXd gen_noise(const NoiseSpec& spec, std::size_t N);

/// iid N(0,1) entries, columns scaled to unit norm.
Eigen::MatrixXd gaussian_ensemble(std::size_t rows, std::size_t cols, std::uint64_t seed);

struct SweepConfig {
  std::string matrix_id;
  Algorithm algorithm = Algorithm::omp;
  std::vector<std::size_t> sparsities;
  std::size_t trials = 100;
  double epsilon = 1e-8;
  SignalSpec signal;                ///< N, t and seed are filled per trial
  std::optional<NoiseSpec> noise;   ///< seed is filled per trial
  std::uint64_t master_seed = 0;
  double tolerance = 0.0;           ///< solver tolerance; 0 keeps each solver's default
  std::size_t support_size = 0;     ///< alg1 only; 0 means r_1
  unsigned threads = 1;
};

struct SweepRow {
  std::size_t sparsity = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t solver_failures = 0;  ///< trials whose solver did not converge
  double mean_error = 0.0;          ///< mean ||m - m_hat||_2
  double mean_residual = 0.0;       ///< mean ||Phi m_hat - y||_2
  double mean_elapsed = 0.0;        ///< seconds; not part of the deterministic output

  double success_rate() const { return trials ? double(successes) / double(trials) : 0.0; }
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;  ///< ascending sparsity
};

/// Seeds: signal derive_seed(master, t, trial, 0), noise derive_seed(master, t, trial, 1),
/// so every noise level of a table sees the same signals and noise directions.
/// Recovery uses OMP or basis pursuit on `phi`.
SweepResult run_sweep(const Eigen::MatrixXd& phi, const SweepConfig& config);
/// The alg1 decoder on the complex structure (real signals of length N).
SweepResult run_sweep(const SensingStructure& s, const SweepConfig& config);

struct NoiseTable {
  SweepConfig config;           ///< noise model, seeds; target_l2 varies
  std::vector<double> levels;
  std::vector<SweepResult> columns;  ///< one sweep per level
};

NoiseTable run_noise_table(const Eigen::MatrixXd& phi, const SweepConfig& config, const std::vector<double>& levels);

struct SpectrumTrial {
  std::vector<std::size_t> columns;  ///< ascending
  Eigen::VectorXd eigenvalues;       ///< ascending, 2t values
  double psi_norm = 0.0;             ///< ||Phi_S^* Phi_S - I||_op
  double hermitian_residual = 0.0;   ///< max |G - G^*|
  double offdiag_law_deviation = 0.0;  ///< distance of each |G_ab| from {0, 1/sqrt(r_a r_b)}
};

struct SpectrumResult {
  std::string matrix_id;
  std::size_t t = 0;
  std::size_t trials = 0;
  bool distinct_points = false;
  std::uint64_t seed = 0;
  std::vector<SpectrumTrial> per_trial;

  double min_eigenvalue() const;
  double max_eigenvalue() const;
  double max_psi_norm() const;
};

/// Per trial, 2t columns (from 2t distinct points when distinct_points),
/// and the spectrum of their Gram matrix. Trial seed derive_seed(seed, 2t, trial, 2).
SpectrumResult gram_spectrum_experiment(const SensingMatrix& m, std::size_t t, std::size_t trials,
                                        bool distinct_points, std::uint64_t seed);

/// CSV with `# key=value` header lines echoing the configuration.
/// Timings are written only when with_timings is set, so that the default
/// output depends on nothing but the configuration.
void write_sweep_csv(std::ostream& os, const SweepResult& r, bool with_timings = false);
/// Two columns, sparsity,success_rate.
void write_sweep_plot_csv(std::ostream& os, const SweepResult& r);
/// Rows are sparsities, columns noise levels, cells success counts.
void write_noise_table_csv(std::ostream& os, const NoiseTable& t);
/// One line per trial: extremes and ||Psi_S||_op.
void write_spectrum_csv(std::ostream& os, const SpectrumResult& r);
/// Long form, trial,index,eigenvalue.
void write_spectrum_eigenvalues_csv(std::ostream& os, const SpectrumResult& r);

}  // namespace pbdcs
