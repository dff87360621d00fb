#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "pbdcs/design.hpp"
#include "pbdcs/hadamard.hpp"

namespace pbdcs {

class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using HadamardRef = std::shared_ptr<const HadamardMatrix>;

/// Where one point's column block lives in the sensing matrix.
struct PointLayout {
  std::size_t first_col = 0;
  std::size_t width = 0;                  ///< r_x
  std::vector<std::size_t> rows;          ///< nonzero rows, ascending
  std::vector<std::size_t> had_rows;      ///< Hadamard row placed at rows[k]
};

/// The compact description of a Construction-1 matrix: per-point nonzero
/// rows, which Hadamard row sits in each, and the Hadamard matrices.
/// Everything the design-tailored recovery needs; no dense entries.
class SensingStructure {
 public:
  SensingStructure() = default;
  SensingStructure(std::size_t n, std::vector<PointLayout> points, std::vector<HadamardRef> hadamards);

  std::size_t n() const { return n_; }
  std::size_t N() const { return N_; }
  std::size_t v() const { return points_.size(); }
  const PointLayout& point(Point p) const { return points_.at(p); }
  const std::vector<PointLayout>& points() const { return points_; }
  const HadamardMatrix& hadamard(Point p) const { return *hadamards_.at(p); }
  const std::vector<HadamardRef>& hadamards() const { return hadamards_; }
  std::size_t replication(Point p) const { return points_.at(p).width; }
  std::size_t min_replication() const;
  /// Points whose column block is nonzero in row `row`, ascending.
  const std::vector<Point>& row_points(std::size_t row) const { return row_points_.at(row); }
  Point point_of_column(std::size_t col) const { return column_point_.at(col); }
  bool equireplicate() const;

  /// Phi x computed from the metadata alone.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  /// Entry of Phi from the metadata alone.
  std::complex<double> entry(std::size_t row, std::size_t col) const;

 private:
  std::size_t n_ = 0;
  std::size_t N_ = 0;
  std::vector<PointLayout> points_;
  std::vector<HadamardRef> hadamards_;
  std::vector<std::vector<Point>> row_points_;
  std::vector<Point> column_point_;
};

/// n x N complex sensing matrix plus its structure.
class SensingMatrix {
 public:
  explicit SensingMatrix(SensingStructure structure);

  std::size_t n() const { return structure_.n(); }
  std::size_t N() const { return structure_.N(); }
  const SensingStructure& structure() const { return structure_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }

 private:
  SensingStructure structure_;
  Eigen::MatrixXcd entries_;
};

/// Realified 2n x 2N matrix; complex column j maps to real columns 2j, 2j+1.
class RealSensingMatrix {
 public:
  RealSensingMatrix(Eigen::MatrixXd entries, std::shared_ptr<const SensingMatrix> source);

  std::size_t rows() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(entries_.cols()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  /// May be null when the matrix was read back from a file.
  const std::shared_ptr<const SensingMatrix>& source() const { return source_; }
  static std::size_t complex_column(std::size_t real_col) { return real_col / 2; }

 private:
  Eigen::MatrixXd entries_;
  std::shared_ptr<const SensingMatrix> source_;
};

/// One Hadamard matrix per point; hs[x]->order() must equal r_x.
SensingMatrix build(const Design& d, const std::vector<HadamardRef>& hs);

enum class HadamardFamily { fourier, real };

/// Shares one matrix of the family per distinct replication number.
std::vector<HadamardRef> hadamards_for(const Design& d, HadamardFamily family);

/// a + ib -> [[a, b], [-b, a]].
Eigen::MatrixXd realify(const Eigen::MatrixXcd& m);
RealSensingMatrix realify(std::shared_ptr<const SensingMatrix> m);

/// Vector map compatible with realify: z -> (Re z_0, -Im z_0, Re z_1, ...),
/// so that realify(Phi) * realify_vector(z) == realify_vector(Phi z).
Eigen::VectorXd realify_vector(const Eigen::VectorXcd& z);
Eigen::VectorXcd complexify_vector(const Eigen::VectorXd& x);

/// Max |<phi_a, phi_b>| over distinct columns.
double coherence(const SensingMatrix& m);

/// Largest deviation of the Gram matrix from the structure law: unit
/// diagonal, orthogonal columns within a point, magnitude 1/sqrt(r_i r_j)
/// for points sharing a row and 0 otherwise.
double gram_law_deviation(const SensingMatrix& m);

/// `csmatrix n=<n> N=<N>` followed by rows of interleaved re,im, then the
/// metadata section (Hadamard matrices and per-point layout).
void write_sensing_matrix(std::ostream& os, const SensingMatrix& m);
SensingMatrix read_sensing_matrix(std::istream& is);

/// `csmatrix-real rows=<r> cols=<c>` followed by plain CSV rows.
void write_real_matrix(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_real_matrix(std::istream& is);

}  // namespace pbdcs
