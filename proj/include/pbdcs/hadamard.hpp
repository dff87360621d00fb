#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pbdcs {

enum class HadamardKind { fourier, sylvester, paley, custom };

std::string_view to_string(HadamardKind kind);
HadamardKind parse_hadamard_kind(std::string_view s);

class HadamardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an exhaustive search would exceed its evaluation budget.
class SearchBudgetExceeded : public std::runtime_error {
 public:
  SearchBudgetExceeded(std::uint64_t needed, std::uint64_t budget);
  std::uint64_t needed() const { return needed_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t needed_;
  std::uint64_t budget_;
};

/// Square matrix with unimodular entries and H H^* = r I.
class HadamardMatrix {
 public:
  static constexpr double entry_tolerance = 1e-12;
  static constexpr double orthogonality_tolerance = 1e-9;

  /// Validates both invariants; throws HadamardError otherwise.
  HadamardMatrix(Eigen::MatrixXcd entries, HadamardKind kind);

  std::size_t order() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  std::complex<double> operator()(std::size_t row, std::size_t col) const {
    return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }
  HadamardKind kind() const { return kind_; }
  /// All entries have zero imaginary part.
  bool is_real() const;

  /// max |H H^* - r I| entrywise.
  double orthogonality_error() const;

  bool operator==(const HadamardMatrix& o) const { return kind_ == o.kind_ && entries_ == o.entries_; }

 private:
  Eigen::MatrixXcd entries_;
  HadamardKind kind_;
};

/// entry (j, k) = exp(2 pi i jk / r).
HadamardMatrix fourier(std::size_t r);

/// +-1 Hadamard matrix: Sylvester doubling for powers of two, Paley for
/// q + 1 with q prime and q = 3 (mod 4), and doublings of Paley matrices.
HadamardMatrix real_hadamard(std::size_t r);

/// Smallest support of a nonzero linear combination of at most `u` columns.
/// Exhaustive rank search; order must be at most 12.
std::size_t min_support_combination(const HadamardMatrix& h, std::size_t u,
                                    std::uint64_t budget = 50'000'000);

/// True iff no nontrivial combination of k <= kmax rows vanishes on k or
/// more coordinates (every k x k minor on k rows is nonsingular).
bool is_optimal(const HadamardMatrix& h, std::size_t kmax, std::uint64_t budget = 50'000'000);

/// Header `hadamard r=<r> kind=<kind>`, then rows of interleaved re,im.
void write_hadamard(std::ostream& os, const HadamardMatrix& h);
HadamardMatrix read_hadamard(std::istream& is);

}  // namespace pbdcs
