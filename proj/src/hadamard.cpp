#include "pbdcs/hadamard.hpp"

#include <cmath>
#include <functional>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "csv_util.hpp"

namespace pbdcs {

namespace {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

bool is_prime(std::size_t q) {
  if (q < 2) return false;
  for (std::size_t f = 2; f * f <= q; ++f)
    if (q % f == 0) return false;
  return true;
}

int legendre(long long a, long long q) {
  a %= q;
  if (a < 0) a += q;
  if (a == 0) return 0;
  long long result = 1, base = a;
  for (long long e = (q - 1) / 2; e > 0; e >>= 1) {
    if (e & 1) result = result * base % q;
    base = base * base % q;
  }
  return result == 1 ? 1 : -1;
}

IntMatrix paley(std::size_t q) {
  const auto n = static_cast<Eigen::Index>(q + 1);
  IntMatrix h = IntMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) h(0, j) = 1;
  for (Eigen::Index i = 1; i < n; ++i) {
    h(i, 0) = -1;
    for (Eigen::Index j = 1; j < n; ++j)
      h(i, j) = legendre(static_cast<long long>(j) - static_cast<long long>(i), static_cast<long long>(q));
    h(i, i) += 1;
  }
  return h;
}

IntMatrix double_up(const IntMatrix& h) {
  const auto n = h.rows();
  IntMatrix d(2 * n, 2 * n);
  d << h, h, h, -h;
  return d;
}

// Returns false when no supported construction exists for r.
bool real_construction(std::size_t r, IntMatrix& out, bool& used_paley) {
  if (r == 1) {
    out = IntMatrix::Ones(1, 1);
    return true;
  }
  if (r == 2) {
    out.resize(2, 2);
    out << 1, 1, 1, -1;
    return true;
  }
  if (r % 4 != 0) return false;
  if ((r & (r - 1)) == 0) {
    IntMatrix half;
    real_construction(r / 2, half, used_paley);
    out = double_up(half);
    return true;
  }
  if (is_prime(r - 1) && (r - 1) % 4 == 3) {
    out = paley(r - 1);
    used_paley = true;
    return true;
  }
  IntMatrix half;
  if (!real_construction(r / 2, half, used_paley)) return false;
  out = double_up(half);
  return true;
}

// True when the matrix has rank below `needed`.
bool rank_below(const Eigen::MatrixXcd& m, Eigen::Index needed) {
  if (std::min(m.rows(), m.cols()) < needed) return true;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(needed - 1) < 1e-8;
}

// Visits every k-subset of {0..n-1} in lexicographic order.
void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<Eigen::Index>&)>& f) {
  std::vector<Eigen::Index> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<Eigen::Index>(i);
  if (k > n) return;
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && static_cast<std::size_t>(idx[i - 1]) == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

class Budget {
 public:
  explicit Budget(std::uint64_t limit) : limit_(limit) {}
  void spend(std::uint64_t projected_total) {
    if (++used_ > limit_) throw SearchBudgetExceeded(projected_total, limit_);
  }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::string_view to_string(HadamardKind kind) {
  switch (kind) {
    case HadamardKind::fourier: return "fourier";
    case HadamardKind::sylvester: return "sylvester";
    case HadamardKind::paley: return "paley";
    case HadamardKind::custom: return "custom";
  }
  return "custom";
}

HadamardKind parse_hadamard_kind(std::string_view s) {
  if (s == "fourier") return HadamardKind::fourier;
  if (s == "sylvester") return HadamardKind::sylvester;
  if (s == "paley") return HadamardKind::paley;
  if (s == "custom") return HadamardKind::custom;
  throw HadamardError("unknown Hadamard kind '" + std::string(s) + "'");
}

SearchBudgetExceeded::SearchBudgetExceeded(std::uint64_t needed, std::uint64_t budget)
    : std::runtime_error("search budget exceeded: up to " + std::to_string(needed) +
                         " rank evaluations needed, budget " + std::to_string(budget)),
      needed_(needed),
      budget_(budget) {}

HadamardMatrix::HadamardMatrix(Eigen::MatrixXcd entries, HadamardKind kind)
    : entries_(std::move(entries)), kind_(kind) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
    throw HadamardError("Hadamard matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < entries_.size(); ++i)
    if (std::abs(std::abs(entries_(i)) - 1.0) > entry_tolerance)
      throw HadamardError("Hadamard entry is not unimodular");
  if (orthogonality_error() > orthogonality_tolerance)
    throw HadamardError("rows are not orthogonal: H H^* != r I");
}

bool HadamardMatrix::is_real() const { return entries_.imag().cwiseAbs().maxCoeff() == 0.0; }

double HadamardMatrix::orthogonality_error() const {
  const auto r = entries_.rows();
  Eigen::MatrixXcd g = entries_ * entries_.adjoint();
  g.diagonal().array() -= static_cast<double>(r);
  return g.cwiseAbs().maxCoeff();
}

HadamardMatrix fourier(std::size_t r) {
  if (r == 0) throw HadamardError("Fourier matrix order must be at least 1");
  const auto n = static_cast<Eigen::Index>(r);
  Eigen::MatrixXcd f(n, n);
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t k = 0; k < r; ++k) {
      const std::size_t e = (j * k) % r;
      std::complex<double> z;
      if ((4 * e) % r == 0) {
        static constexpr std::complex<double> quarter[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        z = quarter[4 * e / r];
      } else {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(r);
        z = {std::cos(angle), std::sin(angle)};
      }
      f(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = z;
    }
  }
  return HadamardMatrix(std::move(f), HadamardKind::fourier);
}

HadamardMatrix real_hadamard(std::size_t r) {
  IntMatrix h;
  bool used_paley = false;
  if (r == 0 || !real_construction(r, h, used_paley)) {
    if (r != 0 && r > 2 && r % 4 != 0)
      throw HadamardError("no real Hadamard matrix of order " + std::to_string(r) +
                          " exists (orders other than 1, 2 must be divisible by 4)");
    throw HadamardError("real Hadamard order " + std::to_string(r) +
                        " is not covered (supported: 1, 2, 2^a * (q+1) with q prime, q = 3 mod 4)");
  }
  IntMatrix g = h * h.transpose();
  if (g != static_cast<long long>(r) * IntMatrix::Identity(h.rows(), h.cols()))
    throw HadamardError("internal: real Hadamard construction failed orthogonality");
  return HadamardMatrix(h.cast<double>().cast<std::complex<double>>(),
                        used_paley ? HadamardKind::paley : HadamardKind::sylvester);
}

std::size_t min_support_combination(const HadamardMatrix& h, std::size_t u, std::uint64_t budget) {
  const std::size_t r = h.order();
  if (u < 1 || u > r) throw HadamardError("combination size u must satisfy 1 <= u <= order");
  if (r > 12) throw HadamardError("min_support_combination is limited to order <= 12");
  const auto ui = static_cast<Eigen::Index>(u);
  const std::uint64_t projected = binomial(r, u) << r;
  Budget spent(budget);

  // Zero sets are closed under subsets, so a depth-first extension of
  // rank-deficient row sets finds the largest one.
  std::size_t max_zeros = 0;
  for_each_subset(r, u, [&](const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXcd hc = h.entries()(Eigen::all, cols);
    std::vector<Eigen::Index> zrows;
    std::function<void(Eigen::Index)> extend = [&](Eigen::Index start) {
      max_zeros = std::max(max_zeros, zrows.size());
      for (Eigen::Index i = start; i < static_cast<Eigen::Index>(r); ++i) {
        zrows.push_back(i);
        bool feasible = true;
        if (static_cast<Eigen::Index>(zrows.size()) >= ui) {
          spent.spend(projected);
          feasible = rank_below(hc(zrows, Eigen::all), ui);
        }
        if (feasible) extend(i + 1);
        zrows.pop_back();
      }
    };
    extend(0);
  });
  return r - max_zeros;
}

bool is_optimal(const HadamardMatrix& h, std::size_t kmax, std::uint64_t budget) {
  const std::size_t r = h.order();
  if (kmax > r) throw HadamardError("kmax exceeds the matrix order");
  if (r > 12) throw HadamardError("is_optimal is limited to order <= 12");
  std::uint64_t projected = 0;
  for (std::size_t k = 1; k <= kmax; ++k) projected += binomial(r, k) * binomial(r, k);
  Budget spent(budget);
  for (std::size_t k = 1; k <= kmax; ++k) {
    bool ok = true;
    const auto ki = static_cast<Eigen::Index>(k);
    for_each_subset(r, k, [&](const std::vector<Eigen::Index>& rows) {
      if (!ok) return;
      Eigen::MatrixXcd hr = h.entries()(rows, Eigen::all);
      for_each_subset(r, k, [&](const std::vector<Eigen::Index>& cols) {
        if (!ok) return;
        spent.spend(projected);
        if (rank_below(hr(Eigen::all, cols), ki)) ok = false;
      });
    });
    if (!ok) return false;
  }
  return true;
}

void write_hadamard(std::ostream& os, const HadamardMatrix& h) {
  os << "hadamard r=" << h.order() << " kind=" << to_string(h.kind()) << '\n';
  detail::write_complex_rows(os, h.entries());
}

HadamardMatrix read_hadamard(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw HadamardError("empty Hadamard stream");
  auto fields = detail::parse_header(line, "hadamard");
  const auto r = static_cast<Eigen::Index>(std::stoul(detail::field(fields, "r")));
  const auto kind = parse_hadamard_kind(detail::field(fields, "kind"));
  return HadamardMatrix(detail::read_complex_rows(is, r, r), kind);
}

}  // namespace pbdcs
