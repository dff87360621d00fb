#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "csv_util.hpp"
#include "pbdcs/recovery.hpp"

namespace pbdcs {

using detail::format_double;
using detail::parse_double;

std::string_view to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::converged: return "converged";
    case RecoveryStatus::maxIterations: return "maxIterations";
    case RecoveryStatus::singularSystem: return "singularSystem";
    case RecoveryStatus::infeasible: return "infeasible";
  }
  return "?";
}

template <typename Vector>
void write_recovery_summary(std::ostream& os, const RecoveryResult<Vector>& r, std::string_view algorithm) {
  os << "algorithm=" << algorithm << '\n'
     << "status=" << to_string(r.status) << '\n'
     << "iterations=" << r.iterations << '\n'
     << "residualNorm=" << format_double(r.residualNorm) << '\n'
     << "elapsed=" << format_double(r.elapsed) << '\n'
     << "length=" << r.estimate.size() << '\n';
  if (algorithm == "omp") os << "normalized=" << r.normalized << '\n';
  if (algorithm == "bp") {
    os << "dualityGap=" << format_double(r.dualityGap) << '\n';
    if (r.status == RecoveryStatus::infeasible) os << "certificateNorm=" << format_double(r.certificateNorm) << '\n';
  }
}

template void write_recovery_summary(std::ostream&, const RealRecovery&, std::string_view);
template void write_recovery_summary(std::ostream&, const ComplexRecovery&, std::string_view);

void write_vector(std::ostream& os, const Eigen::VectorXd& x) {
  os << "vector length=" << x.size() << " field=real\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << format_double(x(i)) << '\n';
}

void write_vector(std::ostream& os, const Eigen::VectorXcd& x) {
  os << "vector length=" << x.size() << " field=complex\n";
  for (Eigen::Index i = 0; i < x.size(); ++i)
    os << format_double(x(i).real()) << ',' << format_double(x(i).imag()) << '\n';
}

Eigen::VectorXcd read_complex_vector(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty vector file");
  const auto h = detail::parse_header(line, "vector");
  const long long n = std::stoll(detail::field(h, "length"));
  const std::string& fieldName = detail::field(h, "field");
  if (n < 0) throw std::runtime_error("negative vector length");
  if (fieldName != "real" && fieldName != "complex") throw std::runtime_error("unknown field '" + fieldName + "'");
  const bool cplx = fieldName == "complex";
  Eigen::VectorXcd x(n);
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("vector data ended early");
    auto cells = detail::split_csv(line);
    if (cells.size() != (cplx ? 2u : 1u)) throw std::runtime_error("bad vector entry on line " + std::to_string(i + 2));
    x(i) = {parse_double(cells[0]), cplx ? parse_double(cells[1]) : 0.0};
  }
  return x;
}

Eigen::VectorXd read_real_vector(std::istream& is) {
  const Eigen::VectorXcd z = read_complex_vector(is);
  if (z.size() && z.imag().cwiseAbs().maxCoeff() != 0.0)
    throw std::runtime_error("expected a real vector");
  return z.real();
}

}  // namespace pbdcs
