#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pbdcs::detail {

// Shortest representation that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

inline double parse_double(const std::string& s) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || end != s.data() + s.size())
    throw std::runtime_error("bad number '" + s + "'");
  return x;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) out.push_back(cell);
  return out;
}

using HeaderFields = std::map<std::string, std::string>;

// Parses `<tag> key=value key=value ...`.
inline HeaderFields parse_header(const std::string& line, const std::string& tag) {
  std::istringstream hs(line);
  std::string t;
  hs >> t;
  if (t != tag) throw std::runtime_error("expected '" + tag + "' header, got '" + line + "'");
  HeaderFields fields;
  std::string kv;
  while (hs >> kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad header field '" + kv + "'");
    fields[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return fields;
}

inline const std::string& field(const HeaderFields& f, const std::string& key) {
  auto it = f.find(key);
  if (it == f.end()) throw std::runtime_error("header is missing '" + key + "'");
  return it->second;
}

inline void write_complex_rows(std::ostream& os, const Eigen::MatrixXcd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
    }
    os << '\n';
  }
}

inline Eigen::MatrixXcd read_complex_rows(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXcd m(rows, cols);
  std::string line;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("matrix data ended early");
    auto cells = split_csv(line);
    if (static_cast<Eigen::Index>(cells.size()) != 2 * cols)
      throw std::runtime_error("matrix row " + std::to_string(i) + " has the wrong number of entries");
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = {parse_double(cells[2 * j]), parse_double(cells[2 * j + 1])};
  }
  return m;
}

inline void write_real_rows(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

inline Eigen::MatrixXd read_real_rows(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  std::string line;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("matrix data ended early");
    auto cells = split_csv(line);
    if (static_cast<Eigen::Index>(cells.size()) != cols)
      throw std::runtime_error("matrix row " + std::to_string(i) + " has the wrong number of entries");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = parse_double(cells[j]);
  }
  return m;
}

}  // namespace pbdcs::detail
