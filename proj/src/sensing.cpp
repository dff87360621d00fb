#include "pbdcs/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "csv_util.hpp"

namespace pbdcs {

namespace {

std::string join(const std::vector<std::size_t>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(xs[i]);
  }
  return s;
}

std::vector<std::size_t> split_indices(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& cell : detail::split_csv(s)) out.push_back(std::stoul(cell));
  return out;
}

}  // namespace

SensingStructure::SensingStructure(std::size_t n, std::vector<PointLayout> points, std::vector<HadamardRef> hadamards)
    : n_(n), points_(std::move(points)), hadamards_(std::move(hadamards)), row_points_(n) {
  if (hadamards_.size() != points_.size())
    throw ConstructionError("need exactly one Hadamard matrix per point");
  std::size_t next_col = 0;
  for (Point p = 0; p < points_.size(); ++p) {
    const auto& pl = points_[p];
    const auto tag = "point " + std::to_string(p) + ": ";
    if (!hadamards_[p]) throw ConstructionError(tag + "missing Hadamard matrix");
    if (hadamards_[p]->order() != pl.width)
      throw ConstructionError(tag + "Hadamard order " + std::to_string(hadamards_[p]->order()) +
                              " does not match replication number " + std::to_string(pl.width));
    if (pl.first_col != next_col) throw ConstructionError(tag + "column blocks must be contiguous");
    if (pl.rows.size() != pl.width || pl.had_rows.size() != pl.width)
      throw ConstructionError(tag + "row lists must have length r_x");
    std::vector<bool> seen(pl.width, false);
    for (auto h : pl.had_rows) {
      if (h >= pl.width || seen[h]) throw ConstructionError(tag + "Hadamard rows must be a permutation");
      seen[h] = true;
    }
    for (std::size_t k = 0; k < pl.rows.size(); ++k) {
      if (pl.rows[k] >= n) throw ConstructionError(tag + "row index out of range");
      if (k && pl.rows[k] <= pl.rows[k - 1]) throw ConstructionError(tag + "rows must be strictly ascending");
      row_points_[pl.rows[k]].push_back(p);
    }
    next_col += pl.width;
    column_point_.insert(column_point_.end(), pl.width, p);
  }
  N_ = next_col;
}

std::size_t SensingStructure::min_replication() const {
  std::size_t r = 0;
  for (const auto& pl : points_)
    if (r == 0 || pl.width < r) r = pl.width;
  return r;
}

bool SensingStructure::equireplicate() const {
  return std::all_of(points_.begin(), points_.end(),
                     [&](const PointLayout& pl) { return pl.width == points_.front().width; });
}

Eigen::VectorXcd SensingStructure::apply(const Eigen::VectorXcd& x) const {
  if (static_cast<std::size_t>(x.size()) != N_) throw ConstructionError("apply: vector length mismatch");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_));
  for (Point p = 0; p < points_.size(); ++p) {
    const auto& pl = points_[p];
    auto xp = x.segment(static_cast<Eigen::Index>(pl.first_col), static_cast<Eigen::Index>(pl.width));
    if (xp.isZero(0.0)) continue;
    const auto& h = hadamards_[p]->entries();
    const double scale = 1.0 / std::sqrt(static_cast<double>(pl.width));
    for (std::size_t k = 0; k < pl.width; ++k)
      y(static_cast<Eigen::Index>(pl.rows[k])) += scale * (h.row(static_cast<Eigen::Index>(pl.had_rows[k])) * xp).value();
  }
  return y;
}

std::complex<double> SensingStructure::entry(std::size_t row, std::size_t col) const {
  const Point p = column_point_.at(col);
  const auto& pl = points_[p];
  auto it = std::lower_bound(pl.rows.begin(), pl.rows.end(), row);
  if (it == pl.rows.end() || *it != row) return 0.0;
  const auto k = static_cast<std::size_t>(it - pl.rows.begin());
  return (*hadamards_[p])(pl.had_rows[k], col - pl.first_col) / std::sqrt(static_cast<double>(pl.width));
}

SensingMatrix::SensingMatrix(SensingStructure structure)
    : structure_(std::move(structure)),
      entries_(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(structure_.n()),
                                      static_cast<Eigen::Index>(structure_.N()))) {
  for (Point p = 0; p < structure_.v(); ++p) {
    const auto& pl = structure_.point(p);
    const auto& h = structure_.hadamard(p).entries();
    const double scale = 1.0 / std::sqrt(static_cast<double>(pl.width));
    for (std::size_t k = 0; k < pl.width; ++k)
      entries_.row(static_cast<Eigen::Index>(pl.rows[k]))
          .segment(static_cast<Eigen::Index>(pl.first_col), static_cast<Eigen::Index>(pl.width)) =
          scale * h.row(static_cast<Eigen::Index>(pl.had_rows[k]));
  }
}

RealSensingMatrix::RealSensingMatrix(Eigen::MatrixXd entries, std::shared_ptr<const SensingMatrix> source)
    : entries_(std::move(entries)), source_(std::move(source)) {}

SensingMatrix build(const Design& d, const std::vector<HadamardRef>& hs) {
  if (hs.size() != d.v())
    throw ConstructionError("got " + std::to_string(hs.size()) + " Hadamard matrices for " + std::to_string(d.v()) +
                            " points");
  std::vector<PointLayout> points(d.v());
  std::size_t col = 0;
  for (Point p = 0; p < d.v(); ++p) {
    auto& pl = points[p];
    pl.first_col = col;
    pl.width = d.replication(p);
    if (!hs[p] || hs[p]->order() != pl.width)
      throw ConstructionError("point " + std::to_string(p) + " has replication number " + std::to_string(pl.width) +
                              " but its Hadamard matrix has order " +
                              (hs[p] ? std::to_string(hs[p]->order()) : std::string("<none>")));
    col += pl.width;
  }
  // Row k of H_x goes to the k-th block through x.
  for (std::size_t b = 0; b < d.block_count(); ++b)
    for (Point p : d.block(b)) {
      auto& pl = points[p];
      pl.had_rows.push_back(pl.rows.size());
      pl.rows.push_back(b);
    }
  return SensingMatrix(SensingStructure(d.block_count(), std::move(points), hs));
}

std::vector<HadamardRef> hadamards_for(const Design& d, HadamardFamily family) {
  std::map<std::size_t, HadamardRef> by_order;
  std::vector<HadamardRef> out;
  for (Point p = 0; p < d.v(); ++p) {
    const auto r = d.replication(p);
    auto& slot = by_order[r];
    if (!slot)
      slot = std::make_shared<const HadamardMatrix>(family == HadamardFamily::fourier ? fourier(r) : real_hadamard(r));
    out.push_back(slot);
  }
  return out;
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXd out(2 * m.rows(), 2 * m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double a = m(i, j).real(), b = m(i, j).imag();
      out(2 * i, 2 * j) = a;
      out(2 * i, 2 * j + 1) = b;
      out(2 * i + 1, 2 * j) = -b;
      out(2 * i + 1, 2 * j + 1) = a;
    }
  return out;
}

RealSensingMatrix realify(std::shared_ptr<const SensingMatrix> m) {
  auto entries = realify(m->entries());
  return RealSensingMatrix(std::move(entries), std::move(m));
}

Eigen::VectorXd realify_vector(const Eigen::VectorXcd& z) {
  Eigen::VectorXd x(2 * z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    x(2 * i) = z(i).real();
    x(2 * i + 1) = -z(i).imag();
  }
  return x;
}

Eigen::VectorXcd complexify_vector(const Eigen::VectorXd& x) {
  if (x.size() % 2 != 0) throw ConstructionError("complexify_vector: odd length");
  Eigen::VectorXcd z(x.size() / 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = {x(2 * i), -x(2 * i + 1)};
  return z;
}

double coherence(const SensingMatrix& m) {
  Eigen::MatrixXd g = (m.entries().adjoint() * m.entries()).cwiseAbs();
  g.diagonal().setZero();
  return g.size() == 0 ? 0.0 : g.maxCoeff();
}

double gram_law_deviation(const SensingMatrix& m) {
  const auto& s = m.structure();
  const Eigen::MatrixXcd g = m.entries().adjoint() * m.entries();
  // Shared-row indicator between points.
  const std::size_t v = s.v();
  std::vector<char> share(v * v, 0);
  for (std::size_t row = 0; row < s.n(); ++row) {
    const auto& pts = s.row_points(row);
    for (auto a : pts)
      for (auto b : pts) share[a * v + b] = 1;
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < s.N(); ++a) {
    const Point pa = s.point_of_column(a);
    for (std::size_t b = 0; b < s.N(); ++b) {
      const Point pb = s.point_of_column(b);
      const double mag = std::abs(g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      double expected = 0.0;
      if (a == b)
        expected = 1.0;
      else if (pa != pb && share[pa * v + pb])
        expected = 1.0 / std::sqrt(static_cast<double>(s.replication(pa) * s.replication(pb)));
      worst = std::max(worst, std::abs(mag - expected));
    }
  }
  return worst;
}

void write_sensing_matrix(std::ostream& os, const SensingMatrix& m) {
  const auto& s = m.structure();
  os << "csmatrix n=" << m.n() << " N=" << m.N() << '\n';
  detail::write_complex_rows(os, m.entries());
  std::vector<const HadamardMatrix*> unique;
  std::vector<std::size_t> index_of(s.v());
  for (Point p = 0; p < s.v(); ++p) {
    const HadamardMatrix* h = s.hadamards()[p].get();
    auto it = std::find(unique.begin(), unique.end(), h);
    index_of[p] = static_cast<std::size_t>(it - unique.begin());
    if (it == unique.end()) unique.push_back(h);
  }
  os << "metadata v=" << s.v() << " hadamards=" << unique.size() << '\n';
  for (const auto* h : unique) write_hadamard(os, *h);
  for (Point p = 0; p < s.v(); ++p) {
    const auto& pl = s.point(p);
    os << "point " << p << " h=" << index_of[p] << " cols=" << pl.first_col << ':' << pl.width
       << " rows=" << join(pl.rows) << " hadrows=" << join(pl.had_rows) << '\n';
  }
}

SensingMatrix read_sensing_matrix(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConstructionError("empty matrix stream");
  auto head = detail::parse_header(line, "csmatrix");
  const auto n = std::stoul(detail::field(head, "n"));
  const auto N = std::stoul(detail::field(head, "N"));
  Eigen::MatrixXcd dense = detail::read_complex_rows(is, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(N));
  if (!std::getline(is, line)) throw ConstructionError("matrix file has no metadata section");
  auto meta = detail::parse_header(line, "metadata");
  const auto v = std::stoul(detail::field(meta, "v"));
  const auto nh = std::stoul(detail::field(meta, "hadamards"));
  std::vector<HadamardRef> unique;
  for (std::size_t i = 0; i < nh; ++i) unique.push_back(std::make_shared<const HadamardMatrix>(read_hadamard(is)));
  std::vector<PointLayout> points(v);
  std::vector<HadamardRef> hs(v);
  for (std::size_t i = 0; i < v; ++i) {
    if (!std::getline(is, line)) throw ConstructionError("metadata ended early");
    std::istringstream ls(line);
    std::string tag;
    std::size_t p = 0;
    ls >> tag >> p;
    if (tag != "point" || p != i) throw ConstructionError("bad point line: '" + line + "'");
    std::string rest;
    std::getline(ls, rest);
    auto f = detail::parse_header("point" + rest, "point");
    const auto h = std::stoul(detail::field(f, "h"));
    if (h >= unique.size()) throw ConstructionError("point " + std::to_string(i) + " names a missing Hadamard matrix");
    hs[i] = unique[h];
    const auto& cols = detail::field(f, "cols");
    const auto colon = cols.find(':');
    points[i].first_col = std::stoul(cols.substr(0, colon));
    points[i].width = std::stoul(cols.substr(colon + 1));
    points[i].rows = split_indices(detail::field(f, "rows"));
    points[i].had_rows = split_indices(detail::field(f, "hadrows"));
  }
  SensingMatrix m(SensingStructure(n, std::move(points), std::move(hs)));
  if (m.N() != N) throw ConstructionError("metadata column count disagrees with header");
  if ((m.entries() - dense).cwiseAbs().maxCoeff() > 1e-12)
    throw ConstructionError("matrix entries disagree with metadata");
  return m;
}

void write_real_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  os << "csmatrix-real rows=" << m.rows() << " cols=" << m.cols() << '\n';
  detail::write_real_rows(os, m);
}

Eigen::MatrixXd read_real_matrix(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConstructionError("empty matrix stream");
  auto head = detail::parse_header(line, "csmatrix-real");
  return detail::read_real_rows(is, static_cast<Eigen::Index>(std::stoul(detail::field(head, "rows"))),
                                static_cast<Eigen::Index>(std::stoul(detail::field(head, "cols"))));
}

}  // namespace pbdcs
