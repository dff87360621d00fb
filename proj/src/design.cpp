#include "pbdcs/design.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace pbdcs {

namespace {

unsigned smallest_factor(unsigned q) {
  for (unsigned f = 2; f * f <= q; ++f)
    if (q % f == 0) return f;
  return q;
}

unsigned inverse_mod(unsigned a, unsigned q) {
  // q prime: a^(q-2)
  unsigned long long result = 1, base = a % q;
  for (unsigned e = q - 2; e > 0; e >>= 1) {
    if (e & 1u) result = result * base % q;
    base = base * base % q;
  }
  return static_cast<unsigned>(result);
}

void require_prime(unsigned q) {
  if (q < 2) throw DesignError("projective plane order must be a prime, got " + std::to_string(q));
  unsigned f = smallest_factor(q);
  if (f != q)
    throw DesignError("projective plane order " + std::to_string(q) +
                      " is not prime (smallest factor " + std::to_string(f) + ")");
}

}  // namespace

PointSet::PointSet(std::vector<Point> indices) : indices_(std::move(indices)) {
  std::vector<Point> sorted = indices_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DesignError("point set contains a repeated index");
}

bool PointSet::contains(Point p) const {
  return std::find(indices_.begin(), indices_.end(), p) != indices_.end();
}

Design::Design(std::size_t v, std::vector<Block> blocks)
    : v_(v), blocks_(std::move(blocks)), replication_(v, 0), point_map_(v) {
  for (std::size_t i = 0; i < v; ++i) point_map_[i] = i;
  for (auto& b : blocks_) {
    std::sort(b.begin(), b.end());
    if (std::adjacent_find(b.begin(), b.end()) != b.end())
      throw DesignError("block contains a repeated point");
    for (Point p : b) {
      if (p >= v) throw DesignError("block point " + std::to_string(p) + " out of range v=" + std::to_string(v));
      ++replication_[p];
    }
  }
}

std::set<std::size_t> Design::block_sizes() const {
  std::set<std::size_t> k;
  for (const auto& b : blocks_) k.insert(b.size());
  return k;
}

std::size_t Design::total_replication() const {
  std::size_t n = 0;
  for (auto r : replication_) n += r;
  return n;
}

std::vector<std::size_t> Design::blocks_through(Point p) const {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    if (std::binary_search(blocks_[b].begin(), blocks_[b].end(), p)) out.push_back(b);
  return out;
}

std::optional<std::size_t> Design::block_containing(Point a, Point b) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& blk = blocks_[i];
    if (std::binary_search(blk.begin(), blk.end(), a) && std::binary_search(blk.begin(), blk.end(), b))
      return i;
  }
  return std::nullopt;
}

std::array<unsigned, 3> plane_coordinates(unsigned q, Point p) {
  if (p == 0) return {0, 0, 1};
  if (p <= q) return {0, 1, static_cast<unsigned>(p - 1)};
  std::size_t rest = p - 1 - q;
  return {1, static_cast<unsigned>(rest / q), static_cast<unsigned>(rest % q)};
}

Point plane_point_index(unsigned q, std::array<unsigned, 3> x) {
  for (auto& c : x) c %= q;
  std::size_t lead = 0;
  while (lead < 3 && x[lead] == 0) ++lead;
  if (lead == 3) throw DesignError("zero vector is not a projective point");
  unsigned inv = inverse_mod(x[lead], q);
  for (auto& c : x) c = static_cast<unsigned>(static_cast<unsigned long long>(c) * inv % q);
  if (lead == 2) return 0;
  if (lead == 1) return 1 + x[2];
  return 1 + q + static_cast<std::size_t>(x[1]) * q + x[2];
}

Design projective_plane(unsigned q) {
  require_prime(q);
  const std::size_t v = static_cast<std::size_t>(q) * q + q + 1;
  std::vector<Block> blocks(v);
  for (std::size_t l = 0; l < v; ++l) {
    auto normal = plane_coordinates(q, l);
    for (std::size_t p = 0; p < v; ++p) {
      auto x = plane_coordinates(q, p);
      unsigned long long dot = 0;
      for (int k = 0; k < 3; ++k) dot += static_cast<unsigned long long>(normal[k]) * x[k];
      if (dot % q == 0) blocks[l].push_back(p);
    }
  }
  return Design(v, std::move(blocks));
}

Design steiner_triple_system(std::size_t v) {
  if (v < 3 || (v % 6 != 1 && v % 6 != 3))
    throw DesignError("no Steiner triple system on " + std::to_string(v) +
                      " points (need v = 1 or 3 mod 6, v >= 3)");
  std::vector<Block> blocks;
  if (v % 6 == 3) {
    // Bose: idempotent commutative quasigroup x.y = (n+1)(x+y) mod 2n+1 on
    // Z_{2n+1}; points (x, i) -> x + (2n+1) i.
    const std::size_t order = v / 3;
    const std::size_t half = (order + 1) / 2;
    auto pt = [order](std::size_t x, std::size_t i) { return x + order * (i % 3); };
    for (std::size_t x = 0; x < order; ++x) blocks.push_back({pt(x, 0), pt(x, 1), pt(x, 2)});
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t x = 0; x < order; ++x)
        for (std::size_t y = x + 1; y < order; ++y)
          blocks.push_back({pt(x, i), pt(y, i), pt(half * (x + y) % order, i + 1)});
  } else {
    // Skolem: half-idempotent commutative quasigroup on Z_{2n} obtained by
    // relabelling addition with 2k -> k, 2k+1 -> n+k; point infinity is v-1.
    const std::size_t n = (v - 1) / 6;
    const std::size_t order = 2 * n;
    const std::size_t inf = v - 1;
    auto pt = [order](std::size_t x, std::size_t i) { return x + order * (i % 3); };
    auto op = [n, order](std::size_t x, std::size_t y) {
      std::size_t s = (x + y) % order;
      return s % 2 == 0 ? s / 2 : n + s / 2;
    };
    for (std::size_t x = 0; x < n; ++x) blocks.push_back({pt(x, 0), pt(x, 1), pt(x, 2)});
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t x = 0; x < n; ++x) blocks.push_back({inf, pt(x + n, i), pt(x, i + 1)});
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t x = 0; x < order; ++x)
        for (std::size_t y = x + 1; y < order; ++y)
          blocks.push_back({pt(x, i), pt(y, i), pt(op(x, y), i + 1)});
  }
  return Design(v, std::move(blocks));
}

PointSet find_conic_oval(const Design& plane, unsigned q) {
  require_prime(q);
  if (q == 2) throw DesignError("conic ovals require odd q (q=2 has hyperovals, not conics)");
  const std::size_t v = static_cast<std::size_t>(q) * q + q + 1;
  if (plane.v() != v || plane.block_count() != v)
    throw DesignError("design is not projective_plane(" + std::to_string(q) + ")");
  std::vector<Point> pts;
  for (unsigned t = 0; t < q; ++t) pts.push_back(plane_point_index(q, {t * t % q, t, 1}));
  pts.push_back(plane_point_index(q, {1, 0, 0}));
  return PointSet(std::move(pts));
}

bool is_arc(const Design& d, const PointSet& s) {
  for (const auto& b : d.blocks()) {
    std::size_t hits = 0;
    for (Point p : s.indices())
      if (std::binary_search(b.begin(), b.end(), p)) ++hits;
    if (hits > 2) return false;
  }
  return true;
}

Design remove_points(const Design& d, const PointSet& s) {
  for (Point p : s.indices())
    if (p >= d.v()) throw DesignError("point " + std::to_string(p) + " is not in the design");
  std::vector<std::size_t> map(d.v(), Design::removed);
  std::size_t next = 0;
  for (Point p = 0; p < d.v(); ++p)
    if (!s.contains(p)) map[p] = next++;

  std::vector<Block> blocks;
  std::size_t discarded = 0;
  for (const auto& b : d.blocks()) {
    Block nb;
    for (Point p : b)
      if (map[p] != Design::removed) nb.push_back(map[p]);
    if (nb.size() < 2) {
      ++discarded;
      continue;
    }
    blocks.push_back(std::move(nb));
  }
  Design out(next, std::move(blocks));
  out.point_map_ = std::move(map);
  out.discarded_blocks_ = discarded;
  return out;
}

Design remove_blocks_with_points(const Design& d, const std::vector<std::size_t>& block_ids) {
  std::vector<bool> drop_block(d.block_count(), false);
  std::vector<Point> doomed;
  for (auto b : block_ids) {
    if (b >= d.block_count()) throw DesignError("block " + std::to_string(b) + " is not in the design");
    drop_block[b] = true;
    for (Point p : d.block(b)) doomed.push_back(p);
  }
  std::sort(doomed.begin(), doomed.end());
  doomed.erase(std::unique(doomed.begin(), doomed.end()), doomed.end());

  std::vector<std::size_t> map(d.v(), Design::removed);
  std::size_t next = 0;
  for (Point p = 0; p < d.v(); ++p)
    if (!std::binary_search(doomed.begin(), doomed.end(), p)) map[p] = next++;

  std::vector<Block> blocks;
  std::size_t discarded = 0;
  for (std::size_t bi = 0; bi < d.block_count(); ++bi) {
    if (drop_block[bi]) continue;
    Block nb;
    for (Point p : d.block(bi))
      if (map[p] != Design::removed) nb.push_back(map[p]);
    if (nb.size() < 2) {
      ++discarded;
      continue;
    }
    blocks.push_back(std::move(nb));
  }
  Design out(next, std::move(blocks));
  out.point_map_ = std::move(map);
  out.discarded_blocks_ = discarded;
  return out;
}

ValidationReport validate_pbd(const Design& d) {
  ValidationReport rep;
  rep.v = d.v();
  rep.n = d.block_count();
  const std::size_t v = d.v();
  std::vector<std::size_t> cover(v * v, 0);
  for (const auto& b : d.blocks()) {
    rep.block_size_sum += b.size();
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i + 1; j < b.size(); ++j) ++cover[b[i] * v + b[j]];
  }
  for (auto r : d.replication()) rep.replication_sum += r;
  for (Point a = 0; a < v; ++a)
    for (Point b = a + 1; b < v; ++b)
      if (cover[a * v + b] != 1) rep.pair_violations.push_back({a, b, cover[a * v + b]});
  if (!rep.counts_agree()) rep.notes.push_back("sum of replication numbers differs from sum of block sizes");
  if (rep.n < rep.v) rep.notes.push_back("fewer blocks than points");
  if (d.discarded_blocks() > 0)
    rep.notes.push_back(std::to_string(d.discarded_blocks()) + " block(s) of size < 2 discarded on removal");
  return rep;
}

void write_design(std::ostream& os, const Design& d) {
  os << "pbd v=" << d.v() << " lambda=1\n";
  for (const auto& b : d.blocks()) {
    for (std::size_t i = 0; i < b.size(); ++i) os << (i ? " " : "") << b[i];
    os << '\n';
  }
}

Design read_design(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DesignError("empty design stream");
  std::size_t v = 0;
  {
    std::istringstream hs(line);
    std::string tag, vfield, lfield;
    hs >> tag >> vfield >> lfield;
    if (tag != "pbd" || vfield.rfind("v=", 0) != 0 || lfield != "lambda=1")
      throw DesignError("bad design header: '" + line + "'");
    v = std::stoul(vfield.substr(2));
  }
  std::vector<Block> blocks;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Block b;
    Point p;
    while (ls >> p) b.push_back(p);
    if (!ls.eof()) throw DesignError("bad block line: '" + line + "'");
    blocks.push_back(std::move(b));
  }
  return Design(v, std::move(blocks));
}

}  // namespace pbdcs
