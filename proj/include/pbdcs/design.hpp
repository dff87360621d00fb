#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pbdcs {

using Point = std::size_t;
using Block = std::vector<Point>;

class DesignError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered set of distinct point indices of a design (ovals, arcs).
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<Point> indices);

  const std::vector<Point>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(Point p) const;

 private:
  std::vector<Point> indices_;
};

/// Point/block incidence structure of a PBD(v, K, 1).
///
/// Blocks are stored as ascending point lists; block order is the order the
/// constructor received them in. Replication numbers are derived on
/// construction. Designs produced by removals keep an old->new point map
/// into their parent (entries of `removed` for deleted points).
class Design {
 public:
  static constexpr std::size_t removed = static_cast<std::size_t>(-1);

  Design() = default;
  Design(std::size_t v, std::vector<Block> blocks);

  std::size_t v() const { return v_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(std::size_t b) const { return blocks_.at(b); }
  int lambda() const { return 1; }

  const std::vector<std::size_t>& replication() const { return replication_; }
  std::size_t replication(Point p) const { return replication_.at(p); }
  /// Block sizes that occur (the set K).
  std::set<std::size_t> block_sizes() const;
  /// Sum of replication numbers, the column count N of the sensing matrix.
  std::size_t total_replication() const;
  /// Blocks containing `p`, ascending.
  std::vector<std::size_t> blocks_through(Point p) const;
  /// The block containing both points, if any.
  std::optional<std::size_t> block_containing(Point a, Point b) const;

  const std::vector<std::size_t>& point_map() const { return point_map_; }
  std::size_t discarded_blocks() const { return discarded_blocks_; }

  bool operator==(const Design& other) const {
    return v_ == other.v_ && blocks_ == other.blocks_;
  }

 private:
  friend Design remove_points(const Design&, const PointSet&);
  friend Design remove_blocks_with_points(const Design&, const std::vector<std::size_t>&);

  std::size_t v_ = 0;
  std::vector<Block> blocks_;
  std::vector<std::size_t> replication_;
  std::vector<std::size_t> point_map_;
  std::size_t discarded_blocks_ = 0;
};

/// Desarguesian plane PG(2, q) for prime q. Points are the normalised
/// nonzero vectors of GF(q)^3 (first nonzero coordinate 1), in
/// lexicographic order; blocks are indexed the same way by their normal
/// vectors.
Design projective_plane(unsigned q);

/// Homogeneous coordinates of point `p` of projective_plane(q).
std::array<unsigned, 3> plane_coordinates(unsigned q, Point p);
/// Index in projective_plane(q) of the point with coordinates `x` (not all 0).
Point plane_point_index(unsigned q, std::array<unsigned, 3> x);

/// Steiner triple system on v points, v = 1 or 3 (mod 6), v >= 3.
/// Bose construction for v = 3 (mod 6), Skolem construction for v = 1 (mod 6).
Design steiner_triple_system(std::size_t v);

/// The conic {(t^2, t, 1)} u {(1, 0, 0)} of projective_plane(q), q odd prime.
PointSet find_conic_oval(const Design& plane, unsigned q);

/// True when no block contains three points of `s`.
bool is_arc(const Design& d, const PointSet& s);

Design remove_points(const Design& d, const PointSet& s);
Design remove_blocks_with_points(const Design& d, const std::vector<std::size_t>& block_ids);

struct PairViolation {
  Point a;
  Point b;
  std::size_t coverage;
};

struct ValidationReport {
  std::vector<PairViolation> pair_violations;
  std::vector<std::string> notes;
  std::size_t replication_sum = 0;  // sum_x r_x
  std::size_t block_size_sum = 0;   // sum_B |B|
  std::size_t v = 0;
  std::size_t n = 0;

  bool counts_agree() const { return replication_sum == block_size_sum; }
  bool blocks_at_least_points() const { return n >= v; }
  bool valid() const { return pair_violations.empty() && counts_agree(); }
};

ValidationReport validate_pbd(const Design& d);

/// `pbd v=<v> lambda=1` header, then one block per line.
void write_design(std::ostream& os, const Design& d);
Design read_design(std::istream& is);

}  // namespace pbdcs
