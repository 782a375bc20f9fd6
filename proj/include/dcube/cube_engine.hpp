#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcube/check.hpp"
#include "dcube/finite_system.hpp"
#include "dcube/hypercube.hpp"
#include "dcube/parallel.hpp"

namespace dcube {

// Coordinates of a cube point, indexed by vertex mask.
using CubePoint = std::vector<PointId>;
using CubeView = std::span<const PointId>;

// Dimension k of a 2^k-tuple; throws if the length is not a power of two.
unsigned cube_dim(CubeView a);

// Lexicographically sorted, duplicate-free set of equal-width rows.
class TupleSet {
 public:
  explicit TupleSet(std::size_t width = 0) : width_(width) {}
  // Sorts and deduplicates a row-major buffer.
  static TupleSet from_flat(std::size_t width, std::vector<PointId> flat);
  // Wraps a buffer already sorted and duplicate-free.
  static TupleSet from_sorted_flat(std::size_t width, std::vector<PointId> flat);

  std::size_t width() const { return width_; }
  std::size_t size() const { return width_ ? flat_.size() / width_ : 0; }
  bool empty() const { return size() == 0; }
  CubeView operator[](std::size_t i) const { return {flat_.data() + i * width_, width_}; }
  const std::vector<PointId>& flat() const { return flat_; }

  std::optional<std::size_t> find(CubeView row) const;
  bool contains(CubeView row) const { return find(row).has_value(); }
  // Index range of rows starting with `prefix`.
  std::pair<std::size_t, std::size_t> prefix_range(CubeView prefix) const;

  bool operator==(const TupleSet&) const = default;

 private:
  std::size_t width_;
  std::vector<PointId> flat_;
};

// A set of directional cube points of dimension k over the directions
// `dirs` = (j_1..j_k) of some system.
class CubeSet {
 public:
  CubeSet(unsigned dim, std::vector<unsigned> dirs, TupleSet points);

  unsigned dim() const { return dim_; }
  const std::vector<unsigned>& dirs() const { return dirs_; }
  const TupleSet& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  CubeView operator[](std::size_t i) const { return points_[i]; }
  bool contains(CubeView a) const { return a.size() == vertex_count(dim_) && points_.contains(a); }
  // Members whose base coordinate equals x0.
  std::pair<std::size_t, std::size_t> section(PointId x0) const;

  bool operator==(const CubeSet&) const = default;

 private:
  unsigned dim_;
  std::vector<unsigned> dirs_;
  TupleSet points_;
};

// The directions 1..d.
std::vector<unsigned> all_directions(unsigned d);

CubeSet enumerate_Q(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs,
                    const EngineOptions& opts = {});
inline CubeSet enumerate_Q(const FiniteZdSystem& sys, const EngineOptions& opts = {}) {
  return enumerate_Q(sys, all_directions(sys.dim()), opts);
}

// Rows of width 2^k - 1: coordinate ε != 0 is stored at index ε - 1.
TupleSet enumerate_K(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs, PointId x0,
                     const EngineOptions& opts = {});

struct UcppWitness {
  CubePoint first, second;
  Vertex vertex;
};

struct UcppVerdict {
  bool holds = true;
  std::optional<UcppWitness> witness;
};

UcppVerdict ucpp_check(const CubeSet& cubes);

CubePoint constant_cube(PointId x, unsigned d);

CubePoint glue(CubeView a, CubeView b, unsigned j);

enum class InsertSide {
  UpperIntoLower,  // a's j-upper face replaces b's j-lower face
  LowerIntoUpper,  // a's j-lower face replaces b's j-upper face
};

CubePoint insert(CubeView a, CubeView b, unsigned j, InsertSide side);

// Duplicates a k-cube into dimension d: positions[l] is the direction of the
// d-cube that coordinate l+1 of `a` follows.
CubePoint duplicate(CubeView a, const std::vector<unsigned>& positions, unsigned d);

CubePoint project(CubeView a, const FaceSelector& sel);

// The coordinate permutation induced by a digit permutation:
// (σ_* a)_ε = a_{σ(ε)}.
CubePoint permute_coordinates(const DigitPermutation& sigma, CubeView a);

// (Φ_j* a)_ε = a_{Φ_j(ε)}.
CubePoint reflect_coordinates(unsigned j, CubeView a);

// Applies T_{dirs[l-1]}^p to the coordinates with ε_l = 1.
CubePoint face_transform(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs, unsigned l,
                         std::int64_t p, CubeView a);

// Applies T_g^p to every coordinate.
CubePoint diagonal_transform(const FiniteZdSystem& sys, unsigned g, std::int64_t p, CubeView a);

// An element of the group generated by face and diagonal transformations.
struct FaceGroupElement {
  std::vector<std::int64_t> face;      // one exponent per cube direction
  std::vector<std::int64_t> diagonal;  // one exponent per system generator
};

CubePoint apply(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs,
                const FaceGroupElement& g, CubeView a);

struct FaceOrbit {
  TupleSet points;
  // Set when some generated point falls outside the cube set.
  std::optional<CubePoint> escaped;
};

FaceOrbit face_group_orbit(const FiniteZdSystem& sys, const CubeSet& cubes, CubeView start);

std::string format_cube_set(const CubeSet& cubes);
CubeSet parse_cube_set(std::string_view text);

// Exhaustive closure checks on Q = enumerate_Q(sys): constant cubes,
// single-direction symmetry, face-group invariance, digit permutations,
// reflections, projection, duplication, gluing and insertion.
CheckList surgery_battery(const FiniteZdSystem& sys, const CubeSet& q,
                          const EngineOptions& opts = {});

}  // namespace dcube
