#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcube/check.hpp"
#include "dcube/finite_system.hpp"
#include "dcube/parallel.hpp"

namespace dcube {

// A subset of Z^k whose membership depends only on n mod (m_1,...,m_k).
// Always stored in canonical form: each m_i is the least period in
// coordinate i, so equal sets compare equal.
class PeriodicSet {
 public:
  static constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 26;

  PeriodicSet() : PeriodicSet(empty(0)) {}
  // Residues are reduced mod the moduli; duplicates are allowed.
  PeriodicSet(std::vector<std::uint64_t> moduli, const std::vector<std::vector<std::int64_t>>& residues);

  static PeriodicSet full(unsigned k);
  static PeriodicSet empty(unsigned k);
  // Evaluates `member` on every residue vector in [0,m_1) x ... x [0,m_k).
  static PeriodicSet from_predicate(std::vector<std::uint64_t> moduli,
                                    const std::function<bool(std::span<const std::int64_t>)>& member,
                                    const EngineOptions& opts = {});

  unsigned k() const { return static_cast<unsigned>(moduli_.size()); }
  const std::vector<std::uint64_t>& moduli() const { return moduli_; }
  std::size_t residue_count() const;
  bool empty() const { return residue_count() == 0; }
  // Residue vectors in lexicographic order.
  std::vector<std::vector<std::int64_t>> residues() const;
  bool contains(std::span<const std::int64_t> n) const;

  bool operator==(const PeriodicSet&) const = default;

 private:
  struct CellsTag {};
  PeriodicSet(CellsTag, std::vector<std::uint64_t> moduli, std::vector<std::uint8_t> cells);
  std::uint64_t code(std::span<const std::int64_t> n) const;
  void canonicalize();

  std::vector<std::uint64_t> moduli_;
  std::vector<std::uint8_t> cells_;  // mixed radix, first coordinate most significant
};

PeriodicSet intersect(const PeriodicSet& a, const PeriodicSet& b);
bool intersects(const PeriodicSet& a, const PeriodicSet& b);
// A residue vector of a outside b, if any.
std::optional<std::vector<std::int64_t>> first_outside(const PeriodicSet& a, const PeriodicSet& b);
bool is_subset(const PeriodicSet& a, const PeriodicSet& b);
// {(n, m) : n in a, m in b}.
PeriodicSet cartesian_product(const PeriodicSet& a, const PeriodicSet& b);
// Removes coordinate j (1-based); the set must not depend on it.
PeriodicSet drop_coordinate(const PeriodicSet& s, unsigned j);
bool contains_zero_vector(const PeriodicSet& s);

// {n in Z^d : n with coordinate i removed lies in sets[i-1], for every i}.
PeriodicSet d_joining(std::span<const PeriodicSet> sets, const EngineOptions& opts = {});

// {n_1 + ... + n_k : n in s}.
PeriodicSet phi_image(const PeriodicSet& s);

// {n : T_1^{n_1}...T_d^{n_d} x in U}, with moduli the generator orders.
PeriodicSet return_set(const FiniteZdSystem& sys, PointId x, std::span<const PointId> u,
                       const EngineOptions& opts = {});

struct ContainmentVerdict {
  bool hypotheses_met = false;
  std::vector<PointId> lift;        // the lift of x in each face factor
  std::vector<PeriodicSet> parts;   // return times of the lift, coordinate j removed
  PeriodicSet joining, returns;
  bool contained = false;
  std::optional<std::vector<std::int64_t>> witness;  // joining residue outside returns
};

// Lifts x to the constant rooted cube, projects it to the face factors and
// checks that the joining of their return times to singletons lies inside
// the return times of x to U. Requires x in U.
ContainmentVerdict joining_containment_check(const FiniteZdSystem& sys, PointId x, std::span<const PointId> u,
                                             const EngineOptions& opts = {});

// A Z^d-system on which T_j acts trivially, with a point and a neighborhood.
struct RealizationFactor {
  FiniteZdSystem system;
  PointId point = 0;
  std::vector<PointId> nbhd;
};

struct ProductRealization {
  FiniteZdSystem system;  // orbit closure of the point in the product
  PointId point = 0;
  std::vector<PointId> nbhd;
  std::vector<PeriodicSet> parts;
  PeriodicSet returns, joining;
  bool equal = false;
  bool ucpp = false;
};

// Product points are numbered in lexicographic order of their coordinates.
ProductRealization product_system_realization(const std::vector<RealizationFactor>& factors,
                                              const EngineOptions& opts = {});

PeriodicSet parse_periodic_set(std::string_view text);
std::string format_periodic_set(const PeriodicSet& s);

CheckList return_times_battery(const FiniteZdSystem& sys, PointId x0, const EngineOptions& opts = {});

}  // namespace dcube
