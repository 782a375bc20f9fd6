#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcube/error.hpp"

namespace dcube {

using PointId = std::uint32_t;

// Unvalidated generator data: d image arrays over the points 0..n-1.
struct PermutationData {
  std::size_t n_points = 0;
  std::vector<std::vector<PointId>> perms;
};

// Generators are 1-based throughout the public API.
struct CommutationFailure {
  unsigned i = 0, j = 0;
  PointId x = 0;
  PointId ij = 0;  // T_i(T_j x)
  PointId ji = 0;  // T_j(T_i x)
};

struct ValidationReport {
  std::vector<std::string> problems;
  // First generator that is not a bijection of the point set, if any.
  std::optional<unsigned> bad_generator;
  std::optional<CommutationFailure> commutation;
  // Per-generator orders; filled only when every generator is a bijection.
  std::vector<std::uint64_t> orders;

  bool valid() const { return problems.empty(); }
};

ValidationReport validate(const PermutationData& data);

// d commuting permutations of {0..n-1}. Immutable; construction validates.
class FiniteZdSystem {
 public:
  explicit FiniteZdSystem(PermutationData data);

  // Z/n with T_i = +shifts[i-1].
  static FiniteZdSystem rotation(std::size_t n, const std::vector<std::int64_t>& shifts);
  // Z/m_1 x ... x Z/m_r (mixed radix, first coordinate most significant)
  // with T_i adding shifts[i-1].
  static FiniteZdSystem torus(const std::vector<std::uint64_t>& moduli,
                              const std::vector<std::vector<std::int64_t>>& shifts);

  std::size_t size() const { return data_.n_points; }
  unsigned dim() const { return static_cast<unsigned>(data_.perms.size()); }
  const PermutationData& data() const { return data_; }
  const std::vector<PointId>& perm(unsigned i) const { return data_.perms.at(i - 1); }
  const std::vector<std::uint64_t>& orders() const { return orders_; }
  std::uint64_t order(unsigned i) const { return orders_.at(i - 1); }

  PointId image(unsigned i, PointId x) const { return data_.perms[i - 1][x]; }
  // T_i^k x for any integer k.
  PointId power(unsigned i, std::int64_t k, PointId x) const;
  // T_1^{n_1}...T_d^{n_d} x.
  PointId apply_word(std::span<const std::int64_t> n, PointId x) const;

  void check_point(PointId x) const;

  bool operator==(const FiniteZdSystem& o) const {
    return data_.n_points == o.data_.n_points && data_.perms == o.data_.perms;
  }

 private:
  struct CycleIndex {
    std::vector<std::uint32_t> cycle_of;
    std::vector<std::uint32_t> pos;
    std::vector<std::uint32_t> start;  // offsets into members, one extra sentinel
    std::vector<PointId> members;
  };

  PermutationData data_;
  std::vector<std::uint64_t> orders_;
  std::vector<CycleIndex> cycles_;
};

PointId apply_word(const FiniteZdSystem& sys, std::span<const std::int64_t> n, PointId x);

// Sorted orbit of x under the group generated by the T_i.
std::vector<PointId> orbit(const FiniteZdSystem& sys, PointId x);

struct MinimalityResult {
  bool minimal = false;
  std::size_t orbit_size = 0;
  // A point whose orbit is a proper subset (set when not minimal).
  std::optional<PointId> witness;
};

MinimalityResult is_minimal(const FiniteZdSystem& sys);

// A set of ordered pairs over points 0..n-1, stored sorted.
class PairRelation {
 public:
  using Pair = std::pair<PointId, PointId>;

  PairRelation() = default;
  PairRelation(std::size_t n, std::vector<Pair> pairs);

  static PairRelation diagonal(std::size_t n);
  static PairRelation full(std::size_t n);

  std::size_t base_size() const { return n_; }
  std::size_t size() const { return pairs_.size(); }
  const std::vector<Pair>& pairs() const { return pairs_; }
  bool contains(PointId x, PointId y) const;
  // All pairs with first element x.
  std::span<const Pair> row(PointId x) const;

  bool is_diagonal() const;
  PairRelation intersect(const PairRelation& other) const;

  bool operator==(const PairRelation&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Pair> pairs_;
};

// Equivalence classes of the reflexive-symmetric-transitive closure of
// `rel`, labelled 0.. in order of each class's least member.
std::vector<PointId> closure_labels(const PairRelation& rel);

struct FactorMap {
  FiniteZdSystem source;
  FiniteZdSystem target;
  std::vector<PointId> map;

  PointId operator()(PointId x) const { return map.at(x); }
};

struct EquivarianceFailure {
  unsigned generator = 0;
  PointId x = 0;
};

struct FactorMapReport {
  bool dims_match = false;
  bool total = false;  // map defined on every source point with valid targets
  bool surjective = false;
  bool equivariant = false;
  std::optional<PointId> missed_target;
  std::optional<EquivarianceFailure> equivariance_failure;

  bool ok() const { return dims_match && total && surjective && equivariant; }
};

FactorMapReport check_factor_map(const FactorMap& pi);

// {(x,y) : pi(x) = pi(y)}.
PairRelation kernel(const FactorMap& pi);

// second ∘ first.
FactorMap compose(const FactorMap& first, const FactorMap& second);

struct InvarianceFailure {
  PointId x = 0, y = 0;  // related, but T_g x and T_g y are not
  unsigned generator = 0;
};

class InvarianceError : public Error {
 public:
  explicit InvarianceError(const InvarianceFailure& f);
  const InvarianceFailure& failure() const { return failure_; }

 private:
  InvarianceFailure failure_;
};

// Quotient by the equivalence closure of `rel`. Throws InvarianceError if
// the closure is not invariant under some generator.
FactorMap quotient(const FiniteZdSystem& sys, const PairRelation& rel);

// Text format. parse_system checks syntax only; load_system also enforces
// the system invariants, reporting the offending line.
struct ParsedSystem {
  PermutationData data;
  std::vector<std::size_t> generator_lines;
};

ParsedSystem parse_system(std::string_view text);
FiniteZdSystem load_system(std::string_view text);
std::string format_system(const FiniteZdSystem& sys);

PairRelation parse_relation(std::string_view text);
std::string format_relation(const PairRelation& rel);

}  // namespace dcube
