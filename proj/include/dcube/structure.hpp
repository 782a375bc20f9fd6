#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dcube/check.hpp"
#include "dcube/cube_engine.hpp"
#include "dcube/finite_system.hpp"
#include "dcube/proximal.hpp"

namespace dcube {

// A subgroup of <T_1..T_d>, generated by some of the T_j and by words
// T_1^{n_1}...T_d^{n_d}.
struct SubgroupSpec {
  std::vector<unsigned> generators;
  std::vector<std::vector<std::int64_t>> words;

  static SubgroupSpec of(std::vector<unsigned> gens) { return {std::move(gens), {}}; }
  static SubgroupSpec trivial(unsigned d) { return {{}, {std::vector<std::int64_t>(d, 0)}}; }
  std::string str() const;
};

// The subgroup generated by both (concatenated generator lists).
SubgroupSpec product(const SubgroupSpec& a, const SubgroupSpec& b);

// {(x, hx) : x in X, h in H}.
PairRelation compute_QH(const FiniteZdSystem& sys, const SubgroupSpec& h);

// True if every element of H fixes every point.
bool acts_trivially(const FiniteZdSystem& sys, const SubgroupSpec& h);

struct Z0HFactor {
  FactorMap map;
  EquivalenceVerdict equivalence;
  bool subgroup_trivial_on_quotient = false;
  bool hypotheses_met = false;
};

// Quotient by Q_H. Throws HypothesisUnmet when Q_H is not an invariant
// equivalence relation.
Z0HFactor maximal_Z0H_factor(const FiniteZdSystem& sys, const SubgroupSpec& h);

struct PartitionVerdict {
  bool equal = false;
  std::size_t direct_classes = 0, iterated_classes = 0;
  // Points in one class of one partition but different classes of the other.
  std::optional<PairRelation::Pair> witness;
};

// Compares X/Q_{H1H2} with (X/Q_{H1})/Q_{H2} as partitions of X.
PartitionVerdict iterated_quotient_check(const FiniteZdSystem& sys, const SubgroupSpec& h1,
                                         const SubgroupSpec& h2);

// A pair of rel not identified by pi, if any.
std::optional<PairRelation::Pair> kernel_misses(const FactorMap& pi, const PairRelation& rel);

// Projection of the rooted cube set onto a set of its coordinates, with the
// induced action. An empty coordinate set is stored as the single row (x0).
struct CoordinateFactor {
  std::vector<std::uint32_t> vertices;  // non-zero vertex masks, ascending
  TupleSet points;
  FiniteZdSystem system;
  std::vector<PointId> map;  // rooted-cube index -> factor index
};

struct JoiningDecomposition {
  unsigned d = 0;
  PointId x0 = 0;
  TupleSet k;  // rooted cube set; vertex ε is stored at index ε-1
  FiniteZdSystem y;
  std::vector<CoordinateFactor> factors;  // vertices with ε_j = 0, index j-1
  std::map<std::pair<unsigned, unsigned>, CoordinateFactor> pair_factors;  // ε_i = ε_j = 0
  bool injective = false;
  std::optional<std::pair<std::size_t, std::size_t>> collision;
  bool section_matches = false;  // rooted cube set equals the x0-section of Q
  bool base_minimal = false;
  bool base_ucpp = false;
};

// Builds the decomposition without checking hypotheses.
JoiningDecomposition decompose_unchecked(const FiniteZdSystem& sys, PointId x0,
                                         const EngineOptions& opts = {});
// Throws HypothesisUnmet unless the system is minimal with the closing
// property.
JoiningDecomposition decompose(const FiniteZdSystem& sys, PointId x0, const EngineOptions& opts = {});

struct IsomorphismVerdict {
  bool well_defined = false, injective = false, surjective = false, equivariant = false;
  std::size_t quotient_size = 0, target_size = 0;
  std::string witness;

  bool holds() const { return well_defined && injective && surjective && equivariant; }
};

// Compares the quotient of the rooted cube set by the j-th face
// transformation with the rooted cube set of the remaining directions.
IsomorphismVerdict factor_isomorphism_check(const FiniteZdSystem& sys, PointId x0, unsigned j,
                                            const EngineOptions& opts = {});

struct IndependenceVerdict {
  CheckStatus status = CheckStatus::Pass;
  std::size_t candidates = 0;
  std::optional<std::pair<CubePoint, CubePoint>> witness;  // (member, rejected candidate)
};

IndependenceVerdict relative_independence_check(const JoiningDecomposition& dec,
                                                const FiniteZdSystem& sys,
                                                const EngineOptions& opts = {});

CheckList structure_battery(const FiniteZdSystem& sys, PointId x0, const EngineOptions& opts = {});

}  // namespace dcube
