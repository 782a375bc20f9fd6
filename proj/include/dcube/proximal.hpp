#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "dcube/check.hpp"
#include "dcube/cube_engine.hpp"
#include "dcube/finite_system.hpp"

namespace dcube {

// The witness template: coordinate 0 is x, coordinate {j} is y, and the
// two vertices obtained by inserting 0 or 1 at position j into a non-empty
// η ⊆ [d-1] both carry a_star[η - 1].
CubePoint build_z(PointId x, PointId y, std::span<const PointId> a_star, unsigned j, unsigned d);

// Pairs (x,y) whose template point lies in q; q must be the full-direction
// cube set of sys. Scans q instead of searching over a_star.
PairRelation compute_R_j(const FiniteZdSystem& sys, const CubeSet& q, unsigned j,
                         const EngineOptions& opts = {});

// The same relation read from the cube set with directions 1 and j
// exchanged, obtained from q through the induced coordinate permutation.
PairRelation compute_R_j_reordered(const FiniteZdSystem& sys, const CubeSet& q, unsigned j,
                                   const EngineOptions& opts = {});

struct EquivalenceVerdict {
  bool reflexive = true, symmetric = true, transitive = true, invariant = true;
  std::optional<PointId> reflexive_failure;
  std::optional<PairRelation::Pair> symmetric_failure;
  std::optional<std::array<PointId, 3>> transitive_failure;  // x~y, y~z, not x~z
  std::optional<InvarianceFailure> invariance_failure;

  bool holds() const { return reflexive && symmetric && transitive && invariant; }
  std::string describe() const;
};

EquivalenceVerdict check_equivalence(const PairRelation& rel, const FiniteZdSystem& sys);

struct ProximalReport {
  std::vector<PairRelation> per_direction;  // index j-1
  PairRelation intersection;
  EquivalenceVerdict equivalence;
  bool trivial = false;
};

ProximalReport compute_R(const FiniteZdSystem& sys, const CubeSet& q, const EngineOptions& opts = {});
ProximalReport compute_R(const FiniteZdSystem& sys, const EngineOptions& opts = {});

struct Characterization {
  // Conditions in order: (x,y) lies in every directional relation;
  // (x,y,...,y) is a cube; x and y share a completion; x and y have the same
  // completions; (x,y) lies in some directional relation.
  std::array<bool, 5> conditions{};
  bool hypotheses_met = false;

  bool agree() const;
};

// Precomputes everything characterize needs for a system.
class CharacterizationContext {
 public:
  CharacterizationContext(const FiniteZdSystem& sys, const EngineOptions& opts = {});
  CharacterizationContext(const FiniteZdSystem& sys, CubeSet q, ProximalReport r);

  Characterization characterize(PointId x, PointId y) const;
  const CubeSet& cubes() const { return q_; }
  const ProximalReport& relations() const { return r_; }
  bool minimal() const { return minimal_; }

 private:
  FiniteZdSystem sys_;
  CubeSet q_;
  ProximalReport r_;
  bool minimal_;
};

Characterization characterize(const FiniteZdSystem& sys, PointId x, PointId y,
                              const EngineOptions& opts = {});

struct PushforwardVerdict {
  bool factor_map_valid = false;
  bool source_minimal = false;
  bool target_minimal = false;
  bool easy_inclusion = false;
  bool equality = false;
  std::optional<PairRelation::Pair> outside;  // image pair not related in the target
  std::optional<PairRelation::Pair> missing;  // related target pair not in the image
  std::size_t image_size = 0, target_size = 0;

  bool hypotheses_met() const { return factor_map_valid && target_minimal; }
};

PushforwardVerdict pushforward_check(const FactorMap& pi, const EngineOptions& opts = {});

struct UcppFactor {
  FactorMap map;
  bool hypotheses_met = false;
  UcppVerdict ucpp;
  bool relation_trivial = false;  // the relation of the quotient is the diagonal
};

// Quotient by the intersection of the directional relations. Throws Error
// if that relation is not an invariant equivalence relation.
UcppFactor maximal_ucpp_factor(const FiniteZdSystem& sys, const EngineOptions& opts = {});

// Relation-level checks: triviality under the closing property, agreement
// of the reordered computation, the five-way characterization on all pairs,
// the reversal symmetry, equivalence and the maximal factor.
CheckList proximal_battery(const FiniteZdSystem& sys, const CubeSet& q, const EngineOptions& opts = {});

}  // namespace dcube
