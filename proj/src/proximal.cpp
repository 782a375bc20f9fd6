#include "dcube/proximal.hpp"

#include <algorithm>
#include <sstream>

namespace dcube {

namespace {

std::string pair_str(PointId x, PointId y) {
  return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

// Half-open index range of q's rows with base coordinate x, and a view of
// one row without its base coordinate.
CubeView tail(CubeView row) { return row.subspan(1); }

}  // namespace

CubePoint build_z(PointId x, PointId y, std::span<const PointId> a_star, unsigned j, unsigned d) {
  if (d < 1 || d > kMaxDim) throw InvalidArgument("build_z: dimension out of range");
  if (j < 1 || j > d) throw InvalidArgument("build_z: direction out of range");
  const std::size_t half = vertex_count(d - 1);
  if (a_star.size() != half - 1)
    throw InvalidArgument("build_z: expected " + std::to_string(half - 1) + " template entries");
  CubePoint z(vertex_count(d));
  z[0] = x;
  z[std::size_t{1} << (j - 1)] = y;
  for (std::uint32_t eta = 1; eta < half; ++eta) {
    z[insert_bit(eta, j, false)] = a_star[eta - 1];
    z[insert_bit(eta, j, true)] = a_star[eta - 1];
  }
  return z;
}

namespace {

PairRelation scan_template(std::size_t n_points, const CubeSet& q, unsigned j,
                           const EngineOptions& opts) {
  const unsigned d = q.dim();
  if (j < 1 || j > d) throw InvalidArgument("direction out of range");
  const std::uint32_t half = static_cast<std::uint32_t>(vertex_count(d - 1));
  const std::uint32_t yj = std::uint32_t{1} << (j - 1);
  std::vector<std::uint32_t> lo(half), hi(half);
  for (std::uint32_t eta = 1; eta < half; ++eta) {
    lo[eta] = insert_bit(eta, j, false);
    hi[eta] = insert_bit(eta, j, true);
  }
  const unsigned workers = effective_workers(q.size(), opts.threads);
  std::vector<std::vector<PairRelation::Pair>> parts(workers);
  parallel_chunks(q.size(), workers, [&](unsigned w, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto z = q[i];
      bool match = true;
      for (std::uint32_t eta = 1; eta < half && match; ++eta) match = z[lo[eta]] == z[hi[eta]];
      if (match) parts[w].emplace_back(z[0], z[yj]);
    }
  });
  std::vector<PairRelation::Pair> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return PairRelation(n_points, std::move(all));
}

void check_full_cubes(const FiniteZdSystem& sys, const CubeSet& q) {
  if (q.dim() != sys.dim() || q.dirs() != all_directions(sys.dim()))
    throw InvalidArgument("expected the full-direction cube set of the system");
}

}  // namespace

PairRelation compute_R_j(const FiniteZdSystem& sys, const CubeSet& q, unsigned j,
                         const EngineOptions& opts) {
  check_full_cubes(sys, q);
  return scan_template(sys.size(), q, j, opts);
}

PairRelation compute_R_j_reordered(const FiniteZdSystem& sys, const CubeSet& q, unsigned j,
                                   const EngineOptions& opts) {
  check_full_cubes(sys, q);
  const unsigned d = sys.dim();
  auto tau = DigitPermutation::transposition(d, 1, j);
  // tau is an involution, so tau_* carries Q onto the cube set whose
  // direction list is (tau(1),...,tau(d)).
  std::vector<PointId> flat;
  flat.reserve(q.points().flat().size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    auto p = permute_coordinates(tau, q[i]);
    flat.insert(flat.end(), p.begin(), p.end());
  }
  CubeSet reordered(d, tau.images(), TupleSet::from_flat(vertex_count(d), std::move(flat)));
  return scan_template(sys.size(), reordered, 1, opts);
}

std::string EquivalenceVerdict::describe() const {
  if (reflexive_failure) return "not reflexive at " + std::to_string(*reflexive_failure);
  if (symmetric_failure)
    return "not symmetric: " + pair_str(symmetric_failure->first, symmetric_failure->second) +
           " without its reverse";
  if (transitive_failure) {
    const auto& t = *transitive_failure;
    return "not transitive: " + pair_str(t[0], t[1]) + " and " + pair_str(t[1], t[2]) +
           " but not " + pair_str(t[0], t[2]);
  }
  if (invariance_failure)
    return "not invariant: " + pair_str(invariance_failure->x, invariance_failure->y) +
           " related but not after T" + std::to_string(invariance_failure->generator);
  return "invariant equivalence relation";
}

EquivalenceVerdict check_equivalence(const PairRelation& rel, const FiniteZdSystem& sys) {
  if (rel.base_size() != sys.size()) throw InvalidArgument("relation does not match the system");
  EquivalenceVerdict v;
  for (PointId x = 0; x < sys.size(); ++x)
    if (!rel.contains(x, x)) {
      v.reflexive = false;
      v.reflexive_failure = x;
      break;
    }
  for (const auto& [x, y] : rel.pairs())
    if (!rel.contains(y, x)) {
      v.symmetric = false;
      v.symmetric_failure = PairRelation::Pair{x, y};
      break;
    }
  for (const auto& [x, y] : rel.pairs()) {
    for (const auto& [y2, z] : rel.row(y))
      if (!rel.contains(x, z)) {
        v.transitive = false;
        v.transitive_failure = std::array<PointId, 3>{x, y2, z};
        break;
      }
    if (!v.transitive) break;
  }
  for (const auto& [x, y] : rel.pairs()) {
    for (unsigned i = 1; i <= sys.dim(); ++i)
      if (!rel.contains(sys.image(i, x), sys.image(i, y))) {
        v.invariant = false;
        v.invariance_failure = InvarianceFailure{x, y, i};
        break;
      }
    if (!v.invariant) break;
  }
  return v;
}

ProximalReport compute_R(const FiniteZdSystem& sys, const CubeSet& q, const EngineOptions& opts) {
  ProximalReport r;
  for (unsigned j = 1; j <= sys.dim(); ++j) r.per_direction.push_back(compute_R_j(sys, q, j, opts));
  r.intersection = r.per_direction.front();
  for (std::size_t j = 1; j < r.per_direction.size(); ++j)
    r.intersection = r.intersection.intersect(r.per_direction[j]);
  r.equivalence = check_equivalence(r.intersection, sys);
  r.trivial = r.intersection.is_diagonal();
  return r;
}

ProximalReport compute_R(const FiniteZdSystem& sys, const EngineOptions& opts) {
  return compute_R(sys, enumerate_Q(sys, opts), opts);
}

bool Characterization::agree() const {
  return std::all_of(conditions.begin(), conditions.end(), [&](bool b) { return b == conditions[0]; });
}

CharacterizationContext::CharacterizationContext(const FiniteZdSystem& sys, const EngineOptions& opts)
    : CharacterizationContext(sys, enumerate_Q(sys, opts), ProximalReport{}) {
  r_ = compute_R(sys_, q_, opts);
}

CharacterizationContext::CharacterizationContext(const FiniteZdSystem& sys, CubeSet q, ProximalReport r)
    : sys_(sys), q_(std::move(q)), r_(std::move(r)), minimal_(is_minimal(sys).minimal) {}

Characterization CharacterizationContext::characterize(PointId x, PointId y) const {
  sys_.check_point(x);
  sys_.check_point(y);
  Characterization c;
  c.hypotheses_met = minimal_;
  c.conditions[0] = r_.intersection.contains(x, y);

  CubePoint xy(vertex_count(q_.dim()), y);
  xy[0] = x;
  c.conditions[1] = q_.contains(xy);

  auto [xb, xe] = q_.section(x);
  auto [yb, ye] = q_.section(y);
  // Both sections are sorted by their tails, so a merge finds common
  // completions and equality is a row-by-row comparison.
  bool shared = false;
  for (std::size_t i = xb, k = yb; i < xe && k < ye && !shared;) {
    auto a = tail(q_[i]), b = tail(q_[k]);
    if (std::equal(a.begin(), a.end(), b.begin()))
      shared = true;
    else if (std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()))
      ++i;
    else
      ++k;
  }
  c.conditions[2] = shared;
  bool same = (xe - xb) == (ye - yb);
  for (std::size_t i = 0; same && i < xe - xb; ++i) {
    auto a = tail(q_[xb + i]), b = tail(q_[yb + i]);
    same = std::equal(a.begin(), a.end(), b.begin());
  }
  c.conditions[3] = same;
  c.conditions[4] = std::any_of(r_.per_direction.begin(), r_.per_direction.end(),
                                [&](const PairRelation& rj) { return rj.contains(x, y); });
  return c;
}

Characterization characterize(const FiniteZdSystem& sys, PointId x, PointId y,
                              const EngineOptions& opts) {
  return CharacterizationContext(sys, opts).characterize(x, y);
}

PushforwardVerdict pushforward_check(const FactorMap& pi, const EngineOptions& opts) {
  PushforwardVerdict v;
  v.factor_map_valid = check_factor_map(pi).ok();
  if (!v.factor_map_valid) throw InvalidArgument("pushforward_check: not a factor map");
  v.source_minimal = is_minimal(pi.source).minimal;
  v.target_minimal = is_minimal(pi.target).minimal;
  auto ry = compute_R(pi.source, opts).intersection;
  auto rx = compute_R(pi.target, opts).intersection;
  std::vector<PairRelation::Pair> img;
  img.reserve(ry.size());
  for (const auto& [x, y] : ry.pairs()) img.emplace_back(pi.map[x], pi.map[y]);
  PairRelation image(pi.target.size(), std::move(img));
  v.image_size = image.size();
  v.target_size = rx.size();
  v.easy_inclusion = true;
  for (const auto& [x, y] : image.pairs())
    if (!rx.contains(x, y)) {
      v.easy_inclusion = false;
      v.outside = PairRelation::Pair{x, y};
      break;
    }
  for (const auto& [x, y] : rx.pairs())
    if (!image.contains(x, y)) {
      v.missing = PairRelation::Pair{x, y};
      break;
    }
  v.equality = v.easy_inclusion && !v.missing;
  return v;
}

UcppFactor maximal_ucpp_factor(const FiniteZdSystem& sys, const EngineOptions& opts) {
  auto r = compute_R(sys, opts);
  if (!r.equivalence.holds())
    throw Error("the proximal relation is not an invariant equivalence relation: " +
                r.equivalence.describe());
  UcppFactor f{quotient(sys, r.intersection), is_minimal(sys).minimal, {}, false};
  auto qq = enumerate_Q(f.map.target, opts);
  f.ucpp = ucpp_check(qq);
  f.relation_trivial = compute_R(f.map.target, qq, opts).trivial;
  return f;
}

CheckList proximal_battery(const FiniteZdSystem& sys, const CubeSet& q, const EngineOptions& opts) {
  CheckList out;
  const bool minimal = is_minimal(sys).minimal;
  const unsigned d = sys.dim();
  auto ucpp = ucpp_check(q);
  CharacterizationContext ctx(sys, q, compute_R(sys, q, opts));
  const auto& r = ctx.relations();

  {
    std::string detail = ucpp.holds ? "holds" : "fails";
    if (minimal && d >= 2)
      out.push_back(verdict("closing property of minimal systems", ucpp.holds, detail));
    else
      out.push_back(unmet("closing property of minimal systems",
                          std::string(minimal ? "single direction" : "not minimal") + "; property " + detail));
  }
  {
    std::string name = "relations trivial under the closing property";
    if (!ucpp.holds) {
      out.push_back(unmet(name, "closing property fails"));
    } else {
      std::string bad;
      for (unsigned j = 1; j <= d && bad.empty(); ++j)
        if (!r.per_direction[j - 1].is_diagonal())
          bad = "direction " + std::to_string(j) + " relation has " +
                std::to_string(r.per_direction[j - 1].size()) + " pairs";
      out.push_back(verdict(name, bad.empty(), bad));
    }
  }
  {
    std::string bad;
    for (unsigned j = 1; j <= d && bad.empty(); ++j)
      if (!(compute_R_j_reordered(sys, q, j, opts) == r.per_direction[j - 1]))
        bad = "direction " + std::to_string(j) + " differs in the reordered cube set";
    out.push_back(verdict("reordered relations agree", bad.empty(), bad));
  }
  {
    std::string bad;
    std::size_t related = 0;
    for (PointId x = 0; x < sys.size() && bad.empty(); ++x)
      for (PointId y = 0; y < sys.size(); ++y) {
        auto c = ctx.characterize(x, y);
        if (!c.agree()) {
          bad = "conditions disagree at " + pair_str(x, y);
          break;
        }
        related += c.conditions[0];
      }
    std::string name = "five-way characterization";
    std::string detail = bad.empty() ? std::to_string(related) + " related pairs, all conditions agree" : bad;
    if (!minimal)
      out.push_back(unmet(name, "not minimal; " + detail));
    else
      out.push_back(verdict(name, bad.empty(), detail));
  }
  {
    std::string bad;
    const std::size_t w = vertex_count(d);
    for (PointId x = 0; x < sys.size() && bad.empty(); ++x)
      for (PointId y = 0; y < sys.size(); ++y) {
        CubePoint a(w, y), b(w, x);
        a[0] = x;
        b[0] = y;
        if (q.contains(a) != q.contains(b)) {
          bad = "asymmetric at " + pair_str(x, y);
          break;
        }
      }
    std::string name = "reversal symmetry";
    if (!minimal)
      out.push_back(unmet(name, "not minimal; " + (bad.empty() ? std::string("symmetric") : bad)));
    else
      out.push_back(verdict(name, bad.empty(), bad));
  }
  {
    std::string name = "relation is an invariant equivalence";
    if (!minimal)
      out.push_back(unmet(name, "not minimal; " + r.equivalence.describe()));
    else
      out.push_back(verdict(name, r.equivalence.holds(), r.equivalence.describe()));
  }
  {
    std::string name = "maximal closing factor";
    if (!minimal) {
      out.push_back(unmet(name, "not minimal"));
    } else if (!r.equivalence.holds()) {
      out.push_back(fail(name, r.equivalence.describe()));
    } else {
      auto f = maximal_ucpp_factor(sys, opts);
      bool ok = f.ucpp.holds && f.relation_trivial && check_factor_map(f.map).ok();
      out.push_back(verdict(name, ok,
                            "quotient has " + std::to_string(f.map.target.size()) + " points; closing property " +
                                (f.ucpp.holds ? "holds" : "fails") + "; relation " +
                                (f.relation_trivial ? "trivial" : "non-trivial")));
    }
  }
  return out;
}

}  // namespace dcube
