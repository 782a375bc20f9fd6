#include "dcube/structure.hpp"

#include <algorithm>
#include <numeric>

#include "text_util.hpp"

namespace dcube {

namespace {

void check_subgroup(const FiniteZdSystem& sys, const SubgroupSpec& h) {
  if (h.generators.empty() && h.words.empty()) throw InvalidArgument("subgroup needs at least one generator or word");
  for (unsigned g : h.generators)
    if (g < 1 || g > sys.dim()) throw InvalidArgument("subgroup generator out of range");
  for (const auto& w : h.words)
    if (w.size() != sys.dim()) throw InvalidArgument("subgroup word has the wrong length");
}

// Image arrays of the subgroup's generators.
std::vector<std::vector<PointId>> subgroup_perms(const FiniteZdSystem& sys, const SubgroupSpec& h) {
  check_subgroup(sys, h);
  std::vector<std::vector<PointId>> out;
  for (unsigned g : h.generators) out.push_back(sys.perm(g));
  for (const auto& w : h.words) {
    std::vector<PointId> p(sys.size());
    for (PointId x = 0; x < sys.size(); ++x) p[x] = sys.apply_word(w, x);
    out.push_back(std::move(p));
  }
  return out;
}

// Face transformation l of a rooted row (vertex ε at index ε-1).
CubePoint rooted_face(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs, unsigned l,
                      CubeView row) {
  CubePoint out(row.begin(), row.end());
  const std::uint32_t m = std::uint32_t{1} << (l - 1);
  for (std::uint32_t e = 1; e <= row.size(); ++e)
    if (e & m) out[e - 1] = sys.image(dirs[l - 1], row[e - 1]);
  return out;
}

// The rooted cube set with the face action as a finite system.
FiniteZdSystem face_system(const FiniteZdSystem& sys, const TupleSet& k) {
  const unsigned d = sys.dim();
  auto dirs = all_directions(d);
  PermutationData data{k.size(), {}};
  for (unsigned i = 1; i <= d; ++i) {
    std::vector<PointId> p(k.size());
    for (std::size_t r = 0; r < k.size(); ++r) {
      auto idx = k.find(rooted_face(sys, dirs, i, k[r]));
      if (!idx) throw Error("rooted cube set is not invariant under face transformation " + std::to_string(i));
      p[r] = static_cast<PointId>(*idx);
    }
    data.perms.push_back(std::move(p));
  }
  return FiniteZdSystem(std::move(data));
}

CoordinateFactor project_factor(const TupleSet& k, const FiniteZdSystem& y, PointId x0,
                                std::vector<std::uint32_t> vertices) {
  const std::size_t w = std::max<std::size_t>(vertices.size(), 1);
  std::vector<PointId> flat;
  flat.reserve(k.size() * w);
  auto row_of = [&](std::size_t r) {
    CubePoint p;
    if (vertices.empty()) return CubePoint{x0};
    for (auto e : vertices) p.push_back(k[r][e - 1]);
    return p;
  };
  for (std::size_t r = 0; r < k.size(); ++r) {
    auto p = row_of(r);
    flat.insert(flat.end(), p.begin(), p.end());
  }
  auto points = TupleSet::from_flat(w, std::move(flat));
  std::vector<PointId> map(k.size());
  std::vector<std::size_t> rep(points.size(), SIZE_MAX);
  for (std::size_t r = 0; r < k.size(); ++r) {
    map[r] = static_cast<PointId>(*points.find(row_of(r)));
    if (rep[map[r]] == SIZE_MAX) rep[map[r]] = r;
  }
  PermutationData data{points.size(), {}};
  for (unsigned i = 1; i <= y.dim(); ++i) {
    std::vector<PointId> p(points.size());
    for (std::size_t q = 0; q < points.size(); ++q) p[q] = map[y.image(i, static_cast<PointId>(rep[q]))];
    data.perms.push_back(std::move(p));
  }
  return CoordinateFactor{std::move(vertices), std::move(points), FiniteZdSystem(std::move(data)), std::move(map)};
}

std::string show(CubeView a) { return "(" + text::join(a.begin(), a.end()) + ")"; }

}  // namespace

std::string SubgroupSpec::str() const {
  std::string s = "<";
  for (std::size_t i = 0; i < generators.size(); ++i) s += (i ? ",T" : "T") + std::to_string(generators[i]);
  for (std::size_t i = 0; i < words.size(); ++i)
    s += ((i || !generators.empty()) ? ",[" : "[") + text::join_ints(words[i]) + "]";
  return s + ">";
}

SubgroupSpec product(const SubgroupSpec& a, const SubgroupSpec& b) {
  SubgroupSpec out = a;
  out.generators.insert(out.generators.end(), b.generators.begin(), b.generators.end());
  out.words.insert(out.words.end(), b.words.begin(), b.words.end());
  return out;
}

PairRelation compute_QH(const FiniteZdSystem& sys, const SubgroupSpec& h) {
  auto perms = subgroup_perms(sys, h);
  std::vector<PairRelation::Pair> pairs;
  std::vector<std::uint32_t> seen(sys.size(), UINT32_MAX);
  std::vector<PointId> queue;
  for (PointId x = 0; x < sys.size(); ++x) {
    queue.assign(1, x);
    seen[x] = x;
    for (std::size_t q = 0; q < queue.size(); ++q)
      for (const auto& p : perms) {
        PointId y = p[queue[q]];
        if (seen[y] != x) {
          seen[y] = x;
          queue.push_back(y);
        }
      }
    for (auto y : queue) pairs.emplace_back(x, y);
  }
  return PairRelation(sys.size(), std::move(pairs));
}

bool acts_trivially(const FiniteZdSystem& sys, const SubgroupSpec& h) {
  for (const auto& p : subgroup_perms(sys, h))
    for (PointId x = 0; x < sys.size(); ++x)
      if (p[x] != x) return false;
  return true;
}

Z0HFactor maximal_Z0H_factor(const FiniteZdSystem& sys, const SubgroupSpec& h) {
  auto rel = compute_QH(sys, h);
  auto eq = check_equivalence(rel, sys);
  if (!eq.holds()) throw HypothesisUnmet("subgroup relation " + h.str() + ": " + eq.describe());
  auto map = quotient(sys, rel);
  bool trivial = acts_trivially(map.target, h);
  return Z0HFactor{std::move(map), eq, trivial, is_minimal(sys).minimal};
}

PartitionVerdict iterated_quotient_check(const FiniteZdSystem& sys, const SubgroupSpec& h1,
                                         const SubgroupSpec& h2) {
  auto direct = quotient(sys, compute_QH(sys, product(h1, h2)));
  auto first = quotient(sys, compute_QH(sys, h1));
  auto second = quotient(first.target, compute_QH(first.target, h2));
  auto iterated = compose(first, second);
  PartitionVerdict v;
  v.direct_classes = direct.target.size();
  v.iterated_classes = iterated.target.size();
  std::vector<PointId> d_rep(direct.target.size(), UINT32_MAX), i_rep(iterated.target.size(), UINT32_MAX);
  for (PointId x = 0; x < sys.size() && !v.witness; ++x) {
    PointId& a = d_rep[direct.map[x]];
    PointId& b = i_rep[iterated.map[x]];
    if (a == UINT32_MAX) a = x;
    if (b == UINT32_MAX) b = x;
    if (a != b) v.witness = PairRelation::Pair{std::min(a, b), x};
  }
  v.equal = !v.witness;
  return v;
}

std::optional<PairRelation::Pair> kernel_misses(const FactorMap& pi, const PairRelation& rel) {
  for (const auto& [x, y] : rel.pairs())
    if (pi.map.at(x) != pi.map.at(y)) return PairRelation::Pair{x, y};
  return std::nullopt;
}

JoiningDecomposition decompose_unchecked(const FiniteZdSystem& sys, PointId x0, const EngineOptions& opts) {
  const unsigned d = sys.dim();
  auto dirs = all_directions(d);
  auto k = enumerate_K(sys, dirs, x0, opts);
  auto y = face_system(sys, k);
  JoiningDecomposition dec{d, x0, k, y, {}, {}, false, std::nullopt, false, false, false};
  const std::uint32_t top = static_cast<std::uint32_t>(vertex_count(d));
  for (unsigned j = 1; j <= d; ++j) {
    std::vector<std::uint32_t> verts;
    for (std::uint32_t e = 1; e < top; ++e)
      if (!((e >> (j - 1)) & 1U)) verts.push_back(e);
    dec.factors.push_back(project_factor(k, y, x0, std::move(verts)));
  }
  for (unsigned i = 1; i <= d; ++i)
    for (unsigned j = i + 1; j <= d; ++j) {
      std::vector<std::uint32_t> verts;
      for (std::uint32_t e = 1; e < top; ++e)
        if (!((e >> (i - 1)) & 1U) && !((e >> (j - 1)) & 1U)) verts.push_back(e);
      dec.pair_factors.emplace(std::make_pair(i, j), project_factor(k, y, x0, std::move(verts)));
    }

  std::vector<std::pair<std::vector<PointId>, std::size_t>> images(k.size());
  for (std::size_t r = 0; r < k.size(); ++r) {
    for (const auto& f : dec.factors) images[r].first.push_back(f.map[r]);
    images[r].second = r;
  }
  std::sort(images.begin(), images.end());
  dec.injective = true;
  for (std::size_t r = 1; r < images.size(); ++r)
    if (images[r].first == images[r - 1].first) {
      dec.injective = false;
      dec.collision = std::make_pair(images[r - 1].second, images[r].second);
      break;
    }

  auto q = enumerate_Q(sys, dirs, opts);
  auto [b, e] = q.section(x0);
  std::vector<PointId> flat;
  for (std::size_t i = b; i < e; ++i) flat.insert(flat.end(), q[i].begin() + 1, q[i].end());
  dec.section_matches = TupleSet::from_flat(k.width(), std::move(flat)) == k;
  dec.base_minimal = is_minimal(sys).minimal;
  dec.base_ucpp = ucpp_check(q).holds;
  return dec;
}

JoiningDecomposition decompose(const FiniteZdSystem& sys, PointId x0, const EngineOptions& opts) {
  auto dec = decompose_unchecked(sys, x0, opts);
  if (!dec.base_minimal) throw HypothesisUnmet("decomposition needs a minimal system");
  if (!dec.base_ucpp) throw HypothesisUnmet("decomposition needs the closing property");
  return dec;
}

IsomorphismVerdict factor_isomorphism_check(const FiniteZdSystem& sys, PointId x0, unsigned j,
                                            const EngineOptions& opts) {
  const unsigned d = sys.dim();
  if (j < 1 || j > d) throw InvalidArgument("direction out of range");
  auto dirs = all_directions(d);
  auto k = enumerate_K(sys, dirs, x0, opts);
  auto y = face_system(sys, k);
  auto labels = closure_labels(compute_QH(y, SubgroupSpec::of({j})));
  IsomorphismVerdict v;
  v.quotient_size = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (d == 1) {
    // The remaining rooted cube set is a single empty tuple.
    v.target_size = 1;
    v.well_defined = v.surjective = v.equivariant = true;
    v.injective = v.quotient_size == 1;
    if (!v.injective) v.witness = "quotient has " + std::to_string(v.quotient_size) + " classes";
    return v;
  }
  std::vector<unsigned> rest;
  for (unsigned i = 1; i <= d; ++i) if (i != j) rest.push_back(i);
  auto target = enumerate_K(sys, rest, x0, opts);
  v.target_size = target.size();
  const std::uint32_t half = static_cast<std::uint32_t>(vertex_count(d - 1));
  auto reduce = [&](CubeView row) {
    CubePoint out(half - 1);
    for (std::uint32_t eta = 1; eta < half; ++eta) out[eta - 1] = row[insert_bit(eta, j, false) - 1];
    return out;
  };
  std::vector<std::size_t> class_to(v.quotient_size, SIZE_MAX), target_to(target.size(), SIZE_MAX);
  v.well_defined = v.injective = v.equivariant = true;
  for (std::size_t r = 0; r < k.size(); ++r) {
    auto red = reduce(k[r]);
    auto idx = target.find(red);
    if (!idx) {
      v.well_defined = false;
      v.witness = "projection " + show(red) + " of " + show(k[r]) + " is not a rooted cube of the other directions";
      break;
    }
    auto c = labels[r];
    if (class_to[c] == SIZE_MAX) class_to[c] = *idx;
    if (class_to[c] != *idx) {
      v.well_defined = false;
      v.witness = "class of " + show(k[r]) + " projects to two points";
      break;
    }
    if (target_to[*idx] == SIZE_MAX) target_to[*idx] = c;
    if (target_to[*idx] != c) {
      v.injective = false;
      v.witness = "two classes project to " + show(red);
      break;
    }
    for (unsigned l = 1; l <= rest.size() && v.equivariant; ++l) {
      unsigned i = rest[l - 1];
      if (reduce(rooted_face(sys, dirs, i, k[r])) != rooted_face(sys, rest, l, red)) {
        v.equivariant = false;
        v.witness = "projection does not intertwine face transformation " + std::to_string(i);
      }
    }
    if (!v.equivariant) break;
  }
  v.surjective = std::none_of(target_to.begin(), target_to.end(), [](std::size_t c) { return c == SIZE_MAX; });
  if (v.holds() == false && v.witness.empty()) v.witness = "projection is not onto";
  return v;
}

IndependenceVerdict relative_independence_check(const JoiningDecomposition& dec, const FiniteZdSystem& sys,
                                                const EngineOptions& opts) {
  IndependenceVerdict v;
  if (!dec.base_minimal || !dec.base_ucpp) {
    v.status = CheckStatus::HypothesesUnmet;
    return v;
  }
  const unsigned d = dec.d;
  if (d == 1) return v;
  const std::size_t w = dec.k.width();  // 2^d - 1
  const std::uint32_t top = static_cast<std::uint32_t>(w);
  const std::uint32_t half = static_cast<std::uint32_t>(vertex_count(d - 1));
  std::vector<TupleSet> side;
  for (unsigned j = 1; j <= d; ++j) {
    std::vector<unsigned> rest;
    for (unsigned i = 1; i <= d; ++i) if (i != j) rest.push_back(i);
    side.push_back(enumerate_K(sys, rest, dec.x0, opts));
  }
  const unsigned workers = effective_workers(dec.k.size(), opts.threads);
  std::vector<std::optional<std::pair<CubePoint, CubePoint>>> bad(workers);
  std::vector<std::size_t> counts(workers, 0);
  parallel_chunks(dec.k.size(), workers, [&](unsigned wk, std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e && !bad[wk]; ++r) {
      auto x = dec.k[r];
      // Candidate values for each free coordinate [d] \ {j}.
      std::vector<std::vector<PointId>> cand(d);
      for (unsigned j = 1; j <= d; ++j) {
        CubePoint prefix;
        for (std::uint32_t eta = 1; eta + 1 < half; ++eta) prefix.push_back(x[insert_bit(eta, j, false) - 1]);
        auto [lo, hi] = side[j - 1].prefix_range(prefix);
        for (std::size_t s = lo; s < hi; ++s) cand[j - 1].push_back(side[j - 1][s][half - 2]);
      }
      std::vector<std::size_t> pick(d, 0);
      if (std::any_of(cand.begin(), cand.end(), [](const auto& c) { return c.empty(); })) {
        bad[wk] = std::make_pair(CubePoint(x.begin(), x.end()), CubePoint{});
        break;
      }
      while (true) {
        CubePoint y(x.begin(), x.end());
        for (unsigned j = 1; j <= d; ++j) y[(top ^ (std::uint32_t{1} << (j - 1))) - 1] = cand[j - 1][pick[j - 1]];
        ++counts[wk];
        auto [lo, hi] = dec.k.prefix_range(CubeView(y.data(), w - 1));
        if (lo == hi) {
          bad[wk] = std::make_pair(CubePoint(x.begin(), x.end()), y);
          break;
        }
        unsigned l = 0;
        while (l < d && ++pick[l] == cand[l].size()) pick[l++] = 0;
        if (l == d) break;
      }
    }
  });
  for (auto c : counts) v.candidates += c;
  for (auto& b : bad)
    if (b) {
      v.status = CheckStatus::Fail;
      v.witness = b;
      break;
    }
  return v;
}

CheckList structure_battery(const FiniteZdSystem& sys, PointId x0, const EngineOptions& opts) {
  CheckList out;
  const unsigned d = sys.dim();
  const bool minimal = is_minimal(sys).minimal;
  std::vector<SubgroupSpec> groups;
  for (unsigned j = 1; j <= d; ++j) groups.push_back(SubgroupSpec::of({j}));
  if (d > 1) groups.push_back(SubgroupSpec::of(all_directions(d)));
  groups.push_back(SubgroupSpec::trivial(d));

  auto gate = [&](CheckResult r) {
    if (!minimal && r.status != CheckStatus::HypothesesUnmet) {
      r.detail = "not minimal; " + std::string(r.passed() ? "holds anyway" : r.detail);
      r.status = CheckStatus::HypothesesUnmet;
    }
    out.push_back(std::move(r));
  };

  std::vector<std::optional<FactorMap>> maps;
  {
    std::string bad;
    for (const auto& h : groups) {
      auto rel = compute_QH(sys, h);
      auto eq = check_equivalence(rel, sys);
      if (!eq.holds() && bad.empty()) bad = h.str() + ": " + eq.describe();
      maps.push_back(eq.holds() ? std::optional<FactorMap>(quotient(sys, rel)) : std::nullopt);
    }
    gate(verdict("subgroup relations are equivalences", bad.empty(), bad));
  }
  {
    std::string bad;
    for (std::size_t g = 0; g < groups.size(); ++g)
      if (maps[g] && !acts_trivially(maps[g]->target, groups[g]) && bad.empty())
        bad = groups[g].str() + " acts non-trivially on its quotient";
    gate(verdict("subgroup acts trivially on its factor", bad.empty(), bad));
  }
  {
    std::string bad;
    for (const auto& h1 : groups)
      for (const auto& h2 : groups) {
        auto v = iterated_quotient_check(sys, h1, h2);
        if (!v.equal && bad.empty())
          bad = h1.str() + " then " + h2.str() + ": points " + std::to_string(v.witness->first) + " and " +
                std::to_string(v.witness->second) + " split differently";
      }
    gate(verdict("iterated quotients", bad.empty(), bad));
  }
  {
    std::string bad;
    for (const auto& h : groups) {
      auto rel = compute_QH(sys, h);
      for (std::size_t g = 0; g < groups.size(); ++g)
        if (maps[g] && acts_trivially(maps[g]->target, h))
          if (auto miss = kernel_misses(*maps[g], rel); miss && bad.empty())
            bad = "factor by " + groups[g].str() + " separates " + std::to_string(miss->first) + " and " +
                  std::to_string(miss->second) + " related by " + h.str();
    }
    gate(verdict("factor universality", bad.empty(), bad));
  }

  auto dec = decompose_unchecked(sys, x0, opts);
  const bool hyp = dec.base_minimal && dec.base_ucpp;
  auto decomp_check = [&](std::string name, bool ok, std::string detail) {
    if (!hyp)
      out.push_back(unmet(std::move(name), std::string(dec.base_minimal ? "closing property fails" : "not minimal")));
    else
      out.push_back(verdict(std::move(name), ok, std::move(detail)));
  };
  {
    std::string sizes = "|Y|=" + std::to_string(dec.k.size());
    for (unsigned j = 1; j <= d; ++j) sizes += " |Y_" + std::to_string(j) + "|=" + std::to_string(dec.factors[j - 1].points.size());
    decomp_check("joining embedding injective", dec.injective,
                 dec.injective ? sizes : "rows " + std::to_string(dec.collision->first) + " and " +
                                             std::to_string(dec.collision->second) + " collide");
  }
  out.push_back(verdict("rooted cubes equal the section", dec.section_matches, ""));
  {
    std::string bad;
    for (unsigned j = 1; j <= d; ++j)
      for (PointId p = 0; p < dec.factors[j - 1].system.size(); ++p)
        if (dec.factors[j - 1].system.image(j, p) != p && bad.empty())
          bad = "T" + std::to_string(j) + " moves a point of its factor";
    out.push_back(verdict("direction acts trivially on its factor", bad.empty(), bad));
  }
  {
    std::string bad;
    for (unsigned j = 1; j <= d; ++j) {
      auto v = factor_isomorphism_check(sys, x0, j, opts);
      if (!v.holds() && bad.empty()) bad = "direction " + std::to_string(j) + ": " + v.witness;
    }
    decomp_check("face quotient isomorphisms", bad.empty(), bad);
  }
  {
    auto v = relative_independence_check(dec, sys, opts);
    std::string detail = std::to_string(v.candidates) + " candidates";
    if (v.witness) detail = "candidate " + show(v.witness->second) + " for " + show(v.witness->first) + " is not a rooted cube";
    decomp_check("relative independence", v.status == CheckStatus::Pass, detail);
  }
  {
    auto yq = enumerate_Q(dec.y, opts);
    decomp_check("joining system has the closing property", ucpp_check(yq).holds, "");
  }
  return out;
}

}  // namespace dcube
