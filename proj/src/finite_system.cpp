#include "dcube/finite_system.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "dcube/hypercube.hpp"
#include "text_util.hpp"

namespace dcube {

namespace {

std::string gen_name(unsigned i) { return "T" + std::to_string(i); }

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ValidationReport validate(const PermutationData& data) {
  ValidationReport rep;
  const std::size_t n = data.n_points;
  if (n == 0) rep.problems.push_back("point set is empty");
  if (data.perms.empty() || data.perms.size() > kMaxDim)
    rep.problems.push_back("number of generators must lie in [1, " + std::to_string(kMaxDim) + "]");
  for (unsigned i = 1; i <= data.perms.size(); ++i) {
    const auto& p = data.perms[i - 1];
    std::string bad;
    if (p.size() != n) {
      bad = gen_name(i) + " has " + std::to_string(p.size()) + " entries, expected " +
            std::to_string(n);
    } else {
      std::vector<bool> hit(n, false);
      for (std::size_t x = 0; x < n && bad.empty(); ++x) {
        if (p[x] >= n)
          bad = gen_name(i) + " maps " + std::to_string(x) + " outside the point set";
        else if (hit[p[x]])
          bad = gen_name(i) + " is not injective: " + std::to_string(p[x]) + " is hit twice";
        else
          hit[p[x]] = true;
      }
    }
    if (!bad.empty()) {
      rep.problems.push_back(bad);
      if (!rep.bad_generator) rep.bad_generator = i;
    }
  }
  if (rep.bad_generator || !rep.problems.empty()) return rep;

  for (unsigned i = 1; i <= data.perms.size() && !rep.commutation; ++i) {
    for (unsigned j = i + 1; j <= data.perms.size() && !rep.commutation; ++j) {
      const auto& a = data.perms[i - 1];
      const auto& b = data.perms[j - 1];
      for (PointId x = 0; x < n; ++x) {
        if (a[b[x]] != b[a[x]]) {
          rep.commutation = CommutationFailure{i, j, x, a[b[x]], b[a[x]]};
          rep.problems.push_back(gen_name(i) + " and " + gen_name(j) + " do not commute at point " +
                                 std::to_string(x) + ": " + gen_name(i) + gen_name(j) + " -> " +
                                 std::to_string(a[b[x]]) + ", " + gen_name(j) + gen_name(i) +
                                 " -> " + std::to_string(b[a[x]]));
          break;
        }
      }
    }
  }

  for (const auto& p : data.perms) {
    std::vector<bool> seen(n, false);
    std::uint64_t order = 1;
    for (std::size_t s = 0; s < n; ++s) {
      if (seen[s]) continue;
      std::uint64_t len = 0;
      for (std::size_t x = s; !seen[x]; x = p[x]) {
        seen[x] = true;
        ++len;
      }
      std::uint64_t g = std::gcd(order, len);
      if (order / g > UINT64_MAX / len) throw OverflowError("generator order overflows 64 bits");
      order = order / g * len;
    }
    rep.orders.push_back(order);
  }
  return rep;
}

FiniteZdSystem::FiniteZdSystem(PermutationData data) : data_(std::move(data)) {
  auto rep = validate(data_);
  if (!rep.valid()) throw InvalidArgument("invalid system: " + rep.problems.front());
  orders_ = rep.orders;
  const std::size_t n = data_.n_points;
  for (const auto& p : data_.perms) {
    CycleIndex ci;
    ci.cycle_of.assign(n, UINT32_MAX);
    ci.pos.assign(n, 0);
    ci.members.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
      if (ci.cycle_of[s] != UINT32_MAX) continue;
      auto c = static_cast<std::uint32_t>(ci.start.size());
      ci.start.push_back(static_cast<std::uint32_t>(ci.members.size()));
      std::uint32_t k = 0;
      for (std::size_t x = s; ci.cycle_of[x] == UINT32_MAX; x = p[x]) {
        ci.cycle_of[x] = c;
        ci.pos[x] = k++;
        ci.members.push_back(static_cast<PointId>(x));
      }
    }
    ci.start.push_back(static_cast<std::uint32_t>(ci.members.size()));
    cycles_.push_back(std::move(ci));
  }
}

FiniteZdSystem FiniteZdSystem::rotation(std::size_t n, const std::vector<std::int64_t>& shifts) {
  PermutationData data{n, {}};
  auto sn = static_cast<std::int64_t>(n);
  for (auto s : shifts) {
    std::vector<PointId> p(n);
    for (std::size_t x = 0; x < n; ++x)
      p[x] = static_cast<PointId>(((static_cast<std::int64_t>(x) + s) % sn + sn) % sn);
    data.perms.push_back(std::move(p));
  }
  return FiniteZdSystem(std::move(data));
}

FiniteZdSystem FiniteZdSystem::torus(const std::vector<std::uint64_t>& moduli,
                                     const std::vector<std::vector<std::int64_t>>& shifts) {
  std::size_t n = 1;
  for (auto m : moduli) n *= m;
  PermutationData data{n, {}};
  for (const auto& s : shifts) {
    if (s.size() != moduli.size()) throw InvalidArgument("torus shift has wrong length");
    std::vector<PointId> p(n);
    for (std::size_t x = 0; x < n; ++x) {
      std::size_t rest = x, out = 0, weight = 1;
      for (std::size_t c = moduli.size(); c-- > 0;) {
        auto m = static_cast<std::int64_t>(moduli[c]);
        auto a = static_cast<std::int64_t>(rest % moduli[c]);
        rest /= moduli[c];
        out += static_cast<std::size_t>(((a + s[c]) % m + m) % m) * weight;
        weight *= moduli[c];
      }
      p[x] = static_cast<PointId>(out);
    }
    data.perms.push_back(std::move(p));
  }
  return FiniteZdSystem(std::move(data));
}

void FiniteZdSystem::check_point(PointId x) const {
  if (x >= size())
    throw InvalidArgument("point id " + std::to_string(x) + " out of range (n=" +
                          std::to_string(size()) + ")");
}

PointId FiniteZdSystem::power(unsigned i, std::int64_t k, PointId x) const {
  const auto& ci = cycles_[i - 1];
  std::uint32_t c = ci.cycle_of[x];
  auto len = static_cast<std::int64_t>(ci.start[c + 1] - ci.start[c]);
  std::int64_t p = (static_cast<std::int64_t>(ci.pos[x]) + k % len + len) % len;
  return ci.members[ci.start[c] + static_cast<std::size_t>(p)];
}

PointId FiniteZdSystem::apply_word(std::span<const std::int64_t> n, PointId x) const {
  if (n.size() != dim()) throw InvalidArgument("word length differs from system dimension");
  check_point(x);
  for (unsigned i = 1; i <= dim(); ++i) x = power(i, n[i - 1], x);
  return x;
}

PointId apply_word(const FiniteZdSystem& sys, std::span<const std::int64_t> n, PointId x) {
  return sys.apply_word(n, x);
}

std::vector<PointId> orbit(const FiniteZdSystem& sys, PointId x) {
  sys.check_point(x);
  std::vector<bool> seen(sys.size(), false);
  std::vector<PointId> queue{x};
  seen[x] = true;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    for (unsigned i = 1; i <= sys.dim(); ++i) {
      PointId y = sys.image(i, queue[h]);
      if (!seen[y]) {
        seen[y] = true;
        queue.push_back(y);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

MinimalityResult is_minimal(const FiniteZdSystem& sys) {
  MinimalityResult r;
  r.orbit_size = orbit(sys, 0).size();
  r.minimal = r.orbit_size == sys.size();
  if (!r.minimal) r.witness = 0;
  return r;
}

PairRelation::PairRelation(std::size_t n, std::vector<Pair> pairs) : n_(n), pairs_(std::move(pairs)) {
  for (const auto& [x, y] : pairs_)
    if (x >= n || y >= n) throw InvalidArgument("relation pair out of range");
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

PairRelation PairRelation::diagonal(std::size_t n) {
  std::vector<Pair> p;
  for (PointId x = 0; x < n; ++x) p.emplace_back(x, x);
  return PairRelation(n, std::move(p));
}

PairRelation PairRelation::full(std::size_t n) {
  std::vector<Pair> p;
  for (PointId x = 0; x < n; ++x)
    for (PointId y = 0; y < n; ++y) p.emplace_back(x, y);
  return PairRelation(n, std::move(p));
}

bool PairRelation::contains(PointId x, PointId y) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), Pair{x, y});
}

std::span<const PairRelation::Pair> PairRelation::row(PointId x) const {
  auto lo = std::lower_bound(pairs_.begin(), pairs_.end(), Pair{x, 0});
  auto hi = std::lower_bound(lo, pairs_.end(), Pair{x + 1, 0});
  return {pairs_.data() + (lo - pairs_.begin()), static_cast<std::size_t>(hi - lo)};
}

bool PairRelation::is_diagonal() const { return *this == diagonal(n_); }

PairRelation PairRelation::intersect(const PairRelation& other) const {
  if (other.n_ != n_) throw InvalidArgument("relations over different point sets");
  std::vector<Pair> out;
  std::set_intersection(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end(),
                        std::back_inserter(out));
  return PairRelation(n_, std::move(out));
}

std::vector<PointId> closure_labels(const PairRelation& rel) {
  DisjointSets ds(rel.base_size());
  for (const auto& [x, y] : rel.pairs()) ds.unite(x, y);
  std::vector<PointId> label(rel.base_size());
  std::vector<PointId> root_label(rel.base_size(), UINT32_MAX);
  PointId next = 0;
  for (std::size_t x = 0; x < rel.base_size(); ++x) {
    auto r = ds.find(x);
    if (root_label[r] == UINT32_MAX) root_label[r] = next++;
    label[x] = root_label[r];
  }
  return label;
}

FactorMapReport check_factor_map(const FactorMap& pi) {
  FactorMapReport rep;
  rep.dims_match = pi.source.dim() == pi.target.dim();
  rep.total = pi.map.size() == pi.source.size() &&
              std::all_of(pi.map.begin(), pi.map.end(),
                          [&](PointId y) { return y < pi.target.size(); });
  if (!rep.total) return rep;
  std::vector<bool> hit(pi.target.size(), false);
  for (auto y : pi.map) hit[y] = true;
  auto miss = std::find(hit.begin(), hit.end(), false);
  rep.surjective = miss == hit.end();
  if (!rep.surjective) rep.missed_target = static_cast<PointId>(miss - hit.begin());
  if (!rep.dims_match) return rep;
  rep.equivariant = true;
  for (unsigned i = 1; i <= pi.source.dim() && rep.equivariant; ++i) {
    for (PointId x = 0; x < pi.source.size(); ++x) {
      if (pi.map[pi.source.image(i, x)] != pi.target.image(i, pi.map[x])) {
        rep.equivariant = false;
        rep.equivariance_failure = EquivarianceFailure{i, x};
        break;
      }
    }
  }
  return rep;
}

PairRelation kernel(const FactorMap& pi) {
  std::vector<std::vector<PointId>> fibres(pi.target.size());
  for (PointId x = 0; x < pi.map.size(); ++x) fibres.at(pi.map[x]).push_back(x);
  std::vector<PairRelation::Pair> pairs;
  for (const auto& f : fibres)
    for (auto x : f)
      for (auto y : f) pairs.emplace_back(x, y);
  return PairRelation(pi.source.size(), std::move(pairs));
}

FactorMap compose(const FactorMap& first, const FactorMap& second) {
  if (!(first.target == second.source)) throw InvalidArgument("factor maps do not compose");
  std::vector<PointId> m(first.map.size());
  for (std::size_t x = 0; x < m.size(); ++x) m[x] = second.map.at(first.map[x]);
  return FactorMap{first.source, second.target, std::move(m)};
}

InvarianceError::InvarianceError(const InvarianceFailure& f)
    : Error("relation is not invariant: " + std::to_string(f.x) + " ~ " + std::to_string(f.y) +
            " but their images under " + gen_name(f.generator) + " are not related"),
      failure_(f) {}

FactorMap quotient(const FiniteZdSystem& sys, const PairRelation& rel) {
  if (rel.base_size() != sys.size()) throw InvalidArgument("relation does not match the system");
  auto label = closure_labels(rel);
  std::size_t classes = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  std::vector<PointId> rep(classes, UINT32_MAX);
  for (PointId x = 0; x < sys.size(); ++x)
    if (rep[label[x]] == UINT32_MAX) rep[label[x]] = x;

  PermutationData q{classes, {}};
  for (unsigned i = 1; i <= sys.dim(); ++i) {
    std::vector<PointId> p(classes);
    for (std::size_t c = 0; c < classes; ++c) p[c] = label[sys.image(i, rep[c])];
    for (PointId x = 0; x < sys.size(); ++x)
      if (label[sys.image(i, x)] != p[label[x]])
        throw InvarianceError(InvarianceFailure{rep[label[x]], x, i});
    q.perms.push_back(std::move(p));
  }
  return FactorMap{sys, FiniteZdSystem(std::move(q)), std::move(label)};
}

ParsedSystem parse_system(std::string_view text) {
  auto lines = text::logical_lines(text);
  if (lines.empty() || lines.front().text != "finite-system")
    throw ParseError(lines.empty() ? 1 : lines.front().number, "expected 'finite-system' header");
  std::optional<std::uint64_t> points, d;
  std::vector<std::optional<std::vector<PointId>>> perms;
  std::vector<std::size_t> perm_lines;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    auto [key, value] = text::split_assignment(line);
    if (key == "points") {
      if (points) throw ParseError(line.number, "duplicate 'points'");
      points = text::parse_uint(value, line.number);
    } else if (key == "d") {
      if (d) throw ParseError(line.number, "duplicate 'd'");
      d = text::parse_uint(value, line.number);
      if (*d < 1 || *d > kMaxDim)
        throw ParseError(line.number, "d must lie in [1, " + std::to_string(kMaxDim) + "]");
    } else if (key.size() > 1 && key[0] == 'T') {
      auto idx = text::parse_uint(key.substr(1), line.number);
      if (idx < 1 || idx > kMaxDim) throw ParseError(line.number, "generator index out of range");
      std::vector<PointId> img;
      for (auto item : text::parse_bracket_items(value, line.number)) {
        auto v = text::parse_uint(item, line.number);
        if (v > UINT32_MAX) throw ParseError(line.number, "point id too large");
        img.push_back(static_cast<PointId>(v));
      }
      if (perms.size() < idx) {
        perms.resize(idx);
        perm_lines.resize(idx, 0);
      }
      if (perms[idx - 1]) throw ParseError(line.number, "duplicate " + std::string(key));
      perms[idx - 1] = std::move(img);
      perm_lines[idx - 1] = line.number;
    } else {
      throw ParseError(line.number, "unknown directive '" + std::string(key) + "'");
    }
  }
  std::size_t last = lines.back().number;
  if (!points) throw ParseError(last, "missing 'points'");
  if (!d) throw ParseError(last, "missing 'd'");
  for (std::size_t i = *d; i < perms.size(); ++i)
    if (perms[i]) throw ParseError(perm_lines[i], "generator T" + std::to_string(i + 1) + " exceeds d");
  ParsedSystem out;
  out.data.n_points = *points;
  for (std::size_t i = 0; i < *d; ++i) {
    if (i >= perms.size() || !perms[i]) throw ParseError(last, "missing T" + std::to_string(i + 1));
    out.data.perms.push_back(std::move(*perms[i]));
    out.generator_lines.push_back(perm_lines[i]);
  }
  return out;
}

FiniteZdSystem load_system(std::string_view text) {
  auto parsed = parse_system(text);
  auto rep = validate(parsed.data);
  if (!rep.valid()) {
    std::size_t line = 0;
    if (rep.bad_generator)
      line = parsed.generator_lines[*rep.bad_generator - 1];
    else if (rep.commutation)
      line = std::max(parsed.generator_lines[rep.commutation->i - 1],
                      parsed.generator_lines[rep.commutation->j - 1]);
    throw ParseError(line, rep.problems.front());
  }
  return FiniteZdSystem(std::move(parsed.data));
}

std::string format_system(const FiniteZdSystem& sys) {
  std::ostringstream os;
  os << "finite-system\npoints = " << sys.size() << "\nd = " << sys.dim() << "\n";
  for (unsigned i = 1; i <= sys.dim(); ++i)
    os << "T" << i << " = [" << text::join(sys.perm(i).begin(), sys.perm(i).end()) << "]\n";
  return os.str();
}

PairRelation parse_relation(std::string_view text) {
  auto lines = text::logical_lines(text);
  if (lines.empty()) throw ParseError(1, "expected 'pair-relation' header");
  auto fields = text::parse_header(lines.front(), "pair-relation");
  if (fields.size() != 1 || !fields.count("n"))
    throw ParseError(lines.front().number, "pair-relation header needs exactly n=<N>");
  auto n = text::parse_uint(fields["n"], lines.front().number);
  std::vector<PairRelation::Pair> pairs;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    auto v = text::parse_csv_ints(lines[k].text, lines[k].number);
    if (v.size() != 2) throw ParseError(lines[k].number, "expected 'x,y'");
    for (auto c : v)
      if (c < 0 || static_cast<std::uint64_t>(c) >= n)
        throw ParseError(lines[k].number, "point id out of range");
    pairs.emplace_back(static_cast<PointId>(v[0]), static_cast<PointId>(v[1]));
  }
  return PairRelation(n, std::move(pairs));
}

std::string format_relation(const PairRelation& rel) {
  std::ostringstream os;
  os << "pair-relation n=" << rel.base_size() << "\n";
  for (const auto& [x, y] : rel.pairs()) os << x << "," << y << "\n";
  return os.str();
}

}  // namespace dcube
