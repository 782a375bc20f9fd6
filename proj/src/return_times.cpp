#include "dcube/return_times.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "dcube/cube_engine.hpp"
#include "dcube/structure.hpp"
#include "text_util.hpp"

namespace dcube {

namespace {

std::uint64_t cell_count(const std::vector<std::uint64_t>& moduli) {
  std::uint64_t n = 1;
  for (auto m : moduli) {
    if (m == 0) throw InvalidArgument("moduli must be positive");
    if (n > PeriodicSet::kMaxCells / m)
      throw SizeLimitExceeded("periodic set has more than " + std::to_string(PeriodicSet::kMaxCells) + " cells");
    n *= m;
  }
  return n;
}

std::uint64_t checked_lcm(std::uint64_t a, std::uint64_t b) {
  std::uint64_t g = std::gcd(a, b), r;
  if (__builtin_mul_overflow(a / g, b, &r)) throw OverflowError("modulus lcm overflows");
  return r;
}

void decode(std::uint64_t code, const std::vector<std::uint64_t>& moduli, std::int64_t* out) {
  for (std::size_t i = moduli.size(); i-- > 0;) {
    out[i] = static_cast<std::int64_t>(code % moduli[i]);
    code /= moduli[i];
  }
}

std::vector<std::int64_t> remove_at(std::span<const std::int64_t> n, unsigned j) {
  std::vector<std::int64_t> out;
  for (unsigned i = 0; i < n.size(); ++i)
    if (i + 1 != j) out.push_back(n[i]);
  return out;
}

std::vector<std::uint8_t> membership(const FiniteZdSystem& sys, std::span<const PointId> u) {
  std::vector<std::uint8_t> in(sys.size(), 0);
  for (auto p : u) {
    sys.check_point(p);
    in[p] = 1;
  }
  return in;
}

bool has_closing_property(const FiniteZdSystem& sys, const EngineOptions& opts) {
  return ucpp_check(enumerate_Q(sys, opts)).holds;
}

ContainmentVerdict containment_from(const JoiningDecomposition& dec, const FiniteZdSystem& sys, PointId x,
                                    std::span<const PointId> u, const EngineOptions& opts) {
  ContainmentVerdict v;
  v.hypotheses_met = true;
  auto row = dec.k.find(CubePoint(dec.k.width(), x));
  if (!row) throw Error("constant cube is missing from the rooted cube set");
  for (unsigned j = 1; j <= dec.d; ++j) {
    const auto& f = dec.factors[j - 1];
    PointId y = f.map[*row];
    v.lift.push_back(y);
    const PointId single[] = {y};
    v.parts.push_back(drop_coordinate(return_set(f.system, y, single, opts), j));
  }
  v.joining = d_joining(v.parts, opts);
  v.returns = return_set(sys, x, u, opts);
  v.witness = first_outside(v.joining, v.returns);
  v.contained = !v.witness;
  return v;
}

std::vector<RealizationFactor> factors_of(const JoiningDecomposition& dec, PointId x) {
  auto row = dec.k.find(CubePoint(dec.k.width(), x));
  if (!row) throw Error("constant cube is missing from the rooted cube set");
  std::vector<RealizationFactor> out;
  for (const auto& f : dec.factors) out.push_back({f.system, f.map[*row], {f.map[*row]}});
  return out;
}

}  // namespace

PeriodicSet::PeriodicSet(CellsTag, std::vector<std::uint64_t> moduli, std::vector<std::uint8_t> cells)
    : moduli_(std::move(moduli)), cells_(std::move(cells)) {
  canonicalize();
}

PeriodicSet::PeriodicSet(std::vector<std::uint64_t> moduli, const std::vector<std::vector<std::int64_t>>& residues)
    : moduli_(std::move(moduli)), cells_(cell_count(moduli_), 0) {
  for (const auto& r : residues) {
    if (r.size() != moduli_.size()) throw InvalidArgument("residue vector has the wrong length");
    cells_[code(r)] = 1;
  }
  canonicalize();
}

PeriodicSet PeriodicSet::full(unsigned k) { return PeriodicSet(CellsTag{}, std::vector<std::uint64_t>(k, 1), {1}); }
PeriodicSet PeriodicSet::empty(unsigned k) { return PeriodicSet(CellsTag{}, std::vector<std::uint64_t>(k, 1), {0}); }

PeriodicSet PeriodicSet::from_predicate(std::vector<std::uint64_t> moduli,
                                        const std::function<bool(std::span<const std::int64_t>)>& member,
                                        const EngineOptions& opts) {
  const std::uint64_t n = cell_count(moduli);
  std::vector<std::uint8_t> cells(n, 0);
  parallel_chunks(n, effective_workers(n, opts.threads), [&](unsigned, std::size_t b, std::size_t e) {
    std::vector<std::int64_t> digits(moduli.size());
    if (b < e) decode(b, moduli, digits.data());
    for (std::size_t c = b; c < e; ++c) {
      cells[c] = member(digits) ? 1 : 0;
      for (std::size_t i = moduli.size(); i-- > 0;) {
        if (static_cast<std::uint64_t>(++digits[i]) < moduli[i]) break;
        digits[i] = 0;
      }
    }
  });
  return PeriodicSet(CellsTag{}, std::move(moduli), std::move(cells));
}

std::uint64_t PeriodicSet::code(std::span<const std::int64_t> n) const {
  if (n.size() != moduli_.size()) throw InvalidArgument("vector has the wrong dimension");
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    auto m = static_cast<std::int64_t>(moduli_[i]);
    c = c * moduli_[i] + static_cast<std::uint64_t>(((n[i] % m) + m) % m);
  }
  return c;
}

void PeriodicSet::canonicalize() {
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    const std::uint64_t m = moduli_[i];
    std::uint64_t stride = 1;
    for (std::size_t l = i + 1; l < moduli_.size(); ++l) stride *= moduli_[l];
    const std::uint64_t block = m * stride;
    auto invariant = [&](std::uint64_t p) {
      for (std::uint64_t c = 0; c < cells_.size(); ++c) {
        std::uint64_t digit = (c / stride) % m;
        std::uint64_t shifted = c - digit * stride + ((digit + p) % m) * stride;
        if (cells_[c] != cells_[shifted]) return false;
      }
      return true;
    };
    std::uint64_t period = m;
    for (std::uint64_t p = 1; p < m; ++p)
      if (m % p == 0 && invariant(p)) {
        period = p;
        break;
      }
    if (period == m) continue;
    std::vector<std::uint8_t> reduced;
    reduced.reserve(cells_.size() / m * period);
    for (std::uint64_t base = 0; base < cells_.size(); base += block)
      reduced.insert(reduced.end(), cells_.begin() + static_cast<std::ptrdiff_t>(base),
                     cells_.begin() + static_cast<std::ptrdiff_t>(base + period * stride));
    cells_ = std::move(reduced);
    moduli_[i] = period;
  }
}

std::size_t PeriodicSet::residue_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

std::vector<std::vector<std::int64_t>> PeriodicSet::residues() const {
  std::vector<std::vector<std::int64_t>> out;
  for (std::uint64_t c = 0; c < cells_.size(); ++c)
    if (cells_[c]) {
      out.emplace_back(moduli_.size());
      decode(c, moduli_, out.back().data());
    }
  return out;
}

bool PeriodicSet::contains(std::span<const std::int64_t> n) const { return cells_[code(n)] != 0; }

namespace {

std::vector<std::uint64_t> common_moduli(const PeriodicSet& a, const PeriodicSet& b) {
  if (a.k() != b.k()) throw InvalidArgument("periodic sets have different dimensions");
  std::vector<std::uint64_t> m(a.k());
  for (unsigned i = 0; i < a.k(); ++i) m[i] = checked_lcm(a.moduli()[i], b.moduli()[i]);
  return m;
}

}  // namespace

PeriodicSet intersect(const PeriodicSet& a, const PeriodicSet& b) {
  return PeriodicSet::from_predicate(common_moduli(a, b),
                                     [&](std::span<const std::int64_t> n) { return a.contains(n) && b.contains(n); });
}

bool intersects(const PeriodicSet& a, const PeriodicSet& b) { return !intersect(a, b).empty(); }

std::optional<std::vector<std::int64_t>> first_outside(const PeriodicSet& a, const PeriodicSet& b) {
  auto m = common_moduli(a, b);
  const std::uint64_t n = cell_count(m);
  std::vector<std::int64_t> digits(m.size());
  for (std::uint64_t c = 0; c < n; ++c) {
    decode(c, m, digits.data());
    if (a.contains(digits) && !b.contains(digits)) return digits;
  }
  return std::nullopt;
}

bool is_subset(const PeriodicSet& a, const PeriodicSet& b) { return !first_outside(a, b); }

PeriodicSet cartesian_product(const PeriodicSet& a, const PeriodicSet& b) {
  auto m = a.moduli();
  m.insert(m.end(), b.moduli().begin(), b.moduli().end());
  return PeriodicSet::from_predicate(std::move(m), [&](std::span<const std::int64_t> n) {
    return a.contains(n.first(a.k())) && b.contains(n.subspan(a.k()));
  });
}

PeriodicSet drop_coordinate(const PeriodicSet& s, unsigned j) {
  if (j < 1 || j > s.k()) throw InvalidArgument("coordinate out of range");
  if (s.moduli()[j - 1] != 1)
    throw InvalidArgument("set depends on coordinate " + std::to_string(j));
  std::vector<std::uint64_t> m;
  for (unsigned i = 0; i < s.k(); ++i)
    if (i + 1 != j) m.push_back(s.moduli()[i]);
  return PeriodicSet::from_predicate(std::move(m), [&](std::span<const std::int64_t> n) {
    std::vector<std::int64_t> full(n.begin(), n.end());
    full.insert(full.begin() + (j - 1), 0);
    return s.contains(full);
  });
}

bool contains_zero_vector(const PeriodicSet& s) { return s.contains(std::vector<std::int64_t>(s.k(), 0)); }

PeriodicSet d_joining(std::span<const PeriodicSet> sets, const EngineOptions& opts) {
  const unsigned d = static_cast<unsigned>(sets.size());
  if (d == 0) throw InvalidArgument("joining needs at least one set");
  for (const auto& s : sets)
    if (s.k() != d - 1) throw InvalidArgument("joining of " + std::to_string(d) + " sets needs dimension " + std::to_string(d - 1));
  std::vector<std::uint64_t> m(d, 1);
  for (unsigned i = 0; i < d; ++i)
    for (unsigned l = 0; l < d; ++l)
      if (l != i) m[l] = checked_lcm(m[l], sets[i].moduli()[l < i ? l : l - 1]);
  return PeriodicSet::from_predicate(
      std::move(m),
      [&](std::span<const std::int64_t> n) {
        for (unsigned i = 0; i < d; ++i)
          if (!sets[i].contains(remove_at(n, i + 1))) return false;
        return true;
      },
      opts);
}

PeriodicSet phi_image(const PeriodicSet& s) {
  if (s.k() == 0) throw InvalidArgument("coordinate sum needs at least one coordinate");
  // Adding m_i to n_i keeps n in s, so the image is periodic mod the gcd.
  std::uint64_t g = 0;
  for (auto m : s.moduli()) g = std::gcd(g, m);
  std::vector<std::vector<std::int64_t>> sums;
  for (const auto& r : s.residues()) sums.push_back({std::accumulate(r.begin(), r.end(), std::int64_t{0})});
  return PeriodicSet({g}, sums);
}

PeriodicSet return_set(const FiniteZdSystem& sys, PointId x, std::span<const PointId> u,
                       const EngineOptions& opts) {
  sys.check_point(x);
  auto in = membership(sys, u);
  return PeriodicSet::from_predicate(
      sys.orders(), [&](std::span<const std::int64_t> n) { return in[sys.apply_word(n, x)] != 0; }, opts);
}

ContainmentVerdict joining_containment_check(const FiniteZdSystem& sys, PointId x, std::span<const PointId> u,
                                             const EngineOptions& opts) {
  sys.check_point(x);
  if (!membership(sys, u)[x]) throw InvalidArgument("the neighborhood must contain the point");
  if (!is_minimal(sys).minimal || !has_closing_property(sys, opts)) return ContainmentVerdict{};
  return containment_from(decompose_unchecked(sys, x, opts), sys, x, u, opts);
}

ProductRealization product_system_realization(const std::vector<RealizationFactor>& factors,
                                              const EngineOptions& opts) {
  const unsigned d = static_cast<unsigned>(factors.size());
  if (d == 0 || d > kMaxDim) throw InvalidArgument("realization needs between 1 and " + std::to_string(kMaxDim) + " factors");
  for (unsigned j = 1; j <= d; ++j) {
    const auto& f = factors[j - 1];
    if (f.system.dim() != d) throw InvalidArgument("factor " + std::to_string(j) + " has the wrong dimension");
    f.system.check_point(f.point);
    membership(f.system, f.nbhd);
    const auto& tj = f.system.perm(j);
    for (PointId p = 0; p < tj.size(); ++p)
      if (tj[p] != p) throw InvalidArgument("T" + std::to_string(j) + " must act trivially on factor " + std::to_string(j));
  }

  std::vector<PointId> start;
  for (const auto& f : factors) start.push_back(f.point);
  std::map<std::vector<PointId>, PointId> seen{{start, 0}};
  std::vector<std::vector<PointId>> queue{start};
  for (std::size_t q = 0; q < queue.size(); ++q)
    for (unsigned i = 1; i <= d; ++i) {
      auto next = queue[q];
      for (unsigned j = 0; j < d; ++j) next[j] = factors[j].system.image(i, next[j]);
      if (seen.emplace(next, 0).second) {
        if (seen.size() > opts.max_tuples) throw SizeLimitExceeded("product orbit exceeds the size cap");
        queue.push_back(std::move(next));
      }
    }
  std::vector<std::vector<PointId>> tuples;
  for (auto& [t, id] : seen) {
    id = static_cast<PointId>(tuples.size());
    tuples.push_back(t);
  }
  PermutationData data{tuples.size(), {}};
  for (unsigned i = 1; i <= d; ++i) {
    std::vector<PointId> p(tuples.size());
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      auto next = tuples[t];
      for (unsigned j = 0; j < d; ++j) next[j] = factors[j].system.image(i, next[j]);
      p[t] = seen.at(next);
    }
    data.perms.push_back(std::move(p));
  }

  ProductRealization out{FiniteZdSystem(std::move(data)), seen.at(start), {}, {}, {}, {}, false, false};
  std::vector<std::vector<std::uint8_t>> in;
  for (const auto& f : factors) in.push_back(membership(f.system, f.nbhd));
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    bool inside = true;
    for (unsigned j = 0; j < d && inside; ++j) inside = in[j][tuples[t][j]] != 0;
    if (inside) out.nbhd.push_back(static_cast<PointId>(t));
  }
  for (unsigned j = 1; j <= d; ++j) {
    const auto& f = factors[j - 1];
    out.parts.push_back(drop_coordinate(return_set(f.system, f.point, f.nbhd, opts), j));
  }
  out.returns = return_set(out.system, out.point, out.nbhd, opts);
  out.joining = d_joining(out.parts, opts);
  out.equal = out.returns == out.joining;
  out.ucpp = has_closing_property(out.system, opts);
  return out;
}

PeriodicSet parse_periodic_set(std::string_view text) {
  auto lines = text::logical_lines(text);
  if (lines.empty()) throw ParseError(1, "expected 'periodic-set' header");
  auto fields = text::parse_header(lines.front(), "periodic-set");
  const auto hl = lines.front().number;
  if (fields.size() != 2 || !fields.count("k") || !fields.count("moduli"))
    throw ParseError(hl, "periodic-set header needs k=<K> and moduli=<m1,...,mK>");
  auto k = text::parse_uint(fields["k"], hl);
  if (k > 16) throw ParseError(hl, "k must be at most 16");
  std::vector<std::uint64_t> moduli;
  if (!fields["moduli"].empty())
    for (auto m : text::parse_csv_ints(fields["moduli"], hl)) {
      if (m <= 0) throw ParseError(hl, "moduli must be positive");
      moduli.push_back(static_cast<std::uint64_t>(m));
    }
  if (moduli.size() != k) throw ParseError(hl, "expected " + std::to_string(k) + " moduli");
  try {
    cell_count(moduli);
  } catch (const Error& e) {
    throw ParseError(hl, e.what());
  }
  std::vector<std::vector<std::int64_t>> residues;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto& line = lines[l];
    std::vector<std::int64_t> r;
    if (line.text != "()") r = text::parse_csv_ints(line.text, line.number);
    if (r.size() != k) throw ParseError(line.number, "expected " + std::to_string(k) + " residues");
    for (std::size_t i = 0; i < k; ++i)
      if (r[i] < 0 || static_cast<std::uint64_t>(r[i]) >= moduli[i])
        throw ParseError(line.number, "residue out of range");
    residues.push_back(std::move(r));
  }
  return PeriodicSet(std::move(moduli), residues);
}

std::string format_periodic_set(const PeriodicSet& s) {
  std::ostringstream os;
  os << "periodic-set k=" << s.k() << " moduli=" << text::join(s.moduli().begin(), s.moduli().end()) << "\n";
  for (const auto& r : s.residues()) os << (r.empty() ? "()" : text::join_ints(r)) << "\n";
  return os.str();
}

CheckList return_times_battery(const FiniteZdSystem& sys, PointId x0, const EngineOptions& opts) {
  CheckList out;
  sys.check_point(x0);
  const PointId single[] = {x0};
  auto own = return_set(sys, x0, single, opts);
  out.push_back(verdict("return times contain zero", contains_zero_vector(own), ""));

  const bool minimal = is_minimal(sys).minimal;
  const bool ucpp = has_closing_property(sys, opts);
  const std::string why = minimal ? "closing property fails" : "not minimal";
  const char* names[] = {"joining inside return times to a point", "joining inside return times to the space",
                         "joining of return times is non-empty", "product realization returns equal the joining",
                         "product realization has the closing property"};
  if (!minimal || !ucpp) {
    for (const char* n : names) out.push_back(unmet(n, why));
    return out;
  }
  auto dec = decompose_unchecked(sys, x0, opts);
  std::vector<PointId> all(sys.size());
  std::iota(all.begin(), all.end(), PointId{0});
  auto describe = [](const ContainmentVerdict& v) {
    if (v.witness) return "joining residue (" + text::join_ints(*v.witness) + ") is not a return time";
    return std::to_string(v.joining.residue_count()) + " joining residues mod (" +
           text::join(v.joining.moduli().begin(), v.joining.moduli().end()) + ")";
  };
  auto point = containment_from(dec, sys, x0, single, opts);
  out.push_back(verdict(names[0], point.contained, describe(point)));
  auto space = containment_from(dec, sys, x0, all, opts);
  out.push_back(verdict(names[1], space.contained, describe(space)));
  out.push_back(verdict(names[2], contains_zero_vector(point.joining), ""));
  auto real = product_system_realization(factors_of(dec, x0), opts);
  out.push_back(verdict(names[3], real.equal, "|Y|=" + std::to_string(real.system.size())));
  out.push_back(verdict(names[4], real.ucpp, ""));
  return out;
}

}  // namespace dcube
