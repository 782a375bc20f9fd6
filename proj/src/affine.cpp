#include "dcube/affine.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "dcube/cube_engine.hpp"
#include "dcube/hypercube.hpp"
#include "text_util.hpp"

namespace dcube {

namespace {

__extension__ typedef __int128 i128;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer matrix product overflows");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer matrix sum overflows");
  return r;
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  return checked_mul(a / std::gcd(a, b), b);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>(static_cast<i128>(a) * b % m);
}

bool all_integral(const std::vector<Rational>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q.denominator() == 1; });
}

std::int64_t denominator_lcm(const std::vector<Rational>& v, std::int64_t acc = 1) {
  for (const auto& q : v) acc = checked_lcm(acc, q.denominator());
  return acc;
}

std::vector<Rational> subtract(std::vector<Rational> a, const std::vector<Rational>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

// sum_{k=0}^{r-1} (-N)^k with N = A - I; the inverse when N is nilpotent.
IntMatrix unipotent_inverse(const IntMatrix& a) {
  const unsigned r = a.size();
  auto id = IntMatrix::identity(r);
  auto neg = id - a;  // -N
  IntMatrix sum = id, term = id;
  for (unsigned k = 1; k < r; ++k) {
    term = term * neg;
    sum = sum + term;
  }
  if (!(sum * a == id)) throw InvalidArgument("matrix is not unipotent");
  return sum;
}

// x -> A x + b on (Z/D)^r, where the torus point x/D is stored as x.
struct LatticeMap {
  unsigned r = 0;
  std::int64_t D = 1;
  std::vector<std::int64_t> a, b;

  static LatticeMap identity(unsigned r, std::int64_t D) {
    LatticeMap m{r, D, std::vector<std::int64_t>(std::size_t{r} * r, 0), std::vector<std::int64_t>(r, 0)};
    for (unsigned i = 0; i < r; ++i) m.a[std::size_t{i} * r + i] = 1 % D;
    return m;
  }

  static LatticeMap from(const IntMatrix& mat, const std::vector<Rational>& alpha, std::int64_t D) {
    const unsigned r = mat.size();
    LatticeMap m{r, D, std::vector<std::int64_t>(std::size_t{r} * r), std::vector<std::int64_t>(r)};
    for (unsigned i = 0; i < r; ++i) {
      for (unsigned j = 0; j < r; ++j) m.a[std::size_t{i} * r + j] = mod(mat(i, j), D);
      m.b[i] = mod(mulmod(mod(alpha[i].numerator(), D), D / alpha[i].denominator(), D), D);
    }
    return m;
  }

  void apply(const std::int64_t* x, std::int64_t* out) const {
    for (unsigned i = 0; i < r; ++i) {
      i128 s = b[i];
      for (unsigned j = 0; j < r; ++j) s += static_cast<i128>(a[std::size_t{i} * r + j]) * x[j];
      out[i] = static_cast<std::int64_t>(s % D);
    }
  }

  // this ∘ o
  LatticeMap after(const LatticeMap& o) const {
    LatticeMap m{r, D, std::vector<std::int64_t>(a.size()), std::vector<std::int64_t>(r)};
    for (unsigned i = 0; i < r; ++i)
      for (unsigned j = 0; j < r; ++j) {
        i128 s = 0;
        for (unsigned k = 0; k < r; ++k)
          s += static_cast<i128>(a[std::size_t{i} * r + k]) * o.a[std::size_t{k} * r + j];
        m.a[std::size_t{i} * r + j] = static_cast<std::int64_t>(s % D);
      }
    apply(o.b.data(), m.b.data());
    return m;
  }
};

// Forward and backward single steps of each generator on (Z/D)^r.
struct LatticeSteps {
  std::vector<LatticeMap> forward, backward;

  LatticeSteps(const AffineZdSystem& sys, std::int64_t D) {
    for (unsigned i = 0; i < sys.dim(); ++i) {
      forward.push_back(LatticeMap::from(sys.mats[i], sys.alphas[i], D));
      auto inv = unipotent_inverse(sys.mats[i]);
      auto shift = inv * sys.alphas[i];
      for (auto& s : shift) s = -s;
      backward.push_back(LatticeMap::from(inv, shift, D));
    }
  }

  // T_i^e by repeated squaring.
  LatticeMap power(unsigned i, std::int64_t e) const {
    const auto& step = e < 0 ? backward[i] : forward[i];
    auto result = LatticeMap::identity(step.r, step.D);
    auto base = step;
    for (std::uint64_t k = e < 0 ? 0 - static_cast<std::uint64_t>(e) : static_cast<std::uint64_t>(e); k;
         k >>= 1) {
      if (k & 1) result = result.after(base);
      base = base.after(base);
    }
    return result;
  }

  // T_i^e as |e| single steps.
  LatticeMap iterate(unsigned i, std::int64_t e) const {
    const auto& step = e < 0 ? backward[i] : forward[i];
    auto result = LatticeMap::identity(step.r, step.D);
    for (std::int64_t k = 0; k < (e < 0 ? -e : e); ++k) result = step.after(result);
    return result;
  }
};

int subset_sign(unsigned d, unsigned size) { return ((d + size + 1) % 2 == 0) ? 1 : -1; }

std::vector<std::int64_t> to_lattice(const RationalTorusPoint& x, std::int64_t D) {
  std::vector<std::int64_t> out;
  for (const auto& c : x.coords) out.push_back(mulmod(mod(c.numerator(), D), D / c.denominator(), D));
  return out;
}

RationalTorusPoint from_lattice(const std::int64_t* x, unsigned r, std::int64_t D) {
  RationalTorusPoint p;
  for (unsigned i = 0; i < r; ++i) p.coords.emplace_back(x[i], D);
  return p;
}

void check_shapes(const AffineZdSystem& sys, std::size_t n_len, const RationalTorusPoint& x) {
  if (n_len != sys.dim()) throw InvalidArgument("exponent vector has the wrong length");
  if (x.coords.size() != sys.r) throw InvalidArgument("torus point has the wrong dimension");
}

// The maps of the alternating sum, one per proper subset, with their signs.
std::vector<std::pair<int, LatticeMap>> formula_terms(const LatticeSteps& steps, unsigned d, unsigned r,
                                                      std::int64_t D, std::span<const std::int64_t> n) {
  std::vector<LatticeMap> powers;
  for (unsigned k = 0; k < d; ++k) powers.push_back(steps.power(k, n[k]));
  std::vector<std::pair<int, LatticeMap>> terms;
  const std::uint32_t full = static_cast<std::uint32_t>(vertex_count(d)) - 1;
  for (std::uint32_t set = 0; set < full; ++set) {
    auto m = LatticeMap::identity(r, D);
    for (unsigned k = 0; k < d; ++k)
      if ((set >> k) & 1U) m = powers[k].after(m);
    terms.emplace_back(subset_sign(d, static_cast<unsigned>(std::popcount(set))), std::move(m));
  }
  return terms;
}

void evaluate_terms(const std::vector<std::pair<int, LatticeMap>>& terms, const std::int64_t* x,
                    std::int64_t* out, std::int64_t* scratch, unsigned r, std::int64_t D) {
  std::fill(out, out + r, 0);
  for (const auto& [sign, m] : terms) {
    m.apply(x, scratch);
    for (unsigned i = 0; i < r; ++i) out[i] = mod(out[i] + sign * scratch[i], D);
  }
}

}  // namespace

Rational parse_rational(std::string_view s) {
  s = text::trim(s);
  auto slash = s.find('/');
  std::int64_t num = 0, den = 1;
  auto parse = [](std::string_view t) {
    t = text::trim(t);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size())
      throw InvalidArgument("malformed rational '" + std::string(t) + "'");
    return v;
  };
  if (slash == std::string_view::npos) {
    num = parse(s);
  } else {
    num = parse(s.substr(0, slash));
    den = parse(s.substr(slash + 1));
  }
  if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(s) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rational frac(const Rational& q) {
  return q - Rational(floor_div(q.numerator(), q.denominator()));
}

IntMatrix IntMatrix::identity(unsigned n) {
  IntMatrix m(n);
  for (unsigned i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  IntMatrix m(static_cast<unsigned>(rows.size()));
  for (unsigned i = 0; i < m.n_; ++i) {
    if (rows[i].size() != m.n_) throw InvalidArgument("matrix is not square");
    for (unsigned j = 0; j < m.n_; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](std::int64_t v) { return v == 0; });
}

std::vector<std::vector<std::int64_t>> IntMatrix::rows() const {
  std::vector<std::vector<std::int64_t>> out(n_);
  for (unsigned i = 0; i < n_; ++i) out[i].assign(a_.begin() + std::size_t{i} * n_, a_.begin() + std::size_t{i + 1} * n_);
  return out;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (n_ != o.n_) throw InvalidArgument("matrix size mismatch");
  IntMatrix m(n_);
  for (unsigned i = 0; i < n_; ++i)
    for (unsigned j = 0; j < n_; ++j) {
      std::int64_t s = 0;
      for (unsigned k = 0; k < n_; ++k) s = checked_add(s, checked_mul((*this)(i, k), o(k, j)));
      m(i, j) = s;
    }
  return m;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
  if (n_ != o.n_) throw InvalidArgument("matrix size mismatch");
  IntMatrix m(n_);
  for (std::size_t k = 0; k < a_.size(); ++k) {
    if (__builtin_sub_overflow(a_[k], o.a_[k], &m.a_[k])) throw OverflowError("integer matrix difference overflows");
  }
  return m;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
  if (n_ != o.n_) throw InvalidArgument("matrix size mismatch");
  IntMatrix m(n_);
  for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = checked_add(a_[k], o.a_[k]);
  return m;
}

std::vector<Rational> IntMatrix::operator*(const std::vector<Rational>& v) const {
  if (v.size() != n_) throw InvalidArgument("vector size mismatch");
  std::vector<Rational> out(n_, Rational(0));
  for (unsigned i = 0; i < n_; ++i)
    for (unsigned j = 0; j < n_; ++j) out[i] += Rational((*this)(i, j)) * v[j];
  return out;
}

RationalTorusPoint RationalTorusPoint::reduce(std::vector<Rational> v) {
  for (auto& q : v) q = frac(q);
  return {std::move(v)};
}

std::string RationalTorusPoint::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) s += (i ? "," : "") + to_string(coords[i]);
  return s + ")";
}

const char* to_string(FormulaOutcome o) {
  switch (o) {
    case FormulaOutcome::IdentityHolds: return "identity holds";
    case FormulaOutcome::Contradiction: return "contradiction";
    case FormulaOutcome::WitnessFound: return "witness found";
    case FormulaOutcome::Inconclusive: return "inconclusive at this sample size";
  }
  return "?";
}

AffineValidation validate_affine(const AffineZdSystem& sys) {
  AffineValidation v;
  const unsigned r = sys.r, d = sys.dim();
  if (r == 0) v.problems.push_back("torus dimension must be positive");
  if (d == 0 || d > kMaxDim) v.problems.push_back("transformation count must lie in [1, " + std::to_string(kMaxDim) + "]");
  if (sys.alphas.size() != d) v.problems.push_back("one translation vector per matrix is required");
  for (unsigned i = 0; i < d; ++i) {
    if (sys.mats[i].size() != r) v.problems.push_back("A" + std::to_string(i + 1) + " is not " + std::to_string(r) + "x" + std::to_string(r));
    if (i < sys.alphas.size() && sys.alphas[i].size() != r)
      v.problems.push_back("alpha" + std::to_string(i + 1) + " does not have " + std::to_string(r) + " entries");
  }
  v.shapes_ok = v.problems.empty();
  if (!v.shapes_ok) return v;

  const auto id = IntMatrix::identity(r);
  v.unipotent = true;
  for (unsigned i = 0; i < d; ++i) {
    std::optional<unsigned> index;
    try {
      auto n = sys.mats[i] - id;
      auto p = n;
      for (unsigned k = 1; k <= r && !index; ++k) {
        if (p.is_zero()) index = k;
        else p = p * n;
      }
    } catch (const OverflowError&) {
    }
    v.nilpotency_index.push_back(index);
    if (!index) {
      v.unipotent = false;
      v.problems.push_back("A" + std::to_string(i + 1) + " is not unipotent");
    }
  }

  v.matrices_commute = v.translations_commute = true;
  for (unsigned i = 0; i < d; ++i)
    for (unsigned j = i + 1; j < d; ++j) {
      const auto tag = std::to_string(i + 1) + " and " + std::to_string(j + 1);
      try {
        if (!(sys.mats[i] * sys.mats[j] == sys.mats[j] * sys.mats[i])) {
          v.matrices_commute = false;
          v.problems.push_back("A" + tag + " do not commute");
        }
      } catch (const OverflowError&) {
        v.matrices_commute = false;
        v.problems.push_back("A" + tag + " overflow when multiplied");
      }
      auto lhs = (sys.mats[i] - id) * sys.alphas[j];
      auto rhs = (sys.mats[j] - id) * sys.alphas[i];
      if (!all_integral(subtract(lhs, rhs))) {
        v.translations_commute = false;
        v.problems.push_back("T" + tag + " do not commute");
      }
    }
  return v;
}

MatCondReport matcond_check(const AffineZdSystem& sys) {
  auto v = validate_affine(sys);
  if (!v.valid()) throw InvalidArgument("invalid affine system: " + v.problems.front());
  const unsigned r = sys.r, d = sys.dim();
  const auto id = IntMatrix::identity(r);
  std::vector<IntMatrix> n;
  for (const auto& a : sys.mats) n.push_back(a - id);
  MatCondReport rep;
  // Products of commuting nilpotents; the order does not matter.
  auto product_except = [&](std::optional<unsigned> skip) {
    IntMatrix p = id;
    for (unsigned i = 0; i < d; ++i)
      if (!skip || *skip != i) p = p * n[i];
    return p;
  };
  rep.cond3 = product_except(std::nullopt).is_zero();
  rep.cond4 = true;
  for (unsigned j = 0; j < d; ++j)
    if (!all_integral(product_except(j) * sys.alphas[j])) rep.cond4 = false;
  if (d == 2) {
    rep.cond1 = rep.cond3;
    rep.cond2 = all_integral(n[0] * sys.alphas[1]) && all_integral(n[1] * sys.alphas[0]);
  }
  return rep;
}

RationalTorusPoint closed_form(const AffineZdSystem& sys, std::span<const std::int64_t> n,
                               const RationalTorusPoint& x) {
  check_shapes(sys, n.size(), x);
  std::int64_t D = denominator_lcm(x.coords);
  for (const auto& a : sys.alphas) D = denominator_lcm(a, D);
  LatticeSteps steps(sys, D);
  auto terms = formula_terms(steps, sys.dim(), sys.r, D, n);
  auto xl = to_lattice(x, D);
  std::vector<std::int64_t> out(sys.r), scratch(sys.r);
  evaluate_terms(terms, xl.data(), out.data(), scratch.data(), sys.r, D);
  return from_lattice(out.data(), sys.r, D);
}

RationalTorusPoint direct_iterate(const AffineZdSystem& sys, std::span<const std::int64_t> n,
                                  const RationalTorusPoint& x) {
  check_shapes(sys, n.size(), x);
  auto p = x.coords;
  for (unsigned k = sys.dim(); k-- > 0;) {
    if (n[k] >= 0) {
      for (std::int64_t s = 0; s < n[k]; ++s) {
        p = sys.mats[k] * p;
        for (unsigned i = 0; i < sys.r; ++i) p[i] = frac(p[i] + sys.alphas[k][i]);
      }
    } else {
      auto inv = unipotent_inverse(sys.mats[k]);
      for (std::int64_t s = 0; s < -n[k]; ++s) {
        p = inv * subtract(p, sys.alphas[k]);
        for (auto& c : p) c = frac(c);
      }
    }
  }
  return RationalTorusPoint::reduce(std::move(p));
}

FormulaVerdict formula_equivalence_test(const AffineZdSystem& sys, const SampleSpec& spec,
                                        const EngineOptions& opts) {
  if (spec.n_min > spec.n_max) throw InvalidArgument("empty exponent range");
  FormulaVerdict v;
  v.conditions_hold = matcond_check(sys).formula_conditions();
  const unsigned d = sys.dim(), r = sys.r;
  const std::uint64_t span = static_cast<std::uint64_t>(spec.n_max - spec.n_min) + 1;
  std::uint64_t n_count = 1;
  for (unsigned k = 0; k < d; ++k) {
    if (n_count > opts.max_tuples / span) throw SizeLimitExceeded("exponent sample exceeds the size cap");
    n_count *= span;
  }
  std::int64_t alpha_den = 1;
  for (const auto& a : sys.alphas) alpha_den = denominator_lcm(a, alpha_den);

  for (auto q : spec.lattice_q) {
    if (q == 0) throw InvalidArgument("lattice denominator must be positive");
    std::uint64_t points = 1;
    for (unsigned i = 0; i < r; ++i) {
      if (points > opts.max_tuples / q) throw SizeLimitExceeded("lattice sample exceeds the size cap");
      points *= q;
    }
    const std::int64_t D = checked_lcm(static_cast<std::int64_t>(q), alpha_den);
    const std::int64_t scale = D / static_cast<std::int64_t>(q);
    LatticeSteps steps(sys, D);

    auto n_of = [&](std::uint64_t idx) {
      std::vector<std::int64_t> n(d);
      for (unsigned k = d; k-- > 0;) {
        n[k] = spec.n_min + static_cast<std::int64_t>(idx % span);
        idx /= span;
      }
      return n;
    };
    auto x_of = [&](std::uint64_t idx, std::int64_t* x) {
      for (unsigned i = r; i-- > 0;) {
        x[i] = static_cast<std::int64_t>(idx % q) * scale;
        idx /= q;
      }
    };

    struct Hit {
      std::uint64_t n_idx, x_idx;
      std::vector<std::int64_t> formula, iteration;
    };
    const unsigned workers = effective_workers(n_count, opts.threads);
    std::vector<std::optional<Hit>> hits(workers);
    parallel_chunks(n_count, workers, [&](unsigned wk, std::size_t b, std::size_t e) {
      std::vector<std::int64_t> x(r), lhs(r), rhs(r), scratch(r);
      for (std::size_t ni = b; ni < e && !hits[wk]; ++ni) {
        auto n = n_of(ni);
        auto terms = formula_terms(steps, d, r, D, n);
        auto direct = LatticeMap::identity(r, D);
        for (unsigned k = 0; k < d; ++k) direct = steps.iterate(k, n[k]).after(direct);
        for (std::uint64_t xi = 0; xi < points; ++xi) {
          x_of(xi, x.data());
          direct.apply(x.data(), lhs.data());
          evaluate_terms(terms, x.data(), rhs.data(), scratch.data(), r, D);
          if (lhs != rhs) {
            hits[wk] = Hit{ni, xi, rhs, lhs};
            break;
          }
        }
      }
    });
    auto first = std::find_if(hits.begin(), hits.end(), [](const auto& h) { return h.has_value(); });
    if (first != hits.end()) {
      const auto& h = **first;
      v.samples += h.n_idx * points + h.x_idx + 1;
      std::vector<std::int64_t> x(r);
      x_of(h.x_idx, x.data());
      v.witness = FormulaWitness{n_of(h.n_idx), from_lattice(x.data(), r, D), from_lattice(h.formula.data(), r, D),
                                 from_lattice(h.iteration.data(), r, D)};
      break;
    }
    v.samples += n_count * points;
  }
  if (v.conditions_hold)
    v.outcome = v.witness ? FormulaOutcome::Contradiction : FormulaOutcome::IdentityHolds;
  else
    v.outcome = v.witness ? FormulaOutcome::WitnessFound : FormulaOutcome::Inconclusive;
  return v;
}

Discretization discretize(const AffineZdSystem& sys, const DiscretizeOptions& dopts, const EngineOptions& opts) {
  auto val = validate_affine(sys);
  if (!val.valid()) throw InvalidArgument("invalid affine system: " + val.problems.front());
  if (dopts.q == 0) throw InvalidArgument("lattice denominator must be positive");
  const std::int64_t q = static_cast<std::int64_t>(dopts.q);
  for (unsigned i = 0; i < sys.dim(); ++i)
    for (const auto& c : sys.alphas[i])
      if (q % c.denominator() != 0)
        throw InvalidArgument("denominator mismatch: alpha" + std::to_string(i + 1) + " has entry " + to_string(c) +
                              " whose denominator does not divide " + std::to_string(q));
  const unsigned r = sys.r, d = sys.dim();
  std::uint64_t total = 1;
  for (unsigned i = 0; i < r; ++i) {
    if (total > std::min<std::uint64_t>(opts.max_tuples, UINT32_MAX) / dopts.q)
      throw SizeLimitExceeded("lattice has more than " + std::to_string(opts.max_tuples) + " points");
    total *= dopts.q;
  }
  LatticeSteps steps(sys, q);
  auto encode = [&](const std::int64_t* x) {
    std::uint64_t c = 0;
    for (unsigned i = 0; i < r; ++i) c = c * dopts.q + static_cast<std::uint64_t>(x[i]);
    return c;
  };
  auto decode = [&](std::uint64_t c, std::int64_t* x) {
    for (unsigned i = r; i-- > 0;) {
      x[i] = static_cast<std::int64_t>(c % dopts.q);
      c /= dopts.q;
    }
  };

  std::vector<std::uint64_t> codes;
  if (dopts.mode == DiscretizeMode::FullLattice) {
    codes.resize(total);
    std::iota(codes.begin(), codes.end(), std::uint64_t{0});
  } else {
    auto base = dopts.base.value_or(RationalTorusPoint::zero(r));
    if (base.coords.size() != r) throw InvalidArgument("base point has the wrong dimension");
    base = RationalTorusPoint::reduce(base.coords);
    for (const auto& c : base.coords)
      if (q % c.denominator() != 0) throw InvalidArgument("base point " + base.str() + " is not on the lattice");
    auto start = to_lattice(base, q);
    std::unordered_map<std::uint64_t, bool> seen;
    codes.push_back(encode(start.data()));
    seen.emplace(codes.back(), true);
    std::vector<std::int64_t> x(r), y(r);
    for (std::size_t k = 0; k < codes.size(); ++k) {
      decode(codes[k], x.data());
      for (unsigned i = 0; i < d; ++i) {
        steps.forward[i].apply(x.data(), y.data());
        auto c = encode(y.data());
        if (seen.emplace(c, true).second) codes.push_back(c);
      }
    }
    std::sort(codes.begin(), codes.end());
  }

  auto id_of = [&](std::uint64_t c) {
    return static_cast<PointId>(std::lower_bound(codes.begin(), codes.end(), c) - codes.begin());
  };
  PermutationData data{codes.size(), std::vector<std::vector<PointId>>(d, std::vector<PointId>(codes.size()))};
  std::vector<RationalTorusPoint> pts(codes.size());
  const unsigned workers = effective_workers(codes.size(), opts.threads);
  parallel_chunks(codes.size(), workers, [&](unsigned, std::size_t b, std::size_t e) {
    std::vector<std::int64_t> x(r), y(r);
    for (std::size_t k = b; k < e; ++k) {
      decode(codes[k], x.data());
      pts[k] = from_lattice(x.data(), r, q);
      for (unsigned i = 0; i < d; ++i) {
        steps.forward[i].apply(x.data(), y.data());
        data.perms[i][k] = id_of(encode(y.data()));
      }
    }
  });
  return Discretization{FiniteZdSystem(std::move(data)), std::move(pts)};
}

AffineZdSystem parse_affine(std::string_view text) {
  auto lines = text::logical_lines(text);
  if (lines.empty() || lines.front().text != "affine-system")
    throw ParseError(lines.empty() ? 1 : lines.front().number, "expected 'affine-system' header");
  std::optional<std::uint64_t> r, d;
  std::vector<std::optional<IntMatrix>> mats;
  std::vector<std::optional<std::vector<Rational>>> alphas;
  auto slot = [](auto& v, std::uint64_t idx, const text::Line& line, std::string_view key) -> auto& {
    if (idx < 1 || idx > kMaxDim) throw ParseError(line.number, "index out of range in '" + std::string(key) + "'");
    if (v.size() < idx) v.resize(idx);
    if (v[idx - 1]) throw ParseError(line.number, "duplicate " + std::string(key));
    return v[idx - 1];
  };
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    auto [key, value] = text::split_assignment(line);
    if (key == "r") {
      if (r) throw ParseError(line.number, "duplicate 'r'");
      r = text::parse_uint(value, line.number);
      if (*r == 0 || *r > 64) throw ParseError(line.number, "r must lie in [1, 64]");
    } else if (key == "d") {
      if (d) throw ParseError(line.number, "duplicate 'd'");
      d = text::parse_uint(value, line.number);
      if (*d < 1 || *d > kMaxDim) throw ParseError(line.number, "d must lie in [1, " + std::to_string(kMaxDim) + "]");
    } else if (key.size() > 1 && key[0] == 'A') {
      auto& s = slot(mats, text::parse_uint(key.substr(1), line.number), line, key);
      auto rows = text::parse_int_matrix(value, line.number);
      if (!r) throw ParseError(line.number, "'r' must precede the matrices");
      if (rows.size() != *r || std::any_of(rows.begin(), rows.end(), [&](const auto& row) { return row.size() != *r; }))
        throw ParseError(line.number, std::string(key) + " must be " + std::to_string(*r) + "x" + std::to_string(*r));
      s = IntMatrix::from_rows(rows);
    } else if (key.size() > 5 && key.substr(0, 5) == "alpha") {
      auto& s = slot(alphas, text::parse_uint(key.substr(5), line.number), line, key);
      if (!r) throw ParseError(line.number, "'r' must precede the translations");
      std::vector<Rational> v;
      for (auto item : text::parse_bracket_items(value, line.number)) {
        try {
          v.push_back(parse_rational(item));
        } catch (const InvalidArgument& e) {
          throw ParseError(line.number, e.what());
        }
      }
      if (v.size() != *r) throw ParseError(line.number, std::string(key) + " must have " + std::to_string(*r) + " entries");
      s = std::move(v);
    } else {
      throw ParseError(line.number, "unknown directive '" + std::string(key) + "'");
    }
  }
  const std::size_t last = lines.back().number;
  if (!r) throw ParseError(last, "missing 'r'");
  if (!d) throw ParseError(last, "missing 'd'");
  if (mats.size() > *d) throw ParseError(last, "A" + std::to_string(mats.size()) + " exceeds d");
  if (alphas.size() > *d) throw ParseError(last, "alpha" + std::to_string(alphas.size()) + " exceeds d");
  AffineZdSystem sys;
  sys.r = static_cast<unsigned>(*r);
  for (std::size_t i = 0; i < *d; ++i) {
    if (i >= mats.size() || !mats[i]) throw ParseError(last, "missing A" + std::to_string(i + 1));
    if (i >= alphas.size() || !alphas[i]) throw ParseError(last, "missing alpha" + std::to_string(i + 1));
    sys.mats.push_back(std::move(*mats[i]));
    sys.alphas.push_back(std::move(*alphas[i]));
  }
  return sys;
}

std::string format_affine(const AffineZdSystem& sys) {
  std::ostringstream os;
  os << "affine-system\nr = " << sys.r << "\nd = " << sys.dim() << "\n";
  for (unsigned i = 0; i < sys.dim(); ++i) {
    os << "A" << i + 1 << " = [";
    auto rows = sys.mats[i].rows();
    for (std::size_t k = 0; k < rows.size(); ++k) os << (k ? ", [" : "[") << text::join_ints(rows[k], ", ") << "]";
    os << "]\nalpha" << i + 1 << " = [";
    for (std::size_t k = 0; k < sys.alphas[i].size(); ++k) os << (k ? ", " : "") << to_string(sys.alphas[i][k]);
    os << "]\n";
  }
  return os.str();
}

CheckList affine_battery(const AffineZdSystem& sys, const SampleSpec& spec, const EngineOptions& opts) {
  CheckList out;
  auto val = validate_affine(sys);
  out.push_back(verdict("affine system valid", val.valid(), val.valid() ? "" : val.problems.front()));
  if (!val.valid()) return out;

  auto mc = matcond_check(sys);
  {
    std::string detail = "MatCond3=" + std::string(mc.cond3 ? "true" : "false") +
                         " MatCond4=" + std::string(mc.cond4 ? "true" : "false");
    if (mc.cond1) detail = "MatCond1=" + std::string(*mc.cond1 ? "true" : "false") + " MatCond2=" +
                           std::string(*mc.cond2 ? "true" : "false") + " " + detail;
    out.push_back({"matrix conditions", mc.formula_conditions() ? CheckStatus::Pass : CheckStatus::HypothesesUnmet,
                   detail});
    if (mc.cond1 && (*mc.cond1 && *mc.cond2) != mc.formula_conditions())
      out.push_back(fail("two-transformation conditions agree", "conditions 1-2 and 3-4 disagree"));
  }
  {
    auto fv = formula_equivalence_test(sys, spec, opts);
    std::string detail = std::string(to_string(fv.outcome)) + " after " + std::to_string(fv.samples) + " samples";
    if (fv.witness)
      detail += "; n=(" + text::join_ints(fv.witness->n) + ") x=" + fv.witness->x.str() + " formula=" +
                fv.witness->formula.str() + " iteration=" + fv.witness->iteration.str();
    CheckStatus s = fv.consistent() ? CheckStatus::Pass
                    : fv.outcome == FormulaOutcome::Inconclusive ? CheckStatus::Inconclusive
                                                                 : CheckStatus::Fail;
    out.push_back({"closed-form formula", s, detail});
  }

  std::int64_t q = 1;
  for (const auto& a : sys.alphas) q = denominator_lcm(a, q);
  auto disc = discretize(sys, DiscretizeOptions{static_cast<std::uint64_t>(q), DiscretizeMode::Orbit, std::nullopt}, opts);
  const auto& fs = disc.system;
  {
    auto m = is_minimal(fs);
    bool transitive = orbit(fs, 0).size() == fs.size();
    out.push_back(verdict("discretized orbit: transitive iff minimal", transitive == m.minimal,
                          "q=" + std::to_string(q) + " points=" + std::to_string(fs.size())));
  }
  {
    auto cubes = enumerate_Q(fs, opts);
    bool holds = ucpp_check(cubes).holds;
    std::string detail = "|Q|=" + std::to_string(cubes.size());
    if (mc.formula_conditions())
      out.push_back(verdict("discretized orbit has the closing property", holds, detail));
    else
      out.push_back(unmet("discretized orbit has the closing property",
                          detail + "; conditions fail; " + (holds ? "holds anyway" : "does not hold")));
  }
  return out;
}

}  // namespace dcube
