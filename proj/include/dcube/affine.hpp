#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "dcube/check.hpp"
#include "dcube/finite_system.hpp"
#include "dcube/parallel.hpp"

namespace dcube {

using Rational = boost::rational<std::int64_t>;

Rational parse_rational(std::string_view s);
std::string to_string(const Rational& q);
// The representative of q mod 1 in [0,1).
Rational frac(const Rational& q);

// Square integer matrix with overflow-checked arithmetic.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(unsigned n) : n_(n), a_(std::size_t{n} * n, 0) {}
  static IntMatrix identity(unsigned n);
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  unsigned size() const { return n_; }
  std::int64_t& operator()(unsigned i, unsigned j) { return a_[std::size_t{i} * n_ + j]; }
  std::int64_t operator()(unsigned i, unsigned j) const { return a_[std::size_t{i} * n_ + j]; }
  bool is_zero() const;
  std::vector<std::vector<std::int64_t>> rows() const;

  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator-(const IntMatrix& o) const;
  IntMatrix operator+(const IntMatrix& o) const;
  std::vector<Rational> operator*(const std::vector<Rational>& v) const;

  bool operator==(const IntMatrix&) const = default;

 private:
  unsigned n_ = 0;
  std::vector<std::int64_t> a_;
};

// T_i x = A_i x + α_i on the torus R^r / Z^r.
struct AffineZdSystem {
  unsigned r = 0;
  std::vector<IntMatrix> mats;
  std::vector<std::vector<Rational>> alphas;

  unsigned dim() const { return static_cast<unsigned>(mats.size()); }
  bool operator==(const AffineZdSystem&) const = default;
};

// Torus point with coordinates reduced into [0,1).
struct RationalTorusPoint {
  std::vector<Rational> coords;

  static RationalTorusPoint reduce(std::vector<Rational> v);
  static RationalTorusPoint zero(unsigned r) { return {std::vector<Rational>(r, Rational(0))}; }
  std::string str() const;
  bool operator==(const RationalTorusPoint&) const = default;
};

struct AffineValidation {
  std::vector<std::string> problems;
  bool shapes_ok = false;
  bool unipotent = false;
  bool matrices_commute = false;
  bool translations_commute = false;
  // Least p with (A_i - I)^p = 0, when it exists within p <= r.
  std::vector<std::optional<unsigned>> nilpotency_index;

  bool valid() const { return shapes_ok && unipotent && matrices_commute && translations_commute; }
};

AffineValidation validate_affine(const AffineZdSystem& sys);

struct MatCondReport {
  // Conditions 1 and 2 only apply to two transformations.
  std::optional<bool> cond1, cond2;
  bool cond3 = false, cond4 = false;

  bool formula_conditions() const { return cond3 && cond4; }
};

MatCondReport matcond_check(const AffineZdSystem& sys);

// The alternating sum over proper subsets I of [d] of the maps
// composed from T_k^{n_k}, k in I.
RationalTorusPoint closed_form(const AffineZdSystem& sys, std::span<const std::int64_t> n,
                               const RationalTorusPoint& x);
// T_1^{n_1}...T_d^{n_d} x by single steps; cost grows with |n|.
RationalTorusPoint direct_iterate(const AffineZdSystem& sys, std::span<const std::int64_t> n,
                                  const RationalTorusPoint& x);

struct SampleSpec {
  std::int64_t n_min = -3, n_max = 3;    // every n_i in [n_min, n_max]
  std::vector<std::uint64_t> lattice_q = {1, 2, 3, 4, 5, 6};  // x ranges over (1/q)Z^r
};

enum class FormulaOutcome { IdentityHolds, Contradiction, WitnessFound, Inconclusive };

const char* to_string(FormulaOutcome o);

struct FormulaWitness {
  std::vector<std::int64_t> n;
  RationalTorusPoint x, formula, iteration;
};

struct FormulaVerdict {
  FormulaOutcome outcome = FormulaOutcome::Inconclusive;
  bool conditions_hold = false;
  std::size_t samples = 0;
  std::optional<FormulaWitness> witness;

  // Identity confirmed under the conditions, or refuted without them.
  bool consistent() const {
    return outcome == FormulaOutcome::IdentityHolds || outcome == FormulaOutcome::WitnessFound;
  }
};

FormulaVerdict formula_equivalence_test(const AffineZdSystem& sys, const SampleSpec& spec,
                                        const EngineOptions& opts = {});

enum class DiscretizeMode { Orbit, FullLattice };

struct DiscretizeOptions {
  std::uint64_t q = 1;
  DiscretizeMode mode = DiscretizeMode::Orbit;
  std::optional<RationalTorusPoint> base;  // orbit mode; default 0
};

struct Discretization {
  FiniteZdSystem system;
  std::vector<RationalTorusPoint> points;  // point id -> torus point
};

// The induced permutations of the lattice (1/q)Z^r / Z^r, or of one orbit
// in it. Points are numbered in increasing order of their numerators read
// as a base-q number, first coordinate most significant.
Discretization discretize(const AffineZdSystem& sys, const DiscretizeOptions& dopts,
                          const EngineOptions& opts = {});

AffineZdSystem parse_affine(std::string_view text);
std::string format_affine(const AffineZdSystem& sys);

CheckList affine_battery(const AffineZdSystem& sys, const SampleSpec& spec, const EngineOptions& opts = {});

}  // namespace dcube
