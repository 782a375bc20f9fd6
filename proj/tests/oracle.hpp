#pragma once

// Brute-force reference implementations written straight from the
// definitions. They use raw permutation arrays and std::set only, and share
// no code with the library.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Perm = std::vector<std::uint32_t>;
using Perms = std::vector<Perm>;
using Tuple = std::vector<std::uint32_t>;
using Pairs = std::set<std::pair<std::uint32_t, std::uint32_t>>;

inline Perm rotation(std::uint32_t n, std::uint32_t shift) {
  Perm p(n);
  for (std::uint32_t x = 0; x < n; ++x) p[x] = (x + shift) % n;
  return p;
}

inline std::size_t order(const Perm& p) {
  Perm cur = p;
  for (std::size_t k = 1;; ++k) {
    bool identity = true;
    for (std::uint32_t x = 0; x < cur.size(); ++x) identity = identity && cur[x] == x;
    if (identity) return k;
    for (auto& v : cur) v = p[v];
  }
}

// T^k x by single steps, k >= 0.
inline std::uint32_t step(const Perm& p, std::size_t k, std::uint32_t x) {
  for (std::size_t s = 0; s < k; ++s) x = p[x];
  return x;
}

// Vertex ε is the list of its digits (ε_1..ε_d); this maps ε to a position by
// reading the digits as a binary number with ε_1 least significant.
inline std::size_t position(const std::vector<int>& eps) {
  std::size_t pos = 0;
  for (std::size_t i = eps.size(); i-- > 0;) pos = pos * 2 + static_cast<std::size_t>(eps[i]);
  return pos;
}

inline std::vector<std::vector<int>> all_vertices(unsigned d) {
  std::vector<std::vector<int>> out{{}};
  for (unsigned i = 0; i < d; ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& v : out)
      for (int b = 0; b < 2; ++b) {
        auto w = v;
        w.push_back(b);
        next.push_back(w);
      }
    out = next;
  }
  return out;
}

// Calls fn(n) for every n in [0, L_1) x ... x [0, L_k).
inline void for_each_exponent(const std::vector<std::size_t>& bounds, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> n(bounds.size(), 0);
  while (true) {
    fn(n);
    std::size_t i = 0;
    while (i < n.size() && ++n[i] == bounds[i]) n[i++] = 0;
    if (i == n.size()) return;
  }
}

// (T_1^{n_1 ε_1} ... T_d^{n_d ε_d} x)_ε for every x and n; the set is finite
// so it equals its closure.
inline std::set<Tuple> cubes(const Perms& t) {
  const unsigned d = static_cast<unsigned>(t.size());
  std::vector<std::size_t> bounds;
  for (const auto& p : t) bounds.push_back(order(p));
  auto verts = all_vertices(d);
  std::set<Tuple> out;
  for (std::uint32_t x = 0; x < t[0].size(); ++x)
    for_each_exponent(bounds, [&](const std::vector<std::size_t>& n) {
      Tuple c(verts.size());
      for (const auto& eps : verts) {
        std::uint32_t y = x;
        for (unsigned i = 0; i < d; ++i)
          if (eps[i]) y = step(t[i], n[i], y);
        c[position(eps)] = y;
      }
      out.insert(c);
    });
  return out;
}

// Coordinates ε != 0 of the cubes based at x0.
inline std::set<Tuple> rooted(const Perms& t, std::uint32_t x0) {
  std::set<Tuple> out;
  for (const auto& c : cubes(t))
    if (c[0] == x0) out.insert(Tuple(c.begin() + 1, c.end()));
  return out;
}

// z(x, y, a, j): x at ∅, y at {j}, and a_η at both vertices obtained from a
// non-empty η ⊆ [d] \ {j} by adding or not adding j.
inline Tuple z(std::uint32_t x, std::uint32_t y, const Tuple& a, unsigned j, unsigned d) {
  Tuple out(std::size_t{1} << d);
  for (const auto& eps : all_vertices(d)) {
    std::vector<int> eta;
    for (unsigned i = 1; i <= d; ++i)
      if (i != j) eta.push_back(eps[i - 1]);
    std::size_t eta_pos = position(eta);
    if (eta_pos == 0)
      out[position(eps)] = eps[j - 1] ? y : x;
    else
      out[position(eps)] = a[eta_pos - 1];
  }
  return out;
}

// Every a in X^{2^{d-1}-1} is tried.
inline Pairs relation_j(const Perms& t, unsigned j) {
  const unsigned d = static_cast<unsigned>(t.size());
  const std::uint32_t n = static_cast<std::uint32_t>(t[0].size());
  auto q = cubes(t);
  const std::size_t width = (std::size_t{1} << (d - 1)) - 1;
  Pairs out;
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t y = 0; y < n; ++y) {
      std::vector<std::size_t> bounds(width, n);
      bool found = false;
      if (width == 0) {
        found = q.count(z(x, y, {}, j, d)) > 0;
      } else {
        for_each_exponent(bounds, [&](const std::vector<std::size_t>& a) {
          if (found) return;
          Tuple at(a.begin(), a.end());
          if (q.count(z(x, y, at, j, d))) found = true;
        });
      }
      if (found) out.emplace(x, y);
    }
  return out;
}

inline Pairs relation(const Perms& t) {
  Pairs out = relation_j(t, 1);
  for (unsigned j = 2; j <= t.size(); ++j) {
    Pairs next, other = relation_j(t, j);
    for (const auto& p : out)
      if (other.count(p)) next.insert(p);
    out = next;
  }
  return out;
}

// Two cubes agreeing off one vertex must be equal.
inline bool closing_property(const std::set<Tuple>& q) {
  for (auto a = q.begin(); a != q.end(); ++a)
    for (auto b = std::next(a); b != q.end(); ++b) {
      std::size_t diff = 0;
      for (std::size_t e = 0; e < a->size(); ++e) diff += (*a)[e] != (*b)[e];
      if (diff == 1) return false;
    }
  return true;
}

inline std::set<std::uint32_t> orbit(const Perms& t, std::uint32_t x) {
  std::set<std::uint32_t> seen{x};
  std::vector<std::uint32_t> todo{x};
  while (!todo.empty()) {
    auto y = todo.back();
    todo.pop_back();
    for (const auto& p : t)
      if (seen.insert(p[y]).second) todo.push_back(p[y]);
  }
  return seen;
}

inline bool minimal(const Perms& t) {
  for (std::uint32_t x = 0; x < t[0].size(); ++x)
    if (orbit(t, x).size() != t[0].size()) return false;
  return true;
}

// T_1^{n_1}...T_d^{n_d} x for n_i >= 0.
inline std::uint32_t word(const Perms& t, const std::vector<std::size_t>& n, std::uint32_t x) {
  for (std::size_t i = 0; i < t.size(); ++i) x = step(t[i], n[i], x);
  return x;
}

// {n mod orders : T^n x in U}, listed as residue vectors.
inline std::set<std::vector<std::size_t>> return_residues(const Perms& t, std::uint32_t x, const std::set<std::uint32_t>& u) {
  std::vector<std::size_t> bounds;
  for (const auto& p : t) bounds.push_back(order(p));
  std::set<std::vector<std::size_t>> out;
  for_each_exponent(bounds, [&](const std::vector<std::size_t>& n) {
    if (u.count(word(t, n, x))) out.insert(n);
  });
  return out;
}

}  // namespace oracle
