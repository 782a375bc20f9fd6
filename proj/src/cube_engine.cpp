#include "dcube/cube_engine.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <sstream>

#include "text_util.hpp"

namespace dcube {

namespace {

bool row_less(const PointId* a, const PointId* b, std::size_t w) {
  return std::lexicographical_compare(a, a + w, b, b + w);
}

std::vector<PointId> sort_dedup(std::vector<PointId> flat, std::size_t w) {
  std::size_t n = flat.size() / w;
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0U);
  const PointId* base = flat.data();
  std::sort(idx.begin(), idx.end(),
            [&](std::uint32_t a, std::uint32_t b) { return row_less(base + a * w, base + b * w, w); });
  std::vector<PointId> out;
  out.reserve(flat.size());
  for (std::size_t k = 0; k < n; ++k) {
    const PointId* r = base + std::size_t{idx[k]} * w;
    if (k > 0 && std::equal(r, r + w, out.end() - static_cast<std::ptrdiff_t>(w))) continue;
    out.insert(out.end(), r, r + w);
  }
  return out;
}

std::string show(CubeView a) {
  return "(" + text::join(a.begin(), a.end()) + ")";
}

void check_dirs(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs) {
  if (dirs.empty() || dirs.size() > kMaxDim) throw InvalidArgument("direction list must be non-empty");
  std::vector<bool> seen(sys.dim() + 1, false);
  for (unsigned j : dirs) {
    if (j < 1 || j > sys.dim()) throw InvalidArgument("direction out of range");
    if (seen[j]) throw InvalidArgument("directions must be distinct");
    seen[j] = true;
  }
}

std::size_t tuples_per_base(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs,
                            std::size_t bases, const EngineOptions& opts) {
  std::size_t count = bases;
  for (unsigned j : dirs) {
    std::uint64_t l = sys.order(j);
    if (l > opts.max_tuples || count > opts.max_tuples / l)
      throw SizeLimitExceeded("cube enumeration exceeds the cap of " +
                              std::to_string(opts.max_tuples) + " tuples");
    count *= l;
  }
  return count / std::max<std::size_t>(bases, 1);
}

// Appends every cube rooted at x (all 2^k coordinates) to `out`.
void cubes_at(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs, PointId x,
              std::vector<PointId>& out) {
  const unsigned k = static_cast<unsigned>(dirs.size());
  const std::size_t w = vertex_count(k);
  std::vector<std::int64_t> n(k, 0);
  CubePoint c(w);
  while (true) {
    c[0] = x;
    for (unsigned l = 0; l < k; ++l) {
      std::size_t half = std::size_t{1} << l;
      for (std::size_t e = 0; e < half; ++e) c[e | half] = sys.power(dirs[l], n[l], c[e]);
    }
    out.insert(out.end(), c.begin(), c.end());
    unsigned l = 0;
    while (l < k && ++n[l] == static_cast<std::int64_t>(sys.order(dirs[l]))) n[l++] = 0;
    if (l == k) break;
  }
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  return h;
}

}  // namespace

unsigned cube_dim(CubeView a) {
  if (a.empty() || !std::has_single_bit(a.size()) || a.size() > vertex_count(kMaxDim))
    throw InvalidArgument("cube point length " + std::to_string(a.size()) +
                          " is not a power of two within the dimension bound");
  return static_cast<unsigned>(std::countr_zero(a.size()));
}

TupleSet TupleSet::from_flat(std::size_t width, std::vector<PointId> flat) {
  if (width == 0 || flat.size() % width) throw InvalidArgument("ragged tuple buffer");
  TupleSet t(width);
  t.flat_ = sort_dedup(std::move(flat), width);
  return t;
}

TupleSet TupleSet::from_sorted_flat(std::size_t width, std::vector<PointId> flat) {
  if (width == 0 || flat.size() % width) throw InvalidArgument("ragged tuple buffer");
  TupleSet t(width);
  t.flat_ = std::move(flat);
  return t;
}

std::optional<std::size_t> TupleSet::find(CubeView row) const {
  if (row.size() != width_ || width_ == 0) return std::nullopt;
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (row_less(flat_.data() + mid * width_, row.data(), width_))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && std::equal(row.begin(), row.end(), flat_.begin() + static_cast<std::ptrdiff_t>(lo * width_)))
    return lo;
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> TupleSet::prefix_range(CubeView prefix) const {
  const std::size_t p = prefix.size();
  if (p > width_) throw InvalidArgument("prefix longer than rows");
  auto cmp_prefix = [&](std::size_t i) {
    const PointId* r = flat_.data() + i * width_;
    for (std::size_t c = 0; c < p; ++c)
      if (r[c] != prefix[c]) return r[c] < prefix[c] ? -1 : 1;
    return 0;
  };
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (cmp_prefix(mid) < 0) lo = mid + 1; else hi = mid;
  }
  std::size_t begin = lo;
  hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (cmp_prefix(mid) <= 0) lo = mid + 1; else hi = mid;
  }
  return {begin, lo};
}

CubeSet::CubeSet(unsigned dim, std::vector<unsigned> dirs, TupleSet points)
    : dim_(dim), dirs_(std::move(dirs)), points_(std::move(points)) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("cube dimension out of range");
  if (dirs_.size() != dim) throw InvalidArgument("cube set needs one direction per dimension");
  if (points_.width() != vertex_count(dim) && !(points_.empty() && points_.width() == 0))
    throw InvalidArgument("cube set rows have the wrong width");
  if (points_.width() == 0) points_ = TupleSet(vertex_count(dim));
}

std::pair<std::size_t, std::size_t> CubeSet::section(PointId x0) const {
  PointId p[1] = {x0};
  return points_.prefix_range(CubeView(p, 1));
}

std::vector<unsigned> all_directions(unsigned d) {
  std::vector<unsigned> v(d);
  std::iota(v.begin(), v.end(), 1U);
  return v;
}

CubeSet enumerate_Q(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs,
                    const EngineOptions& opts) {
  check_dirs(sys, dirs);
  tuples_per_base(sys, dirs, sys.size(), opts);
  const std::size_t w = vertex_count(static_cast<unsigned>(dirs.size()));
  const unsigned workers = effective_workers(sys.size(), opts.threads);
  std::vector<std::vector<PointId>> parts(workers);
  parallel_chunks(sys.size(), workers, [&](unsigned wk, std::size_t b, std::size_t e) {
    std::vector<PointId> block;
    for (std::size_t x = b; x < e; ++x) {
      block.clear();
      cubes_at(sys, dirs, static_cast<PointId>(x), block);
      auto sorted = sort_dedup(std::move(block), w);
      parts[wk].insert(parts[wk].end(), sorted.begin(), sorted.end());
      block = {};
    }
  });
  // Rows are grouped by their base coordinate, so worker-order concatenation
  // is already sorted.
  std::vector<PointId> flat;
  for (auto& p : parts) flat.insert(flat.end(), p.begin(), p.end());
  return CubeSet(static_cast<unsigned>(dirs.size()), dirs,
                 TupleSet::from_sorted_flat(w, std::move(flat)));
}

TupleSet enumerate_K(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs, PointId x0,
                     const EngineOptions& opts) {
  check_dirs(sys, dirs);
  sys.check_point(x0);
  tuples_per_base(sys, dirs, 1, opts);
  const std::size_t w = vertex_count(static_cast<unsigned>(dirs.size()));
  std::vector<PointId> block;
  cubes_at(sys, dirs, x0, block);
  std::vector<PointId> k;
  k.reserve(block.size() / w * (w - 1));
  for (std::size_t r = 0; r < block.size(); r += w) k.insert(k.end(), block.begin() + static_cast<std::ptrdiff_t>(r + 1), block.begin() + static_cast<std::ptrdiff_t>(r + w));
  return TupleSet::from_flat(w - 1, std::move(k));
}

UcppVerdict ucpp_check(const CubeSet& cubes) {
  const std::size_t w = vertex_count(cubes.dim());
  const std::size_t n = cubes.size();
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keys(n);
  for (std::size_t v = 0; v < w; ++v) {
    for (std::size_t i = 0; i < n; ++i) {
      auto r = cubes[i];
      std::uint64_t h = 0x51ed27;
      for (std::size_t c = 0; c < w; ++c)
        if (c != v) h = mix(h, r[c]);
      keys[i] = {h, static_cast<std::uint32_t>(i)};
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t s = 0; s < n;) {
      std::size_t e = s + 1;
      while (e < n && keys[e].first == keys[s].first) ++e;
      for (std::size_t a = s; a < e; ++a) {
        for (std::size_t b = a + 1; b < e; ++b) {
          auto ra = cubes[keys[a].second], rb = cubes[keys[b].second];
          bool same = true;
          for (std::size_t c = 0; c < w && same; ++c) same = c == v || ra[c] == rb[c];
          if (same) {
            CubePoint pa(ra.begin(), ra.end()), pb(rb.begin(), rb.end());
            if (pb < pa) std::swap(pa, pb);
            return {false, UcppWitness{pa, pb, Vertex(cubes.dim(), static_cast<std::uint32_t>(v))}};
          }
        }
      }
      s = e;
    }
  }
  return {true, std::nullopt};
}

CubePoint constant_cube(PointId x, unsigned d) {
  if (d < 1 || d > kMaxDim) throw InvalidArgument("cube dimension out of range");
  return CubePoint(vertex_count(d), x);
}

CubePoint glue(CubeView a, CubeView b, unsigned j) {
  unsigned d = cube_dim(a);
  if (cube_dim(b) != d) throw InvalidArgument("glue: dimension mismatch");
  if (j < 1 || j > d) throw InvalidArgument("glue: direction out of range");
  const std::uint32_t m = std::uint32_t{1} << (j - 1);
  for (std::uint32_t e = 0; e < a.size(); ++e)
    if ((e & m) && a[e] != b[e ^ m])
      throw InvalidArgument("glue: upper face of the first point differs from the lower face of the second");
  CubePoint z(a.size());
  for (std::uint32_t e = 0; e < a.size(); ++e) z[e] = (e & m) ? b[e] : a[e];
  return z;
}

CubePoint insert(CubeView a, CubeView b, unsigned j, InsertSide side) {
  unsigned d = cube_dim(a);
  if (cube_dim(b) != d) throw InvalidArgument("insert: dimension mismatch");
  if (j < 1 || j > d) throw InvalidArgument("insert: direction out of range");
  const std::uint32_t m = std::uint32_t{1} << (j - 1);
  const std::uint32_t kept = side == InsertSide::UpperIntoLower ? m : 0;
  CubePoint z(a.size());
  for (std::uint32_t e = 0; e < a.size(); ++e) z[e] = (e & m) == kept ? b[e] : a[e ^ m];
  return z;
}

CubePoint duplicate(CubeView a, const std::vector<unsigned>& positions, unsigned d) {
  unsigned k = cube_dim(a);
  if (positions.size() != k) throw InvalidArgument("duplicate: one position per source direction");
  if (d < k || d > kMaxDim) throw InvalidArgument("duplicate: target dimension too small");
  std::vector<bool> used(d + 1, false);
  for (unsigned p : positions) {
    if (p < 1 || p > d || used[p]) throw InvalidArgument("duplicate: positions must be distinct in [1, d]");
    used[p] = true;
  }
  CubePoint y(vertex_count(d));
  for (std::uint32_t e = 0; e < y.size(); ++e) {
    std::uint32_t eta = 0;
    for (unsigned l = 0; l < k; ++l)
      if ((e >> (positions[l] - 1)) & 1U) eta |= std::uint32_t{1} << l;
    y[e] = a[eta];
  }
  return y;
}

CubePoint project(CubeView a, const FaceSelector& sel) {
  if (cube_dim(a) != sel.dim()) throw InvalidArgument("project: dimension mismatch");
  CubePoint out;
  out.reserve(vertex_count(sel.face_dim()));
  for (auto v : face_vertices(sel)) out.push_back(a[v.index()]);
  return out;
}

CubePoint permute_coordinates(const DigitPermutation& sigma, CubeView a) {
  unsigned d = cube_dim(a);
  CubePoint out(a.size());
  for (std::uint32_t e = 0; e < a.size(); ++e) out[e] = a[digit_permute(sigma, Vertex(d, e)).index()];
  return out;
}

CubePoint reflect_coordinates(unsigned j, CubeView a) {
  unsigned d = cube_dim(a);
  if (j < 1 || j > d) throw InvalidArgument("reflect: direction out of range");
  CubePoint out(a.size());
  const std::uint32_t m = std::uint32_t{1} << (j - 1);
  for (std::uint32_t e = 0; e < a.size(); ++e) out[e] = a[e ^ m];
  return out;
}

CubePoint face_transform(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs, unsigned l,
                         std::int64_t p, CubeView a) {
  unsigned k = cube_dim(a);
  if (dirs.size() != k || l < 1 || l > k) throw InvalidArgument("face transform: bad direction");
  CubePoint out(a.begin(), a.end());
  const std::uint32_t m = std::uint32_t{1} << (l - 1);
  for (std::uint32_t e = 0; e < a.size(); ++e)
    if (e & m) out[e] = sys.power(dirs[l - 1], p, a[e]);
  return out;
}

CubePoint diagonal_transform(const FiniteZdSystem& sys, unsigned g, std::int64_t p, CubeView a) {
  if (g < 1 || g > sys.dim()) throw InvalidArgument("diagonal transform: bad generator");
  CubePoint out(a.size());
  for (std::size_t e = 0; e < a.size(); ++e) out[e] = sys.power(g, p, a[e]);
  return out;
}

CubePoint apply(const FiniteZdSystem& sys, const std::vector<unsigned>& dirs,
                const FaceGroupElement& g, CubeView a) {
  if (g.face.size() != dirs.size() || g.diagonal.size() != sys.dim())
    throw InvalidArgument("face group element has the wrong shape");
  CubePoint out(a.begin(), a.end());
  for (unsigned l = 1; l <= dirs.size(); ++l)
    if (g.face[l - 1]) out = face_transform(sys, dirs, l, g.face[l - 1], out);
  for (unsigned i = 1; i <= sys.dim(); ++i)
    if (g.diagonal[i - 1]) out = diagonal_transform(sys, i, g.diagonal[i - 1], out);
  return out;
}

FaceOrbit face_group_orbit(const FiniteZdSystem& sys, const CubeSet& cubes, CubeView start) {
  auto s = cubes.points().find(start);
  if (!s) throw InvalidArgument("face_group_orbit: start point is not in the cube set");
  FaceOrbit result;
  std::vector<bool> seen(cubes.size(), false);
  std::vector<std::size_t> queue{*s};
  seen[*s] = true;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    auto cur = cubes[queue[h]];
    std::vector<CubePoint> images;
    for (unsigned l = 1; l <= cubes.dim(); ++l)
      for (std::int64_t p : {1, -1}) images.push_back(face_transform(sys, cubes.dirs(), l, p, cur));
    for (unsigned g = 1; g <= sys.dim(); ++g)
      for (std::int64_t p : {1, -1}) images.push_back(diagonal_transform(sys, g, p, cur));
    for (const auto& img : images) {
      auto idx = cubes.points().find(img);
      if (!idx) {
        if (!result.escaped) result.escaped = img;
        continue;
      }
      if (!seen[*idx]) {
        seen[*idx] = true;
        queue.push_back(*idx);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  std::vector<PointId> flat;
  for (auto i : queue) flat.insert(flat.end(), cubes[i].begin(), cubes[i].end());
  result.points = TupleSet::from_sorted_flat(cubes.points().width(), std::move(flat));
  return result;
}

std::string format_cube_set(const CubeSet& cubes) {
  std::ostringstream os;
  os << "cube-set d=" << cubes.dim() << " dirs=" << text::join(cubes.dirs().begin(), cubes.dirs().end())
     << "\n";
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    auto r = cubes[i];
    os << text::join(r.begin(), r.end()) << "\n";
  }
  return os.str();
}

CubeSet parse_cube_set(std::string_view text) {
  auto lines = text::logical_lines(text);
  if (lines.empty()) throw ParseError(1, "expected 'cube-set' header");
  const auto& head = lines.front();
  auto fields = text::parse_header(head, "cube-set");
  if (!fields.count("d") || !fields.count("dirs") || fields.size() != 2)
    throw ParseError(head.number, "cube-set header needs d=<k> and dirs=<j1,...>");
  auto k = text::parse_uint(fields["d"], head.number);
  if (k < 1 || k > kMaxDim) throw ParseError(head.number, "cube dimension out of range");
  std::vector<unsigned> dirs;
  for (auto j : text::parse_csv_ints(fields["dirs"], head.number)) {
    if (j < 1 || j > static_cast<std::int64_t>(kMaxDim)) throw ParseError(head.number, "direction out of range");
    if (std::find(dirs.begin(), dirs.end(), static_cast<unsigned>(j)) != dirs.end())
      throw ParseError(head.number, "directions must be distinct");
    dirs.push_back(static_cast<unsigned>(j));
  }
  if (dirs.size() != k) throw ParseError(head.number, "dirs must list exactly d directions");
  const std::size_t w = vertex_count(static_cast<unsigned>(k));
  std::vector<PointId> flat;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto row = text::parse_csv_ints(lines[i].text, lines[i].number);
    if (row.size() != w)
      throw ParseError(lines[i].number, "expected " + std::to_string(w) + " coordinates");
    for (auto v : row) {
      if (v < 0 || v > static_cast<std::int64_t>(UINT32_MAX)) throw ParseError(lines[i].number, "bad point id");
      flat.push_back(static_cast<PointId>(v));
    }
  }
  return CubeSet(static_cast<unsigned>(k), std::move(dirs), TupleSet::from_flat(w, std::move(flat)));
}

CheckList surgery_battery(const FiniteZdSystem& sys, const CubeSet& q, const EngineOptions& opts) {
  CheckList out;
  const unsigned d = sys.dim();
  const std::size_t w = vertex_count(d);
  if (q.dim() != d || q.dirs() != all_directions(d))
    throw InvalidArgument("surgery battery expects the full-direction cube set");

  {
    std::string bad;
    for (PointId x = 0; x < sys.size() && bad.empty(); ++x)
      if (!q.contains(constant_cube(x, d))) bad = "missing constant cube of point " + std::to_string(x);
    out.push_back(verdict("constant cubes", bad.empty(), bad.empty() ? std::to_string(sys.size()) + " constant cubes present" : bad));
  }
  {
    std::string bad;
    for (unsigned j = 1; j <= d && bad.empty(); ++j) {
      auto qj = enumerate_Q(sys, {j}, opts);
      for (std::size_t i = 0; i < qj.size() && bad.empty(); ++i) {
        CubePoint r{qj[i][1], qj[i][0]};
        if (!qj.contains(r)) bad = "T" + std::to_string(j) + ": " + show(qj[i]) + " present but its reverse is not";
      }
    }
    out.push_back(verdict("single-direction symmetry", bad.empty(), bad));
  }
  {
    std::string bad;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < q.size() && bad.empty(); ++i) {
      for (unsigned l = 1; l <= d && bad.empty(); ++l)
        for (std::int64_t p : {1, -1}) {
          auto img = face_transform(sys, q.dirs(), l, p, q[i]);
          ++checked;
          if (!q.contains(img)) { bad = "face transformation " + std::to_string(l) + " maps " + show(q[i]) + " outside Q"; break; }
        }
      for (unsigned g = 1; g <= d && bad.empty(); ++g)
        for (std::int64_t p : {1, -1}) {
          auto img = diagonal_transform(sys, g, p, q[i]);
          ++checked;
          if (!q.contains(img)) { bad = "diagonal T" + std::to_string(g) + " maps " + show(q[i]) + " outside Q"; break; }
        }
    }
    out.push_back(verdict("face-group invariance", bad.empty(), bad.empty() ? std::to_string(checked) + " images checked" : bad));
  }
  {
    std::string bad;
    for (const auto& sigma : DigitPermutation::all(d)) {
      auto qs = enumerate_Q(sys, sigma.images(), opts);
      std::vector<PointId> flat;
      flat.reserve(qs.size() * w);
      for (std::size_t i = 0; i < qs.size(); ++i) {
        auto p = permute_coordinates(sigma, qs[i]);
        flat.insert(flat.end(), p.begin(), p.end());
      }
      auto image = TupleSet::from_flat(w, std::move(flat));
      if (!(image == q.points()) || qs.size() != q.size()) {
        bad = "digit permutation (" + text::join(sigma.images().begin(), sigma.images().end()) + ") does not map the reordered cube set onto Q";
        break;
      }
    }
    out.push_back(verdict("digit permutations", bad.empty(), bad));
  }
  {
    std::string bad;
    for (unsigned j = 1; j <= d && bad.empty(); ++j)
      for (std::size_t i = 0; i < q.size(); ++i)
        if (!q.contains(reflect_coordinates(j, q[i]))) { bad = "reflection " + std::to_string(j) + " maps " + show(q[i]) + " outside Q"; break; }
    out.push_back(verdict("reflections", bad.empty(), bad));
  }
  {
    // Projection onto every face; the sub-cube set is keyed by the free
    // coordinates as a bitmask.
    std::map<std::uint32_t, CubeSet> sub;
    std::string bad;
    std::size_t checked = 0;
    for (std::uint32_t pinned = 0; pinned < w && bad.empty(); ++pinned) {
      std::uint32_t free = static_cast<std::uint32_t>(w - 1) & ~pinned;
      if (free == 0) continue;
      if (!sub.count(free)) {
        std::vector<unsigned> fd;
        for (unsigned i = 1; i <= d; ++i) if ((free >> (i - 1)) & 1U) fd.push_back(i);
        sub.emplace(free, enumerate_Q(sys, fd, opts));
      }
      const auto& target = sub.at(free);
      for (std::uint32_t xi = 0; xi < w && bad.empty(); ++xi) {
        if (xi & ~pinned) continue;
        FaceSelector sel(d);
        for (unsigned i = 1; i <= d; ++i) if ((pinned >> (i - 1)) & 1U) sel.pin(i, (xi >> (i - 1)) & 1U);
        for (std::size_t i = 0; i < q.size(); ++i) {
          ++checked;
          if (!target.contains(project(q[i], sel))) { bad = "projection of " + show(q[i]) + " leaves the face cube set"; break; }
        }
      }
    }
    out.push_back(verdict("projections", bad.empty(), bad.empty() ? std::to_string(checked) + " projections checked" : bad));
  }
  {
    std::string bad;
    for (std::uint32_t subset = 1; subset < w && bad.empty(); ++subset) {
      std::vector<unsigned> pos;
      for (unsigned i = 1; i <= d; ++i) if ((subset >> (i - 1)) & 1U) pos.push_back(i);
      auto qs = enumerate_Q(sys, pos, opts);
      for (std::size_t i = 0; i < qs.size(); ++i)
        if (!q.contains(duplicate(qs[i], pos, d))) { bad = "duplicate of " + show(qs[i]) + " is not in Q"; break; }
    }
    out.push_back(verdict("duplications", bad.empty(), bad));
  }
  {
    std::string glue_bad, insert_bad;
    std::size_t glued = 0, inserted = 0;
    for (unsigned j = 1; j <= d; ++j) {
      auto lower = FaceSelector::side(d, j, false), upper = FaceSelector::side(d, j, true);
      std::map<CubePoint, std::vector<std::size_t>> by_lower, by_upper;
      for (std::size_t i = 0; i < q.size(); ++i) {
        by_lower[project(q[i], lower)].push_back(i);
        by_upper[project(q[i], upper)].push_back(i);
      }
      for (std::size_t i = 0; i < q.size() && glue_bad.empty(); ++i) {
        auto it = by_lower.find(project(q[i], upper));
        if (it == by_lower.end()) continue;
        for (auto b : it->second) {
          ++glued;
          auto z = glue(q[i], q[b], j);
          if (!q.contains(z)) { glue_bad = "gluing " + show(q[i]) + " and " + show(q[b]) + " along " + std::to_string(j) + " leaves Q"; break; }
        }
      }
      for (const auto& [face, members] : by_upper) {
        if (!insert_bad.empty()) break;
        for (auto a : members) {
          for (auto b : members) {
            ++inserted;
            auto z = insert(q[a], q[b], j, InsertSide::LowerIntoUpper);
            if (!q.contains(z)) { insert_bad = "inserting the lower face of " + show(q[a]) + " into " + show(q[b]) + " leaves Q"; break; }
          }
          if (!insert_bad.empty()) break;
        }
      }
    }
    out.push_back(verdict("gluing closure", glue_bad.empty(), glue_bad.empty() ? std::to_string(glued) + " gluings checked" : glue_bad));
    out.push_back(verdict("insertion closure", insert_bad.empty(), insert_bad.empty() ? std::to_string(inserted) + " insertions checked" : insert_bad));
  }
  return out;
}

}  // namespace dcube
