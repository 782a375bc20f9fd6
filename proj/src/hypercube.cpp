#include "dcube/hypercube.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "dcube/error.hpp"

namespace dcube {

namespace {

void check_dim(unsigned d) {
  if (d < 1 || d > kMaxDim)
    throw InvalidArgument("cube dimension " + std::to_string(d) + " outside [1, " +
                          std::to_string(kMaxDim) + "]");
}

void check_direction(unsigned j, unsigned d) {
  if (j < 1 || j > d)
    throw InvalidArgument("direction " + std::to_string(j) + " outside [1, " + std::to_string(d) +
                          "]");
}

}  // namespace

Vertex::Vertex(unsigned dim, std::uint32_t bits) : dim_(dim), bits_(bits) {
  // Dimension 0 is allowed here: it is the single vertex of the empty face.
  if (dim > kMaxDim) check_dim(dim);
  if (bits >= vertex_count(dim)) throw InvalidArgument("vertex bits exceed dimension");
}

Vertex Vertex::parse(std::string_view word) {
  check_dim(static_cast<unsigned>(word.size()));
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] == '1')
      bits |= std::uint32_t{1} << i;
    else if (word[i] != '0')
      throw InvalidArgument("vertex word must contain only 0 and 1");
  }
  return Vertex(static_cast<unsigned>(word.size()), bits);
}

unsigned Vertex::weight() const { return static_cast<unsigned>(std::popcount(bits_)); }

bool Vertex::operator[](unsigned i) const {
  check_direction(i, dim_);
  return (bits_ >> (i - 1)) & 1U;
}

Vertex Vertex::with(unsigned i, bool value) const {
  check_direction(i, dim_);
  std::uint32_t m = std::uint32_t{1} << (i - 1);
  return Vertex(dim_, value ? (bits_ | m) : (bits_ & ~m));
}

std::string Vertex::str() const {
  std::string s(dim_, '0');
  for (unsigned i = 0; i < dim_; ++i)
    if ((bits_ >> i) & 1U) s[i] = '1';
  return s;
}

DigitPermutation::DigitPermutation(std::vector<unsigned> images) : images_(std::move(images)) {
  check_dim(dim());
  std::vector<bool> seen(images_.size() + 1, false);
  for (unsigned v : images_) {
    if (v < 1 || v > images_.size() || seen[v])
      throw InvalidArgument("digit permutation is not a bijection of [d]");
    seen[v] = true;
  }
}

DigitPermutation DigitPermutation::identity(unsigned d) {
  check_dim(d);
  std::vector<unsigned> im(d);
  std::iota(im.begin(), im.end(), 1U);
  return DigitPermutation(std::move(im));
}

DigitPermutation DigitPermutation::transposition(unsigned d, unsigned a, unsigned b) {
  auto p = identity(d);
  check_direction(a, d);
  check_direction(b, d);
  std::swap(p.images_[a - 1], p.images_[b - 1]);
  return p;
}

DigitPermutation DigitPermutation::cycle(unsigned d) {
  check_dim(d);
  std::vector<unsigned> im(d);
  for (unsigned i = 0; i < d; ++i) im[i] = (i + 1) % d + 1;
  return DigitPermutation(std::move(im));
}

std::vector<DigitPermutation> DigitPermutation::all(unsigned d) {
  auto p = identity(d).images_;
  std::vector<DigitPermutation> out;
  do {
    out.emplace_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

DigitPermutation DigitPermutation::compose(const DigitPermutation& tau) const {
  if (tau.dim() != dim()) throw InvalidArgument("digit permutation dimension mismatch");
  std::vector<unsigned> im(dim());
  for (unsigned i = 1; i <= dim(); ++i) im[i - 1] = (*this)(tau(i));
  return DigitPermutation(std::move(im));
}

DigitPermutation DigitPermutation::inverse() const {
  std::vector<unsigned> im(dim());
  for (unsigned i = 1; i <= dim(); ++i) im[(*this)(i) - 1] = i;
  return DigitPermutation(std::move(im));
}

Vertex digit_permute(const DigitPermutation& sigma, Vertex v) {
  if (sigma.dim() != v.dim()) throw InvalidArgument("digit permutation dimension mismatch");
  std::uint32_t out = 0;
  for (unsigned i = 1; i <= v.dim(); ++i)
    if ((v.bits() >> (sigma(i) - 1)) & 1U) out |= std::uint32_t{1} << (i - 1);
  return Vertex(v.dim(), out);
}

Vertex reflect(unsigned j, Vertex v) {
  check_direction(j, v.dim());
  return Vertex(v.dim(), v.bits() ^ (std::uint32_t{1} << (j - 1)));
}

Vertex embed_face(unsigned j, bool b, Vertex w) {
  unsigned d = w.dim() + 1;
  check_dim(d);
  check_direction(j, d);
  return Vertex(d, insert_bit(w.bits(), j, b));
}

Vertex drop_coordinate(unsigned j, Vertex v) {
  check_direction(j, v.dim());
  return Vertex(v.dim() - 1, drop_bit(v.bits(), j));
}

FaceSelector::FaceSelector(unsigned dim) : dim_(dim) { check_dim(dim); }

FaceSelector& FaceSelector::pin(unsigned i, bool value) {
  check_direction(i, dim_);
  std::uint32_t m = std::uint32_t{1} << (i - 1);
  pinned_mask_ |= m;
  pinned_bits_ = value ? (pinned_bits_ | m) : (pinned_bits_ & ~m);
  return *this;
}

std::vector<unsigned> FaceSelector::free_coords() const {
  std::vector<unsigned> out;
  for (unsigned i = 1; i <= dim_; ++i)
    if (!((pinned_mask_ >> (i - 1)) & 1U)) out.push_back(i);
  return out;
}

unsigned FaceSelector::face_dim() const {
  return dim_ - static_cast<unsigned>(std::popcount(pinned_mask_));
}

FaceSelector FaceSelector::side(unsigned dim, unsigned j, bool value) {
  FaceSelector s(dim);
  s.pin(j, value);
  return s;
}

std::vector<Vertex> face_vertices(const FaceSelector& sel) {
  std::vector<Vertex> out;
  out.reserve(vertex_count(sel.face_dim()));
  for (std::uint32_t b = 0; b < vertex_count(sel.dim()); ++b)
    if (sel.matches(b)) out.emplace_back(sel.dim(), b);
  return out;
}

}  // namespace dcube
