#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dcube {

inline constexpr unsigned kMaxDim = 10;

// Number of vertices of {0,1}^d.
constexpr std::size_t vertex_count(unsigned d) { return std::size_t{1} << d; }

// Removes bit `j` (1-based) from `mask`, shifting the higher bits down.
constexpr std::uint32_t drop_bit(std::uint32_t mask, unsigned j) {
  std::uint32_t low = mask & ((std::uint32_t{1} << (j - 1)) - 1);
  return low | ((mask >> j) << (j - 1));
}

// Inserts bit value `b` at position `j` (1-based), shifting higher bits up.
constexpr std::uint32_t insert_bit(std::uint32_t mask, unsigned j, bool b) {
  std::uint32_t low = mask & ((std::uint32_t{1} << (j - 1)) - 1);
  std::uint32_t high = (mask >> (j - 1)) << j;
  return low | high | (std::uint32_t{b} << (j - 1));
}

// A vertex ε of {0,1}^d. Bit i-1 of the mask holds ε_i, so the vertex's
// position in a cube point is simply its mask.
class Vertex {
 public:
  Vertex(unsigned dim, std::uint32_t bits);

  // Parses a word "ε_1ε_2...ε_d", e.g. "101".
  static Vertex parse(std::string_view word);

  unsigned dim() const { return dim_; }
  std::uint32_t bits() const { return bits_; }
  std::size_t index() const { return bits_; }
  unsigned weight() const;

  // ε_i for 1 <= i <= d.
  bool operator[](unsigned i) const;
  Vertex with(unsigned i, bool value) const;

  std::string str() const;

  bool operator==(const Vertex&) const = default;

 private:
  unsigned dim_;
  std::uint32_t bits_;
};

// A permutation σ of [d], stored as images σ(1..d).
class DigitPermutation {
 public:
  explicit DigitPermutation(std::vector<unsigned> images);

  static DigitPermutation identity(unsigned d);
  static DigitPermutation transposition(unsigned d, unsigned a, unsigned b);
  // i -> i+1, d -> 1.
  static DigitPermutation cycle(unsigned d);
  static std::vector<DigitPermutation> all(unsigned d);

  unsigned dim() const { return static_cast<unsigned>(images_.size()); }
  unsigned operator()(unsigned i) const { return images_.at(i - 1); }
  const std::vector<unsigned>& images() const { return images_; }

  // (σ∘τ)(i) = σ(τ(i)).
  DigitPermutation compose(const DigitPermutation& tau) const;
  DigitPermutation inverse() const;

  bool operator==(const DigitPermutation&) const = default;

 private:
  std::vector<unsigned> images_;
};

// σ(ε)_i = ε_{σ(i)}.
Vertex digit_permute(const DigitPermutation& sigma, Vertex v);

// Flips bit j.
Vertex reflect(unsigned j, Vertex v);

// Inserts bit b at position j of a (d-1)-vertex.
Vertex embed_face(unsigned j, bool b, Vertex w);

// Removes bit j; the inverse of embed_face.
Vertex drop_coordinate(unsigned j, Vertex v);

// A face of {0,1}^d: a set of pinned coordinates with fixed values; the
// remaining coordinates are free.
class FaceSelector {
 public:
  explicit FaceSelector(unsigned dim);

  FaceSelector& pin(unsigned i, bool value);

  unsigned dim() const { return dim_; }
  std::uint32_t pinned_mask() const { return pinned_mask_; }
  std::uint32_t pinned_bits() const { return pinned_bits_; }
  std::vector<unsigned> free_coords() const;
  unsigned face_dim() const;
  bool matches(std::uint32_t bits) const { return (bits & pinned_mask_) == pinned_bits_; }

  // The upper (value 1) or lower (value 0) face in direction j.
  static FaceSelector side(unsigned dim, unsigned j, bool value);

 private:
  unsigned dim_;
  std::uint32_t pinned_mask_ = 0;
  std::uint32_t pinned_bits_ = 0;
};

// Vertices of the face in canonical order.
std::vector<Vertex> face_vertices(const FaceSelector& sel);

}  // namespace dcube
