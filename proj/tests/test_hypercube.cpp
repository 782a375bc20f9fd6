#include <gtest/gtest.h>

#include <set>

#include "dcube/error.hpp"
#include "dcube/hypercube.hpp"

using namespace dcube;

TEST(Vertex, ParseAndPrint) {
  auto v = Vertex::parse("100");
  EXPECT_EQ(v.dim(), 3U);
  EXPECT_TRUE(v[1]);
  EXPECT_FALSE(v[2]);
  EXPECT_FALSE(v[3]);
  EXPECT_EQ(v.bits(), 1U);
  EXPECT_EQ(v.index(), 1U);
  EXPECT_EQ(v.str(), "100");
  EXPECT_EQ(Vertex::parse("011").bits(), 6U);
  EXPECT_EQ(Vertex::parse("111").weight(), 3U);
  EXPECT_EQ(Vertex(0, 0).str(), "");
  EXPECT_THROW(Vertex::parse("102"), InvalidArgument);
}

TEST(Vertex, WithChangesOneDigit) {
  auto v = Vertex::parse("010").with(3, true);
  EXPECT_EQ(v.str(), "011");
  EXPECT_EQ(v.with(2, false).str(), "001");
}

TEST(Bits, InsertAndDropAreInverse) {
  for (unsigned d = 1; d <= 5; ++d)
    for (unsigned j = 1; j <= d; ++j)
      for (std::uint32_t m = 0; m < (1U << (d - 1)); ++m)
        for (bool b : {false, true}) {
          auto e = insert_bit(m, j, b);
          EXPECT_EQ(((e >> (j - 1)) & 1U) != 0, b);
          EXPECT_EQ(drop_bit(e, j), m);
        }
}

TEST(DigitPermutation, ActsOnDigits) {
  // σ(ε)_i = ε_{σ(i)} with σ = (1 2 3) -> (2 3 1).
  DigitPermutation s({2, 3, 1});
  EXPECT_EQ(digit_permute(s, Vertex::parse("100")).str(), "001");
  EXPECT_EQ(digit_permute(s, Vertex::parse("010")).str(), "100");
}

TEST(DigitPermutation, GroupLaws) {
  auto all = DigitPermutation::all(4);
  EXPECT_EQ(all.size(), 24U);
  std::set<std::vector<unsigned>> distinct;
  for (const auto& s : all) distinct.insert(s.images());
  EXPECT_EQ(distinct.size(), 24U);
  for (const auto& s : all) {
    EXPECT_EQ(s.compose(s.inverse()), DigitPermutation::identity(4));
    for (const auto& t : all)
      for (std::uint32_t b = 0; b < 16; ++b) {
        Vertex v(4, b);
        // Acting by σ∘τ equals acting by τ, then by σ, read through digits.
        EXPECT_EQ(digit_permute(s.compose(t), v), digit_permute(t, digit_permute(s, v)));
      }
  }
  EXPECT_THROW(DigitPermutation({1, 1}), InvalidArgument);
}

TEST(DigitPermutation, NamedPermutations) {
  auto t = DigitPermutation::transposition(4, 1, 3);
  EXPECT_EQ(t.images(), (std::vector<unsigned>{3, 2, 1, 4}));
  EXPECT_EQ(DigitPermutation::cycle(3).images(), (std::vector<unsigned>{2, 3, 1}));
}

TEST(Vertex, ReflectEmbedDrop) {
  EXPECT_EQ(reflect(2, Vertex::parse("101")).str(), "111");
  EXPECT_EQ(embed_face(2, true, Vertex::parse("10")).str(), "110");
  EXPECT_EQ(drop_coordinate(2, Vertex::parse("110")).str(), "10");
  for (std::uint32_t b = 0; b < 8; ++b) EXPECT_EQ(reflect(3, reflect(3, Vertex(3, b))), Vertex(3, b));
}

TEST(FaceSelector, VerticesOfFaces) {
  FaceSelector f(3);
  f.pin(2, true);
  EXPECT_EQ(f.face_dim(), 2U);
  EXPECT_EQ(f.free_coords(), (std::vector<unsigned>{1, 3}));
  auto vs = face_vertices(f);
  ASSERT_EQ(vs.size(), 4U);
  std::vector<std::string> words;
  for (const auto& v : vs) words.push_back(v.str());
  EXPECT_EQ(words, (std::vector<std::string>{"010", "110", "011", "111"}));
  auto lower = FaceSelector::side(3, 1, false);
  for (const auto& v : face_vertices(lower)) EXPECT_FALSE(v[1]);
}

TEST(FaceSelector, CountsOverAllFaces) {
  // Each of the 3^d faces of dimension r has 2^r vertices.
  const unsigned d = 3;
  std::size_t faces = 0;
  for (std::uint32_t code = 0; code < 27; ++code) {
    FaceSelector f(d);
    std::uint32_t c = code;
    for (unsigned i = 1; i <= d; ++i, c /= 3)
      if (c % 3 != 2) f.pin(i, c % 3 == 1);
    EXPECT_EQ(face_vertices(f).size(), std::size_t{1} << f.face_dim());
    ++faces;
  }
  EXPECT_EQ(faces, 27U);
}
