#include "specnorm/gf2.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "specnorm/rng.hpp"

namespace specnorm {
namespace {

Subspace random_subspace(Rng& rng, int n, int gens) {
  std::vector<Word> g;
  for (int i = 0; i < gens; ++i)
    g.push_back(static_cast<Word>(rng.below(std::uint64_t{1} << n)));
  return Subspace::from_generators(n, g);
}

TEST(Gf2, CanonicalBasis) {
  // span{001, 011} has reduced basis {001, 010}.
  Subspace v = Subspace::from_generators(3, {0b001, 0b011});
  EXPECT_EQ(v.basis(), (std::vector<Word>{0b001, 0b010}));
  EXPECT_EQ(v.dim(), 2);

  // Generating sets differing by order or redundancy give the same basis.
  Subspace w = Subspace::from_generators(3, {0b011, 0b010, 0b001});
  EXPECT_EQ(v, w);

  EXPECT_EQ(Subspace::zero(3).dim(), 0);
  EXPECT_EQ(Subspace::full(3).dim(), 3);
  EXPECT_EQ(Subspace::from_generators(3, {0, 0}).dim(), 0);
}

TEST(Gf2, ContainsAndReduce) {
  Subspace v = Subspace::from_generators(3, {0b110});
  EXPECT_TRUE(v.contains(0b000));
  EXPECT_TRUE(v.contains(0b110));
  EXPECT_FALSE(v.contains(0b100));

  // Canonical representative is the lexicographic minimum of the coset.
  EXPECT_EQ(v.reduce(0b111), 0b001u);
  EXPECT_EQ(v.reduce(0b110), 0b000u);
  EXPECT_EQ(v.reduce(0b100), 0b010u);
}

TEST(Gf2, Elements) {
  Subspace v = Subspace::from_generators(3, {0b001, 0b110});
  EXPECT_EQ(v.elements(), (std::vector<Word>{0b000, 0b001, 0b110, 0b111}));
  EXPECT_EQ(v.size(), 4u);
}

TEST(Gf2, Perp) {
  // perp(span{110}) in F_2^3 is span{001, 110}.
  Subspace v = Subspace::from_generators(3, {0b110});
  EXPECT_EQ(perp(v).basis(), (std::vector<Word>{0b001, 0b110}));

  EXPECT_EQ(perp(Subspace::zero(4)), Subspace::full(4));
  EXPECT_EQ(perp(Subspace::full(4)), Subspace::zero(4));
}

TEST(Gf2, PerpIsInvolutionAndDimComplement) {
  Rng rng(7);
  for (int it = 0; it < 200; ++it) {
    int n = 1 + static_cast<int>(rng.below(8));
    Subspace v = random_subspace(rng, n, 1 + static_cast<int>(rng.below(5)));
    Subspace vp = perp(v);
    EXPECT_EQ(v.dim() + vp.dim(), n);
    EXPECT_EQ(perp(vp), v);
    // Every pair really pairs to zero.
    for (Word a : v.basis())
      for (Word b : vp.basis()) EXPECT_EQ(dot(a, b), 0);
  }
}

TEST(Gf2, SumIntersectModularity) {
  Rng rng(11);
  for (int it = 0; it < 200; ++it) {
    int n = 1 + static_cast<int>(rng.below(8));
    Subspace v = random_subspace(rng, n, 1 + static_cast<int>(rng.below(4)));
    Subspace w = random_subspace(rng, n, 1 + static_cast<int>(rng.below(4)));
    Subspace s = subspace_sum(v, w);
    Subspace i = intersect(v, w);
    EXPECT_EQ(v.dim() + w.dim(), s.dim() + i.dim());
    for (Word x : i.elements()) {
      EXPECT_TRUE(v.contains(x));
      EXPECT_TRUE(w.contains(x));
    }
    for (Word x : v.elements()) EXPECT_TRUE(s.contains(x));
  }
}

TEST(Gf2, CosetReps) {
  // Cosets of span{01} in F_2^2 have canonical representatives 00 and 10.
  Subspace v = Subspace::from_generators(2, {0b01});
  EXPECT_EQ(v.coset_reps(), (std::vector<Word>{0b00, 0b10}));

  EXPECT_EQ(Subspace::full(3).coset_reps(), std::vector<Word>{0});
  EXPECT_EQ(Subspace::zero(2).coset_reps(), (std::vector<Word>{0, 1, 2, 3}));
}

TEST(Gf2, CosetsPartitionExhaustively) {
  Rng rng(13);
  for (int it = 0; it < 50; ++it) {
    int n = 1 + static_cast<int>(rng.below(10));
    Subspace v = random_subspace(rng, n, 1 + static_cast<int>(rng.below(5)));
    std::vector<int> hit(std::size_t{1} << n, 0);
    for (Word rep : v.coset_reps()) {
      EXPECT_EQ(v.reduce(rep), rep);  // reps are canonical
      Word lex_min = rep;
      for (Word e : v.elements()) {
        ++hit[rep ^ e];
        lex_min = std::min(lex_min, static_cast<Word>(rep ^ e));
      }
      EXPECT_EQ(lex_min, rep);  // and lexicographically minimal
    }
    for (int h : hit) EXPECT_EQ(h, 1);
  }
}

TEST(Gf2, SpanWith) {
  Subspace v = Subspace::from_generators(4, {0b0001});
  Subspace w = span_with(v, 0b1000);
  EXPECT_EQ(w.dim(), 2);
  EXPECT_TRUE(w.contains(0b1001));
  EXPECT_EQ(span_with(v, 0b0001), v);
  EXPECT_EQ(span_with(v, 0), v);
}

TEST(Gf2, SubspaceCountsMatchGaloisNumbers) {
  // Number of subspaces of F_2^n for n = 0..5: 1, 2, 5, 16, 67, 374.
  const std::uint64_t expected[] = {1, 2, 5, 16, 67, 374};
  for (int n = 0; n <= 5; ++n) {
    std::set<std::vector<Word>> seen;
    std::uint64_t count = 0;
    for_each_subspace(n, [&](const Subspace& s) {
      ++count;
      EXPECT_EQ(s.ambient_dim(), n);
      EXPECT_TRUE(seen.insert(s.basis()).second);  // no duplicates
      EXPECT_EQ(Subspace::from_generators(n, s.basis()), s);  // already canonical
    });
    EXPECT_EQ(count, expected[n]) << "n=" << n;
  }
  // Gaussian binomial [4 choose 2]_2 = 35.
  std::uint64_t c = 0;
  for_each_subspace_of_dim(4, 2, [&](const Subspace&) { ++c; });
  EXPECT_EQ(c, 35u);
}

TEST(Gf2, Hex) {
  EXPECT_EQ(to_hex(0b11111, 5), "1f");
  EXPECT_EQ(to_hex(0, 5), "00");
  EXPECT_EQ(to_hex(0x123, 12), "123");
  EXPECT_EQ(from_hex("1f", 5), Word{0x1f});
  EXPECT_FALSE(from_hex("20", 5).has_value());  // out of range for n=5
  EXPECT_FALSE(from_hex("1G", 8).has_value());
  Rng rng(3);
  for (int it = 0; it < 100; ++it) {
    int n = 1 + static_cast<int>(rng.below(24));
    Word x = static_cast<Word>(rng.below(std::uint64_t{1} << n));
    EXPECT_EQ(from_hex(to_hex(x, n), n), x);
  }
}

TEST(Gf2, DimChecks) {
  EXPECT_THROW(Subspace::zero(25), dim_mismatch);
  EXPECT_THROW(Subspace::zero(-1), dim_mismatch);
  EXPECT_THROW(subspace_sum(Subspace::zero(3), Subspace::zero(4)), dim_mismatch);
  EXPECT_THROW(intersect(Subspace::full(2), Subspace::full(3)), dim_mismatch);
}

TEST(Gf2, PointSet) {
  PointSet a = PointSet::of(3, {5, 1, 5, 3});
  EXPECT_EQ(a.elems, (std::vector<Word>{1, 3, 5}));
  EXPECT_TRUE(a.contains(3));
  EXPECT_FALSE(a.contains(0));
  PointSet b = PointSet::of(3, {1, 3});
  EXPECT_TRUE(is_subset(b, a));
  EXPECT_FALSE(is_subset(a, b));
}

TEST(Gf2, Dot) {
  EXPECT_EQ(dot(0b101, 0b100), 1);
  EXPECT_EQ(dot(0b101, 0b111), 0);
  EXPECT_EQ(dot(0, 0b111), 0);
}

}  // namespace
}  // namespace specnorm
