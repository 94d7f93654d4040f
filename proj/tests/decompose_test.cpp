#include "specnorm/decompose.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "specnorm/fourier.hpp"
#include "specnorm/gf2.hpp"
#include "specnorm/rng.hpp"

using namespace specnorm;

namespace {

FunctionTable indicator(const Subspace& v) {
  FunctionTable f = FunctionTable::zero(v.ambient_dim());
  for (Word x : v.elements()) f[x] = Dyadic(1);
  return f;
}

FunctionTable table_of_terms(int n, const std::vector<SignedTerm>& terms) {
  FunctionTable f = FunctionTable::zero(n);
  for (const SignedTerm& t : terms)
    for (Word x : t.subspace.elements()) f[x] = f[x] + Dyadic(t.sign);
  return f;
}

bool tables_equal(const FunctionTable& a, const FunctionTable& b) {
  if (a.n != b.n) return false;
  for (std::size_t x = 0; x < a.size(); ++x)
    if (a[x] != b[x]) return false;
  return true;
}

TEST(CosetToSubspaces, RepInsideGivesSingleTerm) {
  Subspace v = Subspace::from_generators(4, {0b0011, 0b0100});
  auto terms = coset_to_subspaces(-1, Coset::of(0b0111, v));
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].sign, -1);
  EXPECT_EQ(terms[0].subspace.basis(), v.basis());
}

TEST(CosetToSubspaces, RepOutsideGivesDifferenceOfSubspaces) {
  Subspace v = Subspace::from_generators(4, {0b0011});
  auto terms = coset_to_subspaces(1, Coset::of(0b1000, v));
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_EQ(terms[0].sign, 1);
  EXPECT_EQ(terms[0].subspace.dim(), v.dim() + 1);
  EXPECT_EQ(terms[1].sign, -1);
  EXPECT_EQ(terms[1].subspace.basis(), v.basis());
}

// 1_{x+V} = sum of the returned signed indicators, for every coset of every
// subspace of a five-dimensional space.
TEST(CosetToSubspaces, ExhaustiveIdentityOnAllCosets) {
  const int n = 5;
  std::size_t subspaces = 0;
  for_each_subspace(n, [&](const Subspace& v) {
    ++subspaces;
    for (Word rep : v.coset_reps()) {
      auto terms = coset_to_subspaces(1, Coset::of(rep, v));
      FunctionTable sum = table_of_terms(n, terms);
      for (Word x = 0; x < (Word{1} << n); ++x) {
        int expect = v.reduce(x) == v.reduce(rep) ? 1 : 0;
        ASSERT_EQ(sum[x], Dyadic(expect)) << "rep " << rep << " x " << x;
      }
    }
  });
  EXPECT_EQ(subspaces, 374u);
}

TEST(CosetToSubspaces, RejectsBadSign) {
  Subspace v = Subspace::zero(3);
  EXPECT_THROW(coset_to_subspaces(2, Coset::of(0, v)), precondition_error);
}

TEST(VerifyDecomposition, ExactSumPasses) {
  Subspace v = Subspace::from_generators(5, {0b00011, 0b00100});
  Subspace w = Subspace::from_generators(5, {0b11000});
  Decomposition d;
  d.terms = {SignedTerm{1, v}, SignedTerm{-1, w}};
  d.l = 2;
  FunctionTable f = table_of_terms(5, d.terms);
  VerifyReport report = verify_decomposition(f, d);
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(report.l, 2u);
  EXPECT_TRUE(report.max_deviation.is_zero());
}

TEST(VerifyDecomposition, TamperedSignFails) {
  Subspace v = Subspace::from_generators(5, {0b00011, 0b00100});
  Decomposition d;
  d.terms = {SignedTerm{1, v}};
  FunctionTable f = table_of_terms(5, d.terms);
  d.terms[0].sign = -1;
  VerifyReport report = verify_decomposition(f, d);
  EXPECT_FALSE(report.pass);
  EXPECT_EQ(report.max_deviation, BigInt(2));
}

TEST(VerifyDecomposition, EmptyDecompositionMatchesZero) {
  FunctionTable f = FunctionTable::zero(4);
  VerifyReport report = verify_decomposition(f, Decomposition{});
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(report.l, 0u);
}

TEST(VerifyDecomposition, RejectsNonIntegerTable) {
  FunctionTable f = FunctionTable::zero(3);
  f[1] = Dyadic::scaled(1, 1);
  EXPECT_THROW(verify_decomposition(f, Decomposition{}), precondition_error);
}

TEST(IterationStep, SubspaceIndicatorReturnsItself) {
  Subspace v = Subspace::from_generators(6, {0b000111, 0b101000});
  FunctionTable f = indicator(v);
  IterationStep step = iteration_step(f, {});
  EXPECT_EQ(step.v.basis(), v.basis());
  EXPECT_TRUE(tables_equal(step.g, f));
  EXPECT_EQ(step.record.fallback_level, 0);
  EXPECT_EQ(step.record.v_dim, v.dim());
  EXPECT_EQ(step.record.support_before, v.size());
}

TEST(IterationStep, PointMassKeepsZeroSubspace) {
  FunctionTable f = FunctionTable::zero(5);
  f[0] = Dyadic(1);
  IterationStep step = iteration_step(f, {});
  EXPECT_EQ(step.v.dim(), 0);
  EXPECT_TRUE(tables_equal(step.g, f));
}

TEST(IterationStep, NestedPairDescendsToSmallerSubspace) {
  Subspace v = Subspace::from_generators(6, {0b000011, 0b000100});
  Subspace w = span_with(v, 0b010000);
  FunctionTable f = indicator(w) - indicator(v);
  IterationStep step = iteration_step(f, {});
  // index two: the only subspace on which f averages almost-integrally and
  // strictly below W is V itself
  EXPECT_EQ(step.v.basis(), v.basis());
  AlmostIntegerView g_view = round_table(step.g);
  EXPECT_TRUE(g_view.rounding_unique);
  EXPECT_FALSE(integer_part_is_zero(g_view));
}

TEST(IterationStep, NoiseWithinThresholdIsTolerated) {
  Subspace v = Subspace::from_generators(6, {0b000111, 0b011000});
  FunctionTable f = indicator(v);
  for (std::size_t x = 0; x < f.size(); x += 7) f[x] = f[x] + Dyadic::scaled(1, 13);
  IterationStep step = iteration_step(f, {});
  EXPECT_EQ(step.v.basis(), v.basis());
  AlmostIntegerView g_view = round_table(step.g);
  for (Word x : v.elements()) EXPECT_EQ(g_view.f_z[x], BigInt(1));
}

TEST(IterationStep, FallbackDisabledPropagatesStageFailure) {
  Subspace v = Subspace::from_generators(6, {0b000011, 0b000100});
  Subspace w = span_with(v, 0b010000);
  FunctionTable f = indicator(w) - indicator(v);
  DecomposeConfig config;
  config.continuity_resample = 0;  // starves the sampler inside continuity
  config.allow_fallback = false;
  EXPECT_THROW(iteration_step(f, config), stage_error);
}

TEST(IterationStep, FallbackLadderEndsAtZeroSubspace) {
  Subspace v = Subspace::from_generators(6, {0b000011, 0b000100});
  Subspace w = span_with(v, 0b010000);
  FunctionTable f = indicator(w) - indicator(v);
  DecomposeConfig config;
  config.continuity_resample = 0;
  IterationStep step = iteration_step(f, config);
  EXPECT_EQ(step.record.fallback_level, -1);
  EXPECT_EQ(step.v.dim(), 0);
  EXPECT_TRUE(tables_equal(step.g, f));
}

TEST(IterationStep, Preconditions) {
  FunctionTable zero = FunctionTable::zero(4);
  EXPECT_THROW(iteration_step(zero, {}), precondition_error);

  Subspace v = Subspace::from_generators(4, {0b0011});
  FunctionTable noisy = indicator(v);
  noisy[7] = noisy[7] + Dyadic::scaled(1, 2);  // distance 1/4 above threshold
  EXPECT_THROW(iteration_step(noisy, {}), precondition_error);
}

TEST(Decompose, SingleIndicator) {
  Subspace v = Subspace::from_generators(5, {0b00011, 0b00100});
  FunctionTable f = indicator(v);
  auto [d, trace] = decompose(f);
  ASSERT_EQ(d.l, 1u);
  EXPECT_EQ(d.terms[0].sign, 1);
  EXPECT_EQ(d.terms[0].subspace.basis(), v.basis());
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(trace[0].norm_before, Dyadic(1));
  EXPECT_EQ(trace[0].coset_terms, 1u);
  EXPECT_TRUE(verify_decomposition(f, d).pass);
}

TEST(Decompose, IndexTwoPairGivesExactlyTwoTerms) {
  Subspace v = Subspace::from_generators(6, {0b000011, 0b000100});
  Subspace w = span_with(v, 0b010000);
  FunctionTable f = indicator(w) - indicator(v);
  auto [d, trace] = decompose(f);
  ASSERT_EQ(d.l, 2u);
  EXPECT_TRUE(verify_decomposition(f, d).pass);
  int plus = 0, minus = 0;
  for (const SignedTerm& t : d.terms) (t.sign > 0 ? plus : minus)++;
  EXPECT_EQ(plus, 1);
  EXPECT_EQ(minus, 1);
}

TEST(Decompose, ZeroFunctionIsEmpty) {
  FunctionTable f = FunctionTable::zero(6);
  auto [d, trace] = decompose(f);
  EXPECT_EQ(d.l, 0u);
  EXPECT_TRUE(trace.empty());
}

TEST(Decompose, RandomSignedSumsReconstructExactly) {
  Rng rng(2026);
  const int n = 10;
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<SignedTerm> planted;
    FunctionTable f = FunctionTable::zero(n);
    const int k = 3 + static_cast<int>(rng.below(3));  // 3..5 indicators
    for (int i = 0; i < k; ++i) {
      std::vector<Word> gens;
      const int d = 2 + static_cast<int>(rng.below(5));
      for (int j = 0; j < d; ++j) gens.push_back(static_cast<Word>(rng.below(1u << n)));
      Subspace v = Subspace::from_generators(n, gens);
      int sign = rng.below(2) ? 1 : -1;
      planted.push_back(SignedTerm{sign, v});
      for (Word x : v.elements()) f[x] = f[x] + Dyadic(sign);
    }
    auto [d, trace] = decompose(f);
    VerifyReport report = verify_decomposition(f, d);
    EXPECT_TRUE(report.pass) << "trial " << trial;
    EXPECT_TRUE(report.max_deviation.is_zero());
    // spectral norm strictly decreasing, by at least one half per step
    for (std::size_t i = 1; i < trace.size(); ++i)
      EXPECT_TRUE(trace[i].norm_before + Dyadic::scaled(1, 1) <= trace[i - 1].norm_before)
          << "trial " << trial << " step " << i;
    Dyadic m = norm_a(f);
    EXPECT_LE(trace.size(), static_cast<std::size_t>(2 * detail::ceil_of(m) + 1));
  }
}

TEST(Decompose, NoisyInputStillRecoversIntegerPart) {
  Subspace v = Subspace::from_generators(6, {0b001111});
  FunctionTable f = indicator(v);
  for (std::size_t x = 0; x < f.size(); ++x) f[x] = f[x] + Dyadic::scaled(1, 14);
  auto [d, trace] = decompose(f);
  ASSERT_EQ(d.l, 1u);
  EXPECT_EQ(d.terms[0].subspace.basis(), v.basis());
  FunctionTable clean = indicator(v);
  EXPECT_TRUE(verify_decomposition(clean, d).pass);
}

TEST(Decompose, Preconditions) {
  FunctionTable f = FunctionTable::zero(4);
  f[0] = Dyadic(1);
  f[3] = Dyadic::scaled(1, 2);  // distance 1/4
  EXPECT_THROW(decompose(f), precondition_error);
}

}  // namespace
