#pragma once

// Seeded instance generators for experiments and tests. Every kind is
// deterministic in (kind, params, seed); tables are exact, so generated
// spectral norms are known by construction where noted.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "decompose.hpp"
#include "fourier.hpp"
#include "gf2.hpp"
#include "rng.hpp"

namespace specnorm {

struct GenParams {
  int n = 8;
  int terms = 4;    // subspace-sum: number of signed indicators
  int k = 2;        // character-sum / sparse-spectrum: distinct frequencies
  int dim_min = 1;  // subspace-sum: generator dimension range
  int dim_max = -1; // -1: up to n
};

struct GeneratedFunction {
  FunctionTable table;
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<SignedTerm> terms;  // ground truth, subspace-sum only
};

inline const std::vector<std::string>& generator_kinds() {
  static const std::vector<std::string> kinds = {"subspace-sum", "character-sum",
                                                 "sparse-spectrum", "boolean-random"};
  return kinds;
}

// sum of signed subspace indicators; ||f||_A is at most params.terms
inline GeneratedFunction gen_subspace_sum(const GenParams& params, std::uint64_t seed) {
  check_dim(params.n);
  if (params.terms < 0) throw precondition_error("gen: negative term count");
  Rng rng(seed);
  const int hi = params.dim_max < 0 ? params.n : std::min(params.dim_max, params.n);
  const int lo = std::max(0, std::min(params.dim_min, hi));
  GeneratedFunction out;
  out.kind = "subspace-sum";
  out.seed = seed;
  out.table = FunctionTable::zero(params.n);
  for (int i = 0; i < params.terms; ++i) {
    const int d = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    std::vector<Word> gens;
    for (int j = 0; j < d; ++j)
      gens.push_back(static_cast<Word>(rng.below(std::uint64_t{1} << params.n)));
    Subspace v = Subspace::from_generators(params.n, gens);
    const int sign = rng.below(2) ? 1 : -1;
    out.terms.push_back(SignedTerm{sign, v});
    for (Word x : v.elements()) out.table[x] = out.table[x] + Dyadic(sign);
  }
  return out;
}

namespace detail {

inline std::vector<Word> distinct_frequencies(int n, int k, Rng& rng) {
  if (k < 0) throw precondition_error("gen: negative frequency count");
  if (static_cast<std::uint64_t>(k) > (std::uint64_t{1} << n))
    throw precondition_error("gen: more frequencies than the space holds");
  std::set<Word> seen;
  std::vector<Word> freqs;
  while (freqs.size() < static_cast<std::size_t>(k)) {
    Word r = static_cast<Word>(rng.below(std::uint64_t{1} << n));
    if (seen.insert(r).second) freqs.push_back(r);
  }
  return freqs;
}

}  // namespace detail

// sum of k distinct signed characters; ||f||_A = k exactly
inline GeneratedFunction gen_character_sum(const GenParams& params, std::uint64_t seed) {
  check_dim(params.n);
  Rng rng(seed);
  SpectrumTable s;
  s.n = params.n;
  s.values.assign(std::size_t{1} << params.n, Dyadic(0));
  for (Word r : detail::distinct_frequencies(params.n, params.k, rng))
    s[r] = Dyadic(rng.below(2) ? 1 : -1);
  GeneratedFunction out;
  out.kind = "character-sum";
  out.seed = seed;
  out.table = inverse_wht(s);
  return out;
}

// k distinct frequencies with integer coefficients in {+-1, +-2, +-3};
// ||f||_A is the coefficient magnitude sum
inline GeneratedFunction gen_sparse_spectrum(const GenParams& params, std::uint64_t seed) {
  check_dim(params.n);
  Rng rng(seed);
  SpectrumTable s;
  s.n = params.n;
  s.values.assign(std::size_t{1} << params.n, Dyadic(0));
  for (Word r : detail::distinct_frequencies(params.n, params.k, rng)) {
    const int mag = 1 + static_cast<int>(rng.below(3));
    s[r] = Dyadic(rng.below(2) ? mag : -mag);
  }
  GeneratedFunction out;
  out.kind = "sparse-spectrum";
  out.seed = seed;
  out.table = inverse_wht(s);
  return out;
}

// independent fair 0/1 values
inline GeneratedFunction gen_boolean_random(const GenParams& params, std::uint64_t seed) {
  check_dim(params.n);
  Rng rng(seed);
  GeneratedFunction out;
  out.kind = "boolean-random";
  out.seed = seed;
  out.table = FunctionTable::zero(params.n);
  for (std::size_t x = 0; x < out.table.size(); ++x)
    out.table[x] = Dyadic(static_cast<int>(rng.below(2)));
  return out;
}

inline GeneratedFunction gen_function(const std::string& kind, const GenParams& params,
                                      std::uint64_t seed) {
  if (kind == "subspace-sum") return gen_subspace_sum(params, seed);
  if (kind == "character-sum") return gen_character_sum(params, seed);
  if (kind == "sparse-spectrum") return gen_sparse_spectrum(params, seed);
  if (kind == "boolean-random") return gen_boolean_random(params, seed);
  throw precondition_error("gen: unknown kind \"" + kind + "\"");
}

}  // namespace specnorm
