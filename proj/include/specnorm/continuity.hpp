#pragma once

// Quantitative continuity: find U <= V of controlled codimension such that
// f is close to f*mu_U in L_p on every coset of U. Subspaces come from
// spectral sampling (Croot-Laba-Sisask style) with an unconditional exact
// verifier; the iteration walks a dyadic chain of subspaces and always
// certifies its level choice exactly.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "gf2.hpp"
#include "rng.hpp"

namespace specnorm {

struct ContinuityParams {
  Dyadic epsilon;             // in (0, 1]
  int p = 2;                  // even, >= 2
  std::uint64_t seed = 0;
  int resample_budget = 32;
  int codim_budget = -1;      // -1: dim V
};

struct CosetGap {
  Word rep = 0;
  Dyadic gap_pow;  // E_W |f - f*mu_U|^p, exact
  bool pass = false;
};

struct ContinuityReport {
  Dyadic threshold_pow;  // (epsilon * M_bound)^p
  std::vector<CosetGap> cosets;
  Dyadic worst_gap;
  bool all_pass = true;
};

struct ChainRecord {
  int iteration = 0;
  int level = 0;          // j
  Subspace z;             // Z_j
  int codim_in_v = 0;
  Dyadic epsilon_level;   // threshold 2^(j-1) * epsilon this level was built at
  bool selected = false;
};

struct ContinuityResult {
  Subspace u;
  int codim_in_v = 0;
  Dyadic worst_coset_gap;  // max over cosets of the p-th-power gap
  std::vector<ChainRecord> chain_trace;
};

// Exact per-coset report: for every coset W of U, the p-th-power gap
// E_W |f - f*mu_U|^p against (epsilon * M_bound)^p.
inline ContinuityReport check_continuity(const FunctionTable& f, const Subspace& u,
                                         const Dyadic& epsilon, const Dyadic& m_bound,
                                         int p) {
  if (u.ambient_dim() != f.n) throw dim_mismatch("check_continuity: ambient mismatch");
  if (p < 2 || p % 2 != 0) throw precondition_error("check_continuity: p must be even >= 2");
  ContinuityReport report;
  report.threshold_pow = (epsilon * m_bound).pow(static_cast<unsigned>(p));
  FunctionTable conv = convolve_subspace(f, u);
  for (Word rep : u.coset_reps()) {
    CosetGap entry;
    entry.rep = rep;
    entry.gap_pow = lp_power_gap(f, conv, Coset::of(rep, u), static_cast<unsigned>(p));
    entry.pass = !(entry.gap_pow > report.threshold_pow);
    if (entry.gap_pow > report.worst_gap) report.worst_gap = entry.gap_pow;
    report.all_pass = report.all_pass && entry.pass;
    report.cosets.push_back(std::move(entry));
  }
  return report;
}

// Samples frequencies with probability |f-hat(r)| / ||f||_A, intersects V with
// their kernels, and returns as soon as the exact L_p(mu_V) verifier accepts:
// E_V |f*mu_U - f|^p <= (epsilon ||f||_A)^p. Up to ceil(c_cls p / eps^2) draws
// per attempt; the verifier runs at every dimension drop, so the returned U
// may be larger than the full intersection. Failing every attempt is an error.
inline Subspace cls_sample_approx(const FunctionTable& f, const Subspace& v,
                                  const Dyadic& epsilon, int p, std::uint64_t seed,
                                  int resample_budget = 32, int c_cls = 4) {
  if (v.ambient_dim() != f.n) throw dim_mismatch("cls_sample_approx: ambient mismatch");
  if (!(epsilon > Dyadic(0)) || epsilon > Dyadic(1))
    throw precondition_error("cls_sample_approx: epsilon outside (0, 1]");
  if (p < 2 || p % 2 != 0) throw precondition_error("cls_sample_approx: p must be even >= 2");
  const SpectrumTable fhat = wht(f);
  const Dyadic norm = spectral_norm(fhat);
  if (norm.is_zero()) throw precondition_error("cls_sample_approx: zero spectral norm");

  // integer weights |f-hat(r)| * 2^K for a common scale K
  unsigned scale = 0;
  for (const Dyadic& c : fhat.values) scale = std::max(scale, c.log2_denominator());
  std::vector<BigInt> weights(fhat.size());
  BigInt total = 0;
  for (std::size_t r = 0; r < fhat.size(); ++r) {
    BigInt w = BigInt(boost::multiprecision::abs(fhat[r].numerator()))
               << (scale - fhat[r].log2_denominator());
    weights[r] = w;
    total += w;
  }

  const Dyadic threshold_pow = (epsilon * norm).pow(static_cast<unsigned>(p));
  const Coset whole_v = Coset::of(0, v);
  auto accepted = [&](const Subspace& u) {
    return !(lp_power_gap(f, convolve_subspace(f, u), whole_v, static_cast<unsigned>(p)) > threshold_pow);
  };
  if (accepted(v)) return v;

  const BigInt draws_big =
      ceil_rational(BigRational(c_cls) * p / (epsilon.to_rational() * epsilon.to_rational()));
  const std::size_t draws = static_cast<std::size_t>(draws_big);
  Rng rng(seed);
  for (int attempt = 0; attempt < resample_budget; ++attempt) {
    Subspace u = v;
    for (std::size_t d = 0; d < draws; ++d) {
      BigInt ticket = rng.below_big(total);
      std::size_t r = 0;
      while (ticket >= weights[r]) ticket -= weights[r], ++r;
      if (r == 0) continue;  // kernel of the zero frequency is everything
      Subspace ker = perp(Subspace::from_generators(f.n, {static_cast<Word>(r)}));
      Subspace next = intersect(u, ker);
      if (next.dim() < u.dim()) {
        u = next;
        if (accepted(u)) return u;
      }
    }
  }
  throw stage_error("cls_sample", "no sampled subspace passed the exact gap check after " +
                                      std::to_string(resample_budget) + " attempts");
}

namespace detail {

// smallest t >= 0 with 2^t * epsilon >= 1
inline int ceil_log2_inverse(const Dyadic& epsilon) {
  int t = 0;
  Dyadic pow = epsilon;
  while (pow < Dyadic(1)) {
    pow = pow.mul_pow2(1);
    ++t;
  }
  return t;
}

inline Dyadic level_threshold(const Dyadic& epsilon, int j) {
  return j >= 1 ? epsilon.mul_pow2(static_cast<unsigned>(j - 1)) : epsilon.div_pow2(1);
}

}  // namespace detail

// Iterates: while some coset W of the current U has p-th-power gap above
// (epsilon M)^p, translate f so W sits at the origin, build the dyadic chain
// Z_0 <= ... <= Z_J = U with level thresholds 2^(j-1) epsilon (levels at or
// above 2 keep U, levels in (1, 2) sample at 1), and descend to the smallest
// certified level: epsilon M <= 2(J+1) * 2^j epsilon * ||f*mu_{Z_j}||_A,
// preferring a level that strictly drops the dimension. M := ||f||_A.
inline ContinuityResult quantitative_continuity(const FunctionTable& f, const Subspace& v,
                                                const ContinuityParams& params) {
  if (v.ambient_dim() != f.n) throw dim_mismatch("quantitative_continuity: ambient mismatch");
  if (!(params.epsilon > Dyadic(0)) || params.epsilon > Dyadic(1))
    throw precondition_error("quantitative_continuity: epsilon outside (0, 1]");
  if (params.p < 2 || params.p % 2 != 0)
    throw precondition_error("quantitative_continuity: p must be even >= 2");
  const int codim_budget = params.codim_budget < 0 ? v.dim() : params.codim_budget;

  const Dyadic m_norm = norm_a(f);
  const int J = detail::ceil_log2_inverse(params.epsilon) + 2;
  Rng rng(params.seed);

  ContinuityResult result;
  Subspace u = v;
  std::vector<ChainRecord> trace;
  for (int iteration = 0;; ++iteration) {
    ContinuityReport report = check_continuity(f, u, params.epsilon, m_norm, params.p);
    if (report.all_pass) {
      result.u = u;
      result.codim_in_v = v.dim() - u.dim();
      result.worst_coset_gap = report.worst_gap;
      result.chain_trace = std::move(trace);
      return result;
    }
    Word violator = 0;
    for (const CosetGap& entry : report.cosets)
      if (!entry.pass) {
        violator = entry.rep;
        break;
      }
    FunctionTable g = translate(f, violator);

    std::vector<Subspace> chain(static_cast<std::size_t>(J) + 1);
    chain[static_cast<std::size_t>(J)] = u;
    for (int j = J - 1; j >= 0; --j) {
      Dyadic eps_j = detail::level_threshold(params.epsilon, j);
      if (!(eps_j < Dyadic(2))) {
        chain[static_cast<std::size_t>(j)] = chain[static_cast<std::size_t>(j) + 1];
        continue;
      }
      Dyadic effective = eps_j > Dyadic(1) ? Dyadic(1) : eps_j;
      chain[static_cast<std::size_t>(j)] =
          cls_sample_approx(g, chain[static_cast<std::size_t>(j) + 1], effective, params.p,
                            rng.raw(), params.resample_budget);
    }

    // certified levels: epsilon M <= 2(J+1) * 2^j epsilon * ||g*mu_{Z_j}||_A
    const Dyadic lhs = params.epsilon * m_norm;
    std::optional<int> pick;
    std::optional<int> pick_any;
    for (int j = 0; j <= J; ++j) {
      Dyadic rhs = params.epsilon.mul_pow2(static_cast<unsigned>(j)) *
                   norm_a(convolve_subspace(g, chain[static_cast<std::size_t>(j)])) *
                   Dyadic(2 * (J + 1));
      if (lhs > rhs) continue;
      pick_any = j;  // ends at the largest certified level
      if (!pick && !(chain[static_cast<std::size_t>(j)] == u)) pick = j;
    }
    if (!pick_any)
      throw stage_error("continuity", "no chain level certified at iteration " +
                                          std::to_string(iteration));
    const int j_star = pick ? *pick : *pick_any;

    for (int j = 0; j <= J; ++j) {
      ChainRecord record;
      record.iteration = iteration;
      record.level = j;
      record.z = chain[static_cast<std::size_t>(j)];
      record.codim_in_v = v.dim() - record.z.dim();
      record.epsilon_level = detail::level_threshold(params.epsilon, j);
      record.selected = (j == j_star);
      trace.push_back(std::move(record));
    }

    const Subspace& next = chain[static_cast<std::size_t>(j_star)];
    if (next == u)
      throw stage_error("continuity", "no codimension progress at iteration " +
                                          std::to_string(iteration));
    if (v.dim() - next.dim() > codim_budget)
      throw stage_error("continuity", "codimension budget " + std::to_string(codim_budget) +
                                          " exceeded at iteration " + std::to_string(iteration));
    u = next;
  }
}

}  // namespace specnorm
