#pragma once

// The main iteration: peel one subspace-averaged layer off f per step, each
// layer an exactly integer-valued coset combination, until the integer part
// is exhausted. Layers chain small-doubling extraction, the subspace
// comparability step, and quantitative continuity; every claimed property is
// re-verified on values before it is used.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "connectivity.hpp"
#include "continuity.hpp"
#include "dyadic.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "freiman.hpp"
#include "gf2.hpp"

namespace specnorm {

struct SignedTerm {
  int sign = 1;  // +1 or -1
  Subspace subspace;
};

struct Decomposition {
  std::vector<SignedTerm> terms;
  std::size_t l = 0;   // |terms|
  Dyadic source_norm;  // ||f||_A of the decomposed function
};

struct VerifyReport {
  bool pass = false;
  std::size_t l = 0;
  BigInt max_deviation;
};

struct StepRecord {
  int step = 0;
  Dyadic norm_before;     // ||f_i||_A
  Dyadic epsilon_before;  // distance of f_i to integers
  int v_dim = 0;
  std::size_t coset_terms = 0;   // cosets of V with nonzero integer value
  std::size_t support_before = 0;
  int p_used = 0;
  int fallback_level = 0;  // 0: pipeline subspace; k: k-th retry; -1: zero subspace
};

using IterationTrace = std::vector<StepRecord>;

struct DecomposeConfig {
  std::optional<Dyadic> eps_threshold;  // default 2^-(8 + ceil M)
  std::optional<Dyadic> eta;            // default eps_threshold / 16
  int p_cap = 16;                       // even
  bool allow_fallback = true;
  int fallback_halvings = 2;
  std::uint64_t seed = 0;
  int continuity_resample = 32;
  ExtractConfig extract;
  FreimanConfig freiman;
};

struct IterationStep {
  Subspace v;
  FunctionTable g;  // f * mu_V
  StepRecord record;
};

// sign * 1_{rep + V} as at most two subspace indicators:
// 1_{x+V} = 1_{span(V, x)} - 1_V for x outside V.
inline std::vector<SignedTerm> coset_to_subspaces(int sign, const Coset& w) {
  if (sign != 1 && sign != -1)
    throw precondition_error("coset_to_subspaces: sign must be +-1");
  if (w.sub.contains(w.rep)) return {SignedTerm{sign, w.sub}};
  return {SignedTerm{sign, span_with(w.sub, w.rep)}, SignedTerm{-sign, w.sub}};
}

// Exact pointwise comparison of sum(sign * 1_V) against an integer table.
inline VerifyReport verify_decomposition(const FunctionTable& f_z, const Decomposition& d) {
  for (const Dyadic& v : f_z.values)
    if (v.log2_denominator() != 0)
      throw precondition_error("verify_decomposition: table is not integer-valued");
  std::vector<long long> acc(f_z.size(), 0);
  for (const SignedTerm& term : d.terms) {
    if (term.subspace.ambient_dim() != f_z.n)
      throw dim_mismatch("verify_decomposition: term ambient mismatch");
    for (Word x : term.subspace.elements()) acc[x] += term.sign;
  }
  VerifyReport report;
  report.l = d.terms.size();
  for (std::size_t x = 0; x < f_z.size(); ++x) {
    BigInt dev = BigInt(acc[x]) - f_z.values[x].numerator();
    if (dev < 0) dev = -dev;
    if (dev > report.max_deviation) report.max_deviation = dev;
  }
  report.pass = report.max_deviation.is_zero();
  return report;
}

namespace detail {

inline int ceil_of(const Dyadic& d) { return static_cast<int>(ceil_rational(d.to_rational())); }

inline Dyadic resolved_threshold(const DecomposeConfig& config, const Dyadic& m_norm) {
  if (config.eps_threshold) return *config.eps_threshold;
  return Dyadic::scaled(1, static_cast<unsigned>(8 + std::max(0, ceil_of(m_norm))));
}

inline Dyadic resolved_eta(const DecomposeConfig& config, const Dyadic& threshold) {
  if (config.eta) return *config.eta;
  return threshold.div_pow2(4);
}

// smallest even p >= 2 with 2^-p < alpha and M 2^(3-p) <= eta, capped
inline int select_p(const BigRational& alpha, const Dyadic& m_norm, const Dyadic& eta,
                    int p_cap) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  for (int p = 2; p <= p_cap; p += 2) {
    bool alpha_ok = denominator(alpha) < numerator(alpha) * (BigInt(1) << p);
    bool eta_ok = !(m_norm.mul_pow2(3) > eta.mul_pow2(static_cast<unsigned>(p)));
    if (alpha_ok && eta_ok) return p;
  }
  return p_cap;  // exact verification downstream is the real gate
}

}  // namespace detail

// One layer: find V making f * mu_V almost integer-valued with a nonzero
// integer part. The pipeline subspace comes from small-doubling extraction,
// subspace comparability, and quantitative continuity at
// eps_qc = 2^-(4 + ceil log2 M); failed verification retries with halved
// eps_qc and finally falls back to V = {0}, for which f * mu_V = f verifies
// unconditionally. Every candidate is accepted only by the exact check.
inline IterationStep iteration_step(const FunctionTable& f, const DecomposeConfig& config) {
  const AlmostIntegerView view = round_table(f);
  const Dyadic m_norm = norm_a(f);
  const Dyadic threshold = detail::resolved_threshold(config, m_norm);
  const Dyadic eta = detail::resolved_eta(config, threshold);
  if (view.epsilon > threshold)
    throw precondition_error("iteration_step: distance to integers " +
                             view.epsilon.to_string() + " above threshold " +
                             threshold.to_string());
  if (integer_part_is_zero(view))
    throw precondition_error("iteration_step: integer part is zero");

  StepRecord record;
  record.norm_before = m_norm;
  record.epsilon_before = view.epsilon;
  for (const BigInt& v : view.f_z)
    if (!v.is_zero()) ++record.support_before;

  const Dyadic bound = view.epsilon + eta;
  auto accepted = [&](const FunctionTable& g) {
    AlmostIntegerView vg = round_table(g);
    return vg.rounding_unique && !(vg.epsilon > bound) && !integer_part_is_zero(vg);
  };

  // pipeline candidate
  ExtractConfig extract_cfg = config.extract;
  if (!extract_cfg.eps_threshold) extract_cfg.eps_threshold = threshold;
  extract_cfg.seed = config.seed;
  SmallDoublingCertificate cert = extract_small_doubling(f, extract_cfg);
  FreimanConfig freiman_cfg = config.freiman;
  freiman_cfg.seed = config.seed;
  FreimanResult fre = freiman_subspace(cert.set, cert.doubling, freiman_cfg);
  const int p = detail::select_p(fre.alpha, m_norm, eta, config.p_cap);
  record.p_used = p;

  int log_m = 0;  // ceil log2 of max(M, 1)
  {
    Dyadic pow(1);
    while (pow < m_norm) {
      pow = pow.mul_pow2(1);
      ++log_m;
    }
  }
  Dyadic eps_qc = Dyadic::scaled(1, static_cast<unsigned>(4 + log_m));

  const int ladder = std::max(0, config.fallback_halvings);
  for (int level = 0; level <= ladder; ++level) {
    ContinuityParams params;
    params.epsilon = eps_qc;
    params.p = p;
    params.seed = config.seed + static_cast<std::uint64_t>(level) + 1;
    params.resample_budget = config.continuity_resample;
    Subspace v;
    try {
      v = quantitative_continuity(f, fre.v, params).u;
    } catch (const stage_error&) {
      if (!config.allow_fallback) throw;
      eps_qc = eps_qc.div_pow2(1);
      continue;
    }
    FunctionTable g = convolve_subspace(f, v);
    if (accepted(g)) {
      record.v_dim = v.dim();
      record.fallback_level = level;
      return IterationStep{v, std::move(g), std::move(record)};
    }
    if (!config.allow_fallback)
      throw stage_error("iteration_step",
                        "averaged function failed the almost-integer check at level " +
                            std::to_string(level));
    eps_qc = eps_qc.div_pow2(1);
  }

  // V = {0}: f * mu_V = f, which is epsilon-almost integer with nonzero part
  Subspace zero = Subspace::zero(f.n);
  FunctionTable g = f;
  if (!accepted(g)) throw invariant_error("iteration_step: identity fallback rejected");
  record.v_dim = 0;
  record.fallback_level = -1;
  return IterationStep{zero, std::move(g), std::move(record)};
}

// Full decomposition: strip exactly integral coset layers until the integer
// part vanishes. Checked per step, all exactly: the distance budget
// 2^i eps_0 + 4^(i - 2 ceil M - 4) threshold, support growth at most twofold,
// coset values within [-(M+1), M+1], spectral norm decrement at least 1/2,
// and distance drift at most 2 eps_i + eta. The step cap is 2 ceil(M) + 1.
inline std::pair<Decomposition, IterationTrace> decompose(const FunctionTable& f,
                                                          const DecomposeConfig& config = {}) {
  const AlmostIntegerView view0 = round_table(f);
  const Dyadic m_norm = norm_a(f);
  const Dyadic threshold = detail::resolved_threshold(config, m_norm);
  const Dyadic eta = detail::resolved_eta(config, threshold);
  if (view0.epsilon > threshold)
    throw precondition_error("decompose: distance to integers above threshold");
  const int cap = 2 * std::max(0, detail::ceil_of(m_norm)) + 1;
  const int sched_shift = 2 * detail::ceil_of(m_norm) + 4;

  Decomposition result;
  result.source_norm = m_norm;
  IterationTrace trace;
  FunctionTable cur = f;

  for (int step = 0;; ++step) {
    AlmostIntegerView view = round_table(cur);
    if (integer_part_is_zero(view)) break;
    if (step >= cap)
      throw stage_error("decompose", "step cap " + std::to_string(cap) +
                                         " exceeded with nonzero integer part");

    // schedule budget for the current distance
    int e = 2 * (step - sched_shift);
    Dyadic budget = view0.epsilon.mul_pow2(static_cast<unsigned>(step)) +
                    (e >= 0 ? threshold.mul_pow2(static_cast<unsigned>(e))
                            : threshold.div_pow2(static_cast<unsigned>(-e)));
    if (view.epsilon > budget)
      throw invariant_error("decompose: distance drifted past the step budget");

    DecomposeConfig step_cfg = config;
    step_cfg.seed = config.seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(step + 1);
    IterationStep layer = iteration_step(cur, step_cfg);
    AlmostIntegerView layer_view = round_table(layer.g);

    std::size_t layer_support = 0;
    for (const BigInt& v : layer_view.f_z)
      if (!v.is_zero()) ++layer_support;
    if (layer_support > 2 * layer.record.support_before)
      throw invariant_error("decompose: layer support more than doubled");

    // the averaged layer is constant on cosets of V; emit signed terms
    std::size_t nonzero_cosets = 0;
    for (Word rep : layer.v.coset_reps()) {
      const BigInt& value = layer_view.f_z[rep];
      for (Word e2 : layer.v.elements())
        if (layer_view.f_z[rep ^ e2] != value)
          throw invariant_error("decompose: layer not constant on a coset");
      if (value.is_zero()) continue;
      ++nonzero_cosets;
      BigInt magnitude = value < 0 ? BigInt(-value) : value;
      if (Dyadic(magnitude) > m_norm + Dyadic(1))
        throw invariant_error("decompose: coset value outside [-(M+1), M+1]");
      std::vector<SignedTerm> base =
          coset_to_subspaces(value < 0 ? -1 : 1, Coset::of(rep, layer.v));
      for (BigInt i = 0; i < magnitude; ++i)
        result.terms.insert(result.terms.end(), base.begin(), base.end());
    }
    layer.record.step = step;
    layer.record.coset_terms = nonzero_cosets;
    trace.push_back(layer.record);

    FunctionTable next = cur - layer.g;
    Dyadic next_norm = norm_a(next);
    if (next_norm + Dyadic::scaled(1, 1) > layer.record.norm_before)
      throw invariant_error("decompose: spectral norm decrement below 1/2");
    AlmostIntegerView next_view = round_table(next);
    if (next_view.epsilon > view.epsilon.mul_pow2(1) + eta)
      throw invariant_error("decompose: distance drift above 2 eps + eta");
    cur = std::move(next);
  }

  result.l = result.terms.size();
  FunctionTable f_z = FunctionTable::zero(f.n);
  for (std::size_t x = 0; x < f_z.size(); ++x) f_z[x] = Dyadic(view0.f_z[x]);
  VerifyReport check = verify_decomposition(f_z, result);
  if (!check.pass)
    throw invariant_error("decompose: reconstruction deviates by " +
                          check.max_deviation.str());
  return {std::move(result), std::move(trace)};
}

}  // namespace specnorm
