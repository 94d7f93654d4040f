#pragma once

// From a set with small doubling to a comparable subspace: symmetry-set
// construction, covering certificate, pigeonhole layer selection, Chang
// spectrum basis, and an exact Fourier bootstrap, with an exhaustive
// subspace-enumeration oracle for ground truth.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "errors.hpp"
#include "gf2.hpp"
#include "sumset.hpp"

namespace specnorm {

struct FreimanConfig {
  int m = -1;                     // translate-sum length; -1: max(4, 4 ceil(log2 K))
  BigRational sym_threshold{1};   // |(A+t) xor A| <= threshold * |A| admits t
  int sym_ladder = 4;             // threshold halvings before falling back to {0}
  int cover_budget = -1;          // -1: ambient dimension
  std::uint64_t seed = 0;
  int oracle_threshold = 0;       // n <= this: answer by exhaustive enumeration
  BigRational slack{8};           // dominance factor callers compare against
};

struct FreimanTrace {
  PointSet s;                 // S = 2A
  PointSet cs_t;              // companion set (desk scale: A itself)
  PointSet x;                 // admitted translates, mX inside 4S verified
  std::vector<Word> cover_t;  // covering certificate for span(X)
  Subspace u;                 // span(X)
  int chosen_s = 0;           // pigeonhole layer index
  PointSet l;                 // A + chosen_s * X
  Word coset_rep = 0;         // best coset of U
  PointSet b;                 // L intersect (rep + U)
  BigRational d;              // |B+X| / |B|
  std::vector<Word> lambda;   // spectrum basis modulo U-perp
  Subspace v_pre;             // perp(span(lambda) + U-perp), before enlargement
};

struct FreimanResult {
  Subspace v;
  BigRational alpha;  // |A intersect V| / |V|
  BigRational delta;  // |V| / |A|
  std::optional<FreimanTrace> pipeline_trace;
};

// Basis of the span of the large-spectrum frequencies of 1_X inside U's dual:
// frequencies r with |sum_{x in X} (-1)^<r,x>| >= gamma |X|, filtered to a
// basis modulo U-perp. Spec_gamma(1_X) lies inside span(result + U-perp).
inline std::vector<Word> chang_spectrum_basis(const PointSet& x, const Subspace& u,
                                              const BigRational& gamma) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (x.n != u.ambient_dim()) throw dim_mismatch("chang_spectrum_basis: ambient mismatch");
  if (gamma <= 0) throw precondition_error("chang_spectrum_basis: gamma must be positive");
  for (Word e : x.elems)
    if (!u.contains(e))
      throw precondition_error("chang_spectrum_basis: X not inside U (translate first)");
  const BigRational gamma_sq = gamma * gamma;
  std::vector<BigInt> spec = int_spectrum(x);
  const BigInt rhs = numerator(gamma_sq) * x.size() * x.size();
  std::vector<Word> members;
  for (std::size_t r = 0; r < spec.size(); ++r)
    if (spec[r] * spec[r] * denominator(gamma_sq) >= rhs)
      members.push_back(static_cast<Word>(r));
  return greedy_basis_extension(perp(u), members);
}

// Enumerates every subspace of F_2^n and maximizes objective(alpha, delta)
// over those meeting A; ties break to higher alpha, then higher delta, then
// the lexicographically smaller basis. Objective defaults to alpha * delta.
inline FreimanResult exhaustive_best_subspace(
    const PointSet& a,
    const std::function<BigRational(const BigRational&, const BigRational&)>& objective = {}) {
  if (a.empty()) throw precondition_error("exhaustive_best_subspace: empty set");
  if (a.n > 12) throw precondition_error("exhaustive_best_subspace: n > 12 infeasible");
  auto score = [&](const BigRational& alpha, const BigRational& delta) {
    return objective ? objective(alpha, delta) : alpha * delta;
  };
  std::optional<FreimanResult> best;
  BigRational best_score;
  for_each_subspace(a.n, [&](const Subspace& v) {
    std::size_t cnt = 0;
    for (Word e : a.elems)
      if (v.contains(e)) ++cnt;
    if (cnt == 0) return;
    BigRational alpha(cnt, v.size());
    BigRational delta(v.size(), a.size());
    BigRational sc = score(alpha, delta);
    bool better = !best;
    if (best) {
      if (sc != best_score)
        better = sc > best_score;
      else if (alpha != best->alpha)
        better = alpha > best->alpha;
      else if (delta != best->delta)
        better = delta > best->delta;
      else
        better = v < best->v;
    }
    if (better) {
      best = FreimanResult{v, alpha, delta, std::nullopt};
      best_score = sc;
    }
  });
  return std::move(*best);
}

namespace detail {

inline int ceil_log2_rational(const BigRational& k) {
  int t = 0;
  BigRational pow = 1;
  while (pow < k) {
    pow *= 2;
    ++t;
  }
  return t;
}

}  // namespace detail

// Produces V with both |A intersect V|/|V| and |V|/|A| controlled. Small
// ambients go to the oracle. The pipeline: admitted translates X (threshold
// halved until mX lands inside 4S, ultimately X = {0}), covering certificate
// for U = span(X), pigeonhole layer L = A + sX minimizing |X+L|/|L|, best
// coset B = L cap W minimizing D = |B+X|/|B|, spectrum basis at the squared
// threshold 1/(4D), V_pre = the basis annihilator inside U, exact Fourier
// bootstrap and containment checks, then enlargement by the best translate.
inline FreimanResult freiman_subspace(const PointSet& a, const BigRational& k_observed,
                                      const FreimanConfig& config = {}) {
  if (a.empty()) throw precondition_error("freiman_subspace: empty set");
  const DoublingReport doubling_report = doubling(a);
  if (doubling_report.ratio > k_observed)
    throw precondition_error("freiman_subspace: doubling exceeds the stated bound");
  const int n = a.n;
  if (n <= config.oracle_threshold) return exhaustive_best_subspace(a);

  FreimanTrace trace;
  trace.s = sumset(a, a);
  trace.cs_t = a;
  const int m = config.m > 0
                    ? config.m
                    : std::max(4, 4 * detail::ceil_log2_rational(k_observed));

  // admitted translates: |(A+t) xor A| <= theta |A|, exact; theta halves
  // until the verified containment mX inside 4S holds ({0} always does)
  const PointSet four_s = iterated_sumset(trace.s, 4);
  BigRational theta = config.sym_threshold;
  PointSet x;
  for (int attempt = 0;; ++attempt) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    std::vector<Word> admitted;
    if (attempt <= config.sym_ladder) {
      for (std::size_t t = 0; t < (std::size_t{1} << n); ++t) {
        std::size_t inter = 0;
        for (Word e : a.elems)
          if (a.contains(e ^ static_cast<Word>(t))) ++inter;
        BigInt sym_diff = 2 * (BigInt(a.size()) - inter);
        if (sym_diff * denominator(theta) <= numerator(theta) * a.size())
          admitted.push_back(static_cast<Word>(t));
      }
    } else {
      admitted.push_back(0);
    }
    PointSet candidate{n, std::move(admitted)};
    if (is_subset(iterated_sumset(candidate, m), four_s)) {
      x = std::move(candidate);
      break;
    }
    theta /= 2;
  }
  if (!x.contains(0)) throw invariant_error("freiman_subspace: X lost the zero translate");
  trace.x = x;

  trace.cover_t = chang_cover(x, static_cast<std::size_t>(
                                     config.cover_budget > 0 ? config.cover_budget
                                                             : std::max(1, n)));
  Subspace u = Subspace::from_generators(n, x.elems);
  trace.u = u;

  // pigeonhole layer: smallest s minimizing |X + L_s| / |L_s| over s < m
  PointSet layer = a;
  PointSet best_layer = a;
  int best_s = 0;
  BigRational best_ratio(-1);
  for (int s = 0; s < m; ++s) {
    PointSet grown = sumset(x, layer);
    BigRational ratio(grown.size(), layer.size());
    if (best_ratio < 0 || ratio < best_ratio) {
      best_ratio = ratio;
      best_s = s;
      best_layer = layer;
    }
    layer = std::move(grown);
  }
  trace.chosen_s = best_s;
  trace.l = best_layer;

  // best coset of U: minimize D = |B+X| / |B| over nonempty B = L cap W
  std::optional<BigRational> best_d;
  Word best_rep = 0;
  PointSet best_b;
  for (Word rep : u.coset_reps()) {
    std::vector<Word> members;
    for (Word e : best_layer.elems)
      if (u.contains(e ^ rep)) members.push_back(e);
    if (members.empty()) continue;
    PointSet b{n, std::move(members)};
    BigRational d(sumset(b, x).size(), b.size());
    if (!best_d || d < *best_d) {
      best_d = d;
      best_rep = rep;
      best_b = std::move(b);
    }
  }
  if (!best_d) throw invariant_error("freiman_subspace: layer met no coset of U");
  trace.coset_rep = best_rep;
  trace.b = best_b;
  trace.d = *best_d;

  const Subspace u_perp = perp(u);
  trace.lambda = greedy_basis_extension(u_perp, chang_spectrum_points(x, *best_d));
  std::vector<Word> gens = trace.lambda;
  for (Word e : u_perp.basis()) gens.push_back(e);
  Subspace v_pre = perp(Subspace::from_generators(n, gens));
  trace.v_pre = v_pre;

  // Fourier bootstrap, exact: with c = 1_B * 1_B * 1_X * 1_X (counting),
  // c(0)|B+X| >= |B|^2|X|^2 and 2|c(v) - c(0)||B+X| <= |B|^2|X|^2 on V_pre
  {
    std::vector<BigInt> sb = int_spectrum(best_b);
    std::vector<BigInt> sx = int_spectrum(x);
    std::vector<BigInt> prod(sb.size());
    for (std::size_t i = 0; i < sb.size(); ++i)
      prod[i] = sb[i] * sb[i] * sx[i] * sx[i];
    std::vector<BigInt> counts = detail::int_inverse(std::move(prod), n);
    const BigInt bx_size = BigInt(sumset(best_b, x).size());
    const BigInt rhs = BigInt(best_b.size()) * best_b.size() * x.size() * x.size();
    if (counts[0] * bx_size < rhs)
      throw invariant_error("freiman_subspace: convolution mass bound failed at 0");
    for (Word v : v_pre.elements()) {
      BigInt diff = counts[v] - counts[0];
      if (diff < 0) diff = -diff;
      if (2 * diff * bx_size > rhs)
        throw invariant_error("freiman_subspace: spectral flatness failed on V");
    }
  }

  // containment: V_pre inside B+B+X+X inside 18A, as exact set inclusions
  {
    PointSet bbxx = sumset(sumset(best_b, best_b), sumset(x, x));
    if (!is_subset(PointSet::of(n, v_pre.elements()), bbxx))
      throw invariant_error("freiman_subspace: V not inside B+B+X+X");
    if (!is_subset(bbxx, iterated_sumset(a, 18)))
      throw invariant_error("freiman_subspace: B+B+X+X not inside 18A");
  }

  // enlargement: lexicographically least translate maximizing |A cap (x+V)|
  std::size_t best_cnt = 0;
  Word best_x = 0;
  for (std::size_t t = 0; t < (std::size_t{1} << n); ++t) {
    std::size_t cnt = 0;
    for (Word e : a.elems)
      if (v_pre.contains(e ^ static_cast<Word>(t))) ++cnt;
    if (cnt > best_cnt) {
      best_cnt = cnt;
      best_x = static_cast<Word>(t);
    }
  }
  Subspace v = span_with(v_pre, best_x);

  FreimanResult result;
  std::size_t inter = 0;
  for (Word e : a.elems)
    if (v.contains(e)) ++inter;
  result.v = v;
  result.alpha = BigRational(inter, v.size());
  result.delta = BigRational(v.size(), a.size());
  if (result.alpha <= 0) throw invariant_error("freiman_subspace: empty intersection with V");
  result.pipeline_trace = std::move(trace);
  return result;
}

}  // namespace specnorm
