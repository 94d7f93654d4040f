#pragma once

// From small spectral norm to a small-doubling subset of the support:
// arithmetic-connectivity witness search over support tuples, Chebyshev
// polynomial pairing diagnostics, energy averaging over odd convolution
// powers, and Balog-Szemeredi-Gowers extraction.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "gf2.hpp"
#include "rng.hpp"
#include "sumset.hpp"

namespace specnorm {

struct ChebyshevPoly {
  int l = 0;
  std::vector<BigInt> odd_coeffs;  // a_1, a_3, ..., a_{2l+1} of T_{2l+1}
};

// Exact coefficients of the Chebyshev polynomial T_{2l+1} via the recurrence
// T_{k+1} = 2x T_k - T_{k-1}. All even-degree coefficients vanish.
inline ChebyshevPoly chebyshev_coeffs(int l) {
  if (l < 0 || l > 64) throw precondition_error("chebyshev_coeffs: l outside [0, 64]");
  std::vector<BigInt> prev{1};     // T_0
  std::vector<BigInt> cur{0, 1};   // T_1
  for (int k = 1; k < 2 * l + 1; ++k) {
    std::vector<BigInt> next(cur.size() + 1, 0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] = cur[i] * 2;
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  ChebyshevPoly poly;
  poly.l = l;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    if (i % 2 == 0) {
      if (!cur[i].is_zero())
        throw invariant_error("chebyshev_coeffs: nonzero even coefficient");
    } else {
      poly.odd_coeffs.push_back(cur[i]);
    }
  }
  return poly;
}

inline BigRational chebyshev_eval(const ChebyshevPoly& poly, const BigRational& x) {
  BigRational acc = 0;
  BigRational x2 = x * x;
  BigRational power = x;
  for (const BigInt& a : poly.odd_coeffs) {
    acc += BigRational(a) * power;
    power *= x2;
  }
  return acc;
}

struct ConnectivityParams {
  int m = 3;                 // tuple length
  int l = 1;                 // subset sums of odd size in [3, 2l+1] are tested
  std::uint64_t seed = 0;
  std::size_t search_budget = 128;        // random tuples tried when not exhaustive
  std::uint64_t subset_work_cap = 200000;  // per-tuple subset evaluations
};

namespace detail {

// True when every odd-size subset (3 <= |S| <= 2l+1) of the tuple sums
// outside R; early-exits on the first sum landing in R. A tuple whose check
// exceeds the work cap counts as a non-witness.
inline bool is_connectivity_witness(const std::vector<Word>& tuple, const PointSet& r,
                                    int l, std::uint64_t work_cap) {
  const int m = static_cast<int>(tuple.size());
  std::uint64_t work = 0;
  for (int s = 3; s <= 2 * l + 1 && s <= m; s += 2) {
    std::vector<int> idx(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
      Word sum = 0;
      for (int i : idx) sum ^= tuple[static_cast<std::size_t>(i)];
      if (r.contains(sum)) return false;
      if (++work > work_cap) return false;
      int i = s - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - s + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < s; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return true;
}

}  // namespace detail

// Searches R^m for a tuple whose odd subset sums (sizes 3 .. 2l+1) all land
// outside R. Exhaustive in lexicographic order when |R|^m <= 10^6, otherwise
// seeded uniform sampling within the budget. Absence is a value.
inline std::optional<std::vector<Word>> connectivity_witness_search(
    const PointSet& r, const ConnectivityParams& params) {
  if (r.empty()) throw precondition_error("connectivity_witness_search: empty support");
  if (params.m < params.l || params.l < 1)
    throw precondition_error("connectivity_witness_search: need m >= l >= 1");
  const std::size_t m = static_cast<std::size_t>(params.m);

  BigInt tuple_count = boost::multiprecision::pow(BigInt(r.size()), static_cast<unsigned>(m));
  if (tuple_count <= 1000000) {
    std::vector<std::size_t> idx(m, 0);
    for (;;) {
      std::vector<Word> tuple(m);
      for (std::size_t i = 0; i < m; ++i) tuple[i] = r.elems[idx[i]];
      if (detail::is_connectivity_witness(tuple, r, params.l, params.subset_work_cap))
        return tuple;
      std::size_t d = 0;
      while (d < m && ++idx[d] == r.size()) idx[d++] = 0;
      if (d == m) break;
    }
    return std::nullopt;
  }

  Rng rng(params.seed);
  for (std::size_t t = 0; t < params.search_budget; ++t) {
    std::vector<Word> tuple(m);
    for (std::size_t i = 0; i < m; ++i)
      tuple[i] = r.elems[rng.below(r.size())];
    if (detail::is_connectivity_witness(tuple, r, params.l, params.subset_work_cap))
      return tuple;
  }
  return std::nullopt;
}

// Diagnostic record for the Chebyshev pairing inequalities: exact values of
// <h-hat^(2k+1), f-hat> for k = 0..l, their Chebyshev combination, and the
// pointwise bound |P(h-hat(r))| <= 1.
struct PairingReport {
  int m = 0;
  int l = 0;
  std::vector<int> omegas;                 // sgn f_Z(x_i)
  std::vector<BigRational> odd_pairings;   // index k: <h-hat^(2k+1), f-hat>
  BigRational cheb_pairing;                // <P(h-hat), f-hat>
  BigRational max_abs_cheb_value;          // max_r |P(h-hat(r))|
  bool cheb_bounded = false;               // max <= 1
};

// h-hat(r) = (1/m) sum_i omega_i (-1)^<r, x_i> with omega_i = sgn f_Z(x_i).
// Pairings are counting sums over all frequencies. The witness is
// re-validated: every odd subset sum of size 3..2l+1 must avoid supp f_Z.
inline PairingReport pairing_bound_check(const FunctionTable& f,
                                         const std::vector<Word>& witness, int l) {
  if (witness.empty()) throw precondition_error("pairing_bound_check: empty witness");
  AlmostIntegerView view = round_table(f);
  if (!(view.epsilon < Dyadic::scaled(1, 1)))
    throw precondition_error("pairing_bound_check: f not almost integer (eps >= 1/2)");
  std::vector<Word> supp;
  for (std::size_t x = 0; x < view.f_z.size(); ++x)
    if (!view.f_z[x].is_zero()) supp.push_back(static_cast<Word>(x));
  PointSet r_set{f.n, std::move(supp)};

  PairingReport rep;
  rep.m = static_cast<int>(witness.size());
  rep.l = l;
  for (Word x : witness) {
    if (x & ~word_mask(f.n)) throw dim_mismatch("pairing_bound_check: point out of range");
    BigInt v = view.f_z[x];
    if (v.is_zero())
      throw precondition_error("pairing_bound_check: witness point outside supp f_Z");
    rep.omegas.push_back(v > 0 ? 1 : -1);
  }
  if (!detail::is_connectivity_witness(witness, r_set, l,
                                       std::numeric_limits<std::uint64_t>::max()))
    throw precondition_error("pairing_bound_check: some odd subset sum hits supp f_Z");

  const SpectrumTable fhat = wht(f);
  const std::size_t N = f.size();
  std::vector<long long> h_int(N, 0);  // m * h-hat(r)
  for (std::size_t r = 0; r < N; ++r) {
    long long acc = 0;
    for (std::size_t i = 0; i < witness.size(); ++i)
      acc += dot(static_cast<Word>(r), witness[i]) ? -rep.omegas[i] : rep.omegas[i];
    h_int[r] = acc;
  }

  const BigInt m_big(rep.m);
  for (int k = 0; k <= l; ++k) {
    const unsigned e = static_cast<unsigned>(2 * k + 1);
    BigRational acc = 0;
    for (std::size_t r = 0; r < N; ++r) {
      if (h_int[r] == 0 || fhat[r].is_zero()) continue;
      acc += BigRational(boost::multiprecision::pow(BigInt(h_int[r]), e)) *
             fhat[r].to_rational();
    }
    rep.odd_pairings.push_back(acc / BigRational(boost::multiprecision::pow(m_big, e)));
  }

  ChebyshevPoly poly = chebyshev_coeffs(l);
  for (int k = 0; k <= l; ++k)
    rep.cheb_pairing += BigRational(poly.odd_coeffs[static_cast<std::size_t>(k)]) *
                        rep.odd_pairings[static_cast<std::size_t>(k)];

  for (std::size_t r = 0; r < N; ++r) {
    BigRational val = chebyshev_eval(poly, BigRational(h_int[r], rep.m));
    if (val < 0) val = -val;
    if (val > rep.max_abs_cheb_value) rep.max_abs_cheb_value = val;
  }
  rep.cheb_bounded = rep.max_abs_cheb_value <= 1;
  return rep;
}

struct SmallDoublingCertificate {
  PointSet set;          // A, a subset of supp f_Z
  BigRational doubling;  // |A+A| / |A|
  BigRational density;   // |A| / |supp f_Z|
  int k_selected = 0;    // energy-averaging exponent; 0 on the exhaustive path
};

struct ExtractConfig {
  BigRational m_cube_factor{1};   // m >= factor * l^3
  BigRational l_norm_factor{1};   // l = ceil(factor * M)
  std::optional<Dyadic> eps_threshold;  // default 2^-(8 + ceil(M))
  std::size_t exhaustive_support_cap = 18;
  std::uint64_t seed = 0;
  std::size_t search_budget = 128;
  std::uint64_t subset_work_cap = 200000;
  BsgConfig bsg;
};

namespace detail {

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    num *= n - i;
    den *= i + 1;
  }
  return num / den;
}

inline int ceil_to_int(const BigRational& x) { return static_cast<int>(ceil_rational(x)); }

// Unconstrained best subset: minimal doubling, ties to larger size, then to
// lexicographically smaller element list.
inline DoublingReport exhaustive_best_subset(const PointSet& r) {
  std::optional<DoublingReport> best;
  const std::size_t m = r.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<Word> sub;
    for (std::size_t i = 0; i < m; ++i)
      if ((mask >> i) & 1u) sub.push_back(r.elems[i]);
    DoublingReport rep = doubling(PointSet{r.n, std::move(sub)});
    bool better = !best;
    if (best) {
      if (rep.ratio != best->ratio)
        better = rep.ratio < best->ratio;
      else if (rep.set.size() != best->set.size())
        better = rep.set.size() > best->set.size();
      else
        better = rep.set.elems < best->set.elems;
    }
    if (better) best = std::move(rep);
  }
  return std::move(*best);
}

}  // namespace detail

// Produces A inside supp f_Z with controlled doubling. Small supports are
// solved exhaustively. Otherwise: no connectivity witness can exist for an
// almost-integer f of small norm, so a found witness is an error; energy
// averaging picks the odd power maximizing the normalized pairing, and BSG
// extracts the subset.
inline SmallDoublingCertificate extract_small_doubling(const FunctionTable& f,
                                                       const ExtractConfig& config = {}) {
  AlmostIntegerView view = round_table(f);
  const Dyadic m_norm = norm_a(f);
  Dyadic threshold;
  if (config.eps_threshold) {
    threshold = *config.eps_threshold;
  } else {
    int ceil_m = detail::ceil_to_int(m_norm.to_rational());
    threshold = Dyadic::scaled(1, static_cast<unsigned>(8 + std::max(0, ceil_m)));
  }
  if (view.epsilon > threshold)
    throw precondition_error("extract_small_doubling: rounding distance " +
                             view.epsilon.to_string() + " above threshold " +
                             threshold.to_string());
  std::vector<Word> supp;
  for (std::size_t x = 0; x < view.f_z.size(); ++x)
    if (!view.f_z[x].is_zero()) supp.push_back(static_cast<Word>(x));
  if (supp.empty())
    throw precondition_error("extract_small_doubling: integer part is zero");
  PointSet r_set{f.n, std::move(supp)};

  auto make_cert = [&](DoublingReport rep, int k_sel) {
    SmallDoublingCertificate cert;
    if (!is_subset(rep.set, r_set))
      throw invariant_error("extract_small_doubling: A not inside supp f_Z");
    cert.doubling = doubling(rep.set).ratio;  // recomputed
    cert.density = BigRational(rep.set.size(), r_set.size());
    cert.set = std::move(rep.set);
    cert.k_selected = k_sel;
    return cert;
  };

  if (r_set.size() <= config.exhaustive_support_cap)
    return make_cert(detail::exhaustive_best_subset(r_set), 0);

  const int l = std::max(1, detail::ceil_to_int(config.l_norm_factor * m_norm.to_rational()));
  const int m = std::max(2 * l + 1,
                         detail::ceil_to_int(config.m_cube_factor * BigRational(l) * l * l));
  ConnectivityParams params;
  params.m = m;
  params.l = l;
  params.seed = config.seed;
  params.search_budget = config.search_budget;
  params.subset_work_cap = config.subset_work_cap;
  if (auto witness = connectivity_witness_search(r_set, params)) {
    std::string pts;
    for (std::size_t i = 0; i < std::min<std::size_t>(witness->size(), 8); ++i)
      pts += (i ? "," : "") + to_hex((*witness)[i], f.n);
    throw stage_error("connectivity",
                      "witness tuple found (norm or rounding distance out of range): " + pts);
  }

  // Energy averaging: k maximizing <1_T^(2k+1), 1_R> * m * binom(m, 2k+1) /
  // |R|^(2k+1) over 1 <= k <= l, ties to the smallest k. T := R.
  std::vector<BigInt> spec = int_spectrum(r_set);
  std::vector<BigInt> spec_sq(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) spec_sq[i] = spec[i] * spec[i];
  std::vector<BigInt> powed = spec;  // exponent 1
  int k_best = 0;
  BigRational best_value = -1;
  for (int k = 1; k <= l; ++k) {
    for (std::size_t i = 0; i < powed.size(); ++i) powed[i] *= spec_sq[i];  // exponent 2k+1
    // <1_T^(2k+1), 1_R> = 2^-n * sum_rho U(rho)^(2k+1) * U(rho) since T = R
    BigInt sum = 0;
    for (std::size_t i = 0; i < powed.size(); ++i) sum += powed[i] * spec[i];
    BigInt q = sum >> f.n;
    if ((q << f.n) != sum) throw invariant_error("pairing sum not divisible by 2^n");
    BigRational value = BigRational(q) * m * detail::binomial(m, 2 * k + 1) /
                        BigRational(boost::multiprecision::pow(
                            BigInt(r_set.size()), static_cast<unsigned>(2 * k + 1)));
    if (value > best_value) {
      best_value = value;
      k_best = k;
    }
  }

  const EnergyReport energy = additive_energy(r_set);
  BigRational ef(energy.energy, energy.cube_bound);
  DoublingReport rep = bsg_extract(r_set, ef, config.bsg);
  return make_cert(std::move(rep), k_best);
}

}  // namespace specnorm
