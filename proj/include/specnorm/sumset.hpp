#pragma once

// Additive combinatorics over F_2^n with exact counting: sumsets, doubling,
// additive energy, counting-measure convolutions, Balog-Szemeredi-Gowers
// extraction, and Chang-type covers and spectrum point sets. Thresholds are
// compared cross-multiplied so no rounding occurs anywhere.

#include <cstdint>
#include <optional>
#include <vector>

#include "dyadic.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "gf2.hpp"

namespace specnorm {

namespace detail {

struct DenseBits {
  explicit DenseBits(int n) : w_((std::size_t{1} << n) / 64 + 1, 0) {}
  void set(Word x) { w_[x >> 6] |= std::uint64_t{1} << (x & 63); }
  bool test(Word x) const { return (w_[x >> 6] >> (x & 63)) & 1u; }
  std::vector<Word> to_sorted() const {
    std::vector<Word> out;
    for (std::size_t i = 0; i < w_.size(); ++i) {
      std::uint64_t chunk = w_[i];
      while (chunk) {
        int b = std::countr_zero(chunk);
        out.push_back(static_cast<Word>((i << 6) + static_cast<std::size_t>(b)));
        chunk &= chunk - 1;
      }
    }
    return out;
  }
  std::vector<std::uint64_t> w_;
};

inline void int_butterfly(std::vector<BigInt>& v) {
  const std::size_t N = v.size();
  for (std::size_t h = 1; h < N; h <<= 1) {
    for (std::size_t i = 0; i < N; i += (h << 1)) {
      for (std::size_t j = i; j < i + h; ++j) {
        BigInt a = v[j];
        BigInt b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

// Inverts an unnormalized integer spectrum, checking the 2^n divisibility
// that exactness guarantees.
inline std::vector<BigInt> int_inverse(std::vector<BigInt> v, int n) {
  int_butterfly(v);
  for (BigInt& x : v) {
    BigInt q = x >> n;
    if ((q << n) != x) throw invariant_error("integer transform not divisible by 2^n");
    x = q;
  }
  return v;
}

}  // namespace detail

inline PointSet sumset(const PointSet& a, const PointSet& b) {
  if (a.n != b.n) throw dim_mismatch("sumset: ambient dimensions differ");
  detail::DenseBits bits(a.n);
  for (Word x : a.elems)
    for (Word y : b.elems) bits.set(x ^ y);
  return PointSet{a.n, bits.to_sorted()};
}

// kA for k >= 1. Stops early once the chain stabilizes.
inline PointSet iterated_sumset(const PointSet& a, int k) {
  if (k < 1) throw precondition_error("iterated_sumset: k must be >= 1");
  PointSet acc = a;
  for (int i = 1; i < k; ++i) {
    PointSet next = sumset(acc, a);
    if (next == acc) break;
    acc = std::move(next);
  }
  return acc;
}

struct DoublingReport {
  PointSet set;
  std::size_t sumset_size = 0;
  BigRational ratio;  // |A+A| / |A|, >= 1, = 1 iff set is a coset
};

inline DoublingReport doubling(const PointSet& a) {
  if (a.empty()) throw precondition_error("doubling: empty set");
  DoublingReport rep;
  rep.sumset_size = sumset(a, a).size();
  rep.ratio = BigRational(rep.sumset_size, a.size());
  rep.set = a;
  return rep;
}

// Representation counts: out[s] = #{(x, y) in A x B : x + y = s}.
inline std::vector<std::uint64_t> rep_counts(const PointSet& a, const PointSet& b) {
  if (a.n != b.n) throw dim_mismatch("rep_counts: ambient dimensions differ");
  std::vector<std::uint64_t> counts(std::size_t{1} << a.n, 0);
  for (Word x : a.elems)
    for (Word y : b.elems) ++counts[x ^ y];
  return counts;
}

struct EnergyReport {
  PointSet set;
  BigInt energy;      // #{(a,b,c,d) in A^4 : a+b = c+d}
  BigInt cube_bound;  // |A|^3
};

inline EnergyReport additive_energy(const PointSet& a) {
  if (a.empty()) throw precondition_error("additive_energy: empty set");
  EnergyReport rep;
  rep.set = a;
  for (std::uint64_t c : rep_counts(a, a)) rep.energy += BigInt(c) * c;
  rep.cube_bound = BigInt(a.size()) * a.size() * a.size();
  if (rep.energy < BigInt(a.size()) * a.size() || rep.energy > rep.cube_bound)
    throw invariant_error("additive energy outside [|A|^2, |A|^3]");
  return rep;
}

// Unnormalized transform of the counting indicator: out[rho] = sum_{x in A} (-1)^<rho,x>.
inline std::vector<BigInt> int_spectrum(const PointSet& a) {
  std::vector<BigInt> v(std::size_t{1} << a.n, 0);
  for (Word x : a.elems) v[x] = 1;
  detail::int_butterfly(v);
  return v;
}

// r-fold counting convolution of an indicator: out[x] = #{(a_1..a_r) in A^r : sum = x}.
inline std::vector<BigInt> indicator_convolution_counts(const PointSet& a, int r) {
  if (r < 1) throw precondition_error("indicator_convolution_counts: r must be >= 1");
  std::vector<BigInt> spec = int_spectrum(a);
  for (BigInt& s : spec) s = boost::multiprecision::pow(s, static_cast<unsigned>(r));
  return detail::int_inverse(std::move(spec), a.n);
}

// <1_T^(r), 1_R> in counting measure: total r-fold representations landing in R.
inline BigInt convolution_pairing(const PointSet& t, int r, const PointSet& targets) {
  if (t.n != targets.n) throw dim_mismatch("convolution_pairing: dimensions differ");
  std::vector<BigInt> counts = indicator_convolution_counts(t, r);
  BigInt acc = 0;
  for (Word x : targets.elems) acc += counts[x];
  return acc;
}

// Counting-measure r-fold convolution of a dyadic table at one point:
// f^(r)(x) = sum over x_1 + ... + x_r = x of f(x_1) ... f(x_r), with
// f^(0) the indicator of 0.
inline Dyadic iterated_convolution_at(const FunctionTable& f, int r, Word x) {
  if (r < 0) throw precondition_error("iterated_convolution_at: r must be >= 0");
  x &= word_mask(f.n);
  if (r == 0) return x == 0 ? Dyadic(1) : Dyadic();
  std::vector<Dyadic> spec = f.values;  // unnormalized transform
  detail::butterfly(spec);
  Dyadic acc;
  for (std::size_t rho = 0; rho < spec.size(); ++rho) {
    Dyadic term = spec[rho].pow(static_cast<unsigned>(r));
    if (dot(static_cast<Word>(rho), x))
      acc -= term;
    else
      acc += term;
  }
  return acc.div_pow2(static_cast<unsigned>(f.n));
}

// ---------------------------------------------------------------------------
// Balog-Szemeredi-Gowers extraction.

struct BsgConfig {
  BigRational c1_fraction{1, 4};  // required |A| >= c1 |T|
  BigRational c2_bound{8};        // required |A+A| <= c2 |A|
  std::size_t exhaustive_cap = 20;
  std::size_t candidate_cap = 64;
};

namespace detail {

inline std::optional<DoublingReport> bsg_qualifies(const PointSet& a, std::size_t t_size,
                                                   const BsgConfig& cfg) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (a.empty()) return std::nullopt;
  // |A| >= c1 |T|
  if (BigInt(a.size()) * denominator(cfg.c1_fraction) <
      numerator(cfg.c1_fraction) * t_size)
    return std::nullopt;
  DoublingReport rep = doubling(a);
  // |A+A| <= c2 |A|
  if (BigInt(rep.sumset_size) * denominator(cfg.c2_bound) >
      numerator(cfg.c2_bound) * a.size())
    return std::nullopt;
  return rep;
}

}  // namespace detail

// Finds A subset of T with |A| >= c1|T| and doubling at most c2, given that T
// has additive energy at least energy_fraction * |T|^3 (verified exactly).
// Small T is searched exhaustively: minimal doubling ratio, ties broken by
// larger size then lexicographically smaller element list. Larger T walks
// popular-sum neighborhoods in vertex order, their degree-cleaned
// refinements, then T itself, returning the first candidate that verifies.
inline DoublingReport bsg_extract(const PointSet& t, const BigRational& energy_fraction,
                                  const BsgConfig& cfg = {}) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (t.empty()) throw precondition_error("bsg_extract: empty set");
  const BigInt energy = additive_energy(t).energy;
  const BigInt cube = BigInt(t.size()) * t.size() * t.size();
  // E(T) >= ef * |T|^3
  if (energy * denominator(energy_fraction) < numerator(energy_fraction) * cube)
    throw precondition_error("bsg_extract: energy below the stated fraction");

  if (t.size() <= cfg.exhaustive_cap) {
    std::optional<DoublingReport> best;
    const std::size_t m = t.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
      std::vector<Word> sub;
      for (std::size_t i = 0; i < m; ++i)
        if ((mask >> i) & 1u) sub.push_back(t.elems[i]);
      auto rep = detail::bsg_qualifies(PointSet{t.n, std::move(sub)}, t.size(), cfg);
      if (!rep) continue;
      bool better = !best;
      if (best) {
        if (rep->ratio != best->ratio)
          better = rep->ratio < best->ratio;
        else if (rep->set.size() != best->set.size())
          better = rep->set.size() > best->set.size();
        else
          better = rep->set.elems < best->set.elems;
      }
      if (better) best = std::move(rep);
    }
    if (!best)
      throw stage_error("bsg", "no qualifying subset exists at |T|=" +
                                   std::to_string(t.size()));
    return std::move(*best);
  }

  // Popular sums: r_s >= (ef/2) |T|, compared as 2 * r_s * den >= num * |T|.
  std::vector<std::uint64_t> counts = rep_counts(t, t);
  detail::DenseBits popular(t.n);
  for (std::size_t s = 0; s < counts.size(); ++s)
    if (BigInt(counts[s]) * 2 * denominator(energy_fraction) >=
        numerator(energy_fraction) * t.size())
      popular.set(static_cast<Word>(s));

  std::size_t tried = 0;
  for (Word v : t.elems) {
    if (tried >= cfg.candidate_cap) break;
    std::vector<Word> nbrs;
    for (Word w : t.elems)
      if (popular.test(v ^ w)) nbrs.push_back(w);
    if (nbrs.empty()) continue;
    PointSet a{t.n, nbrs};  // sorted: built from sorted t.elems
    ++tried;
    if (auto rep = detail::bsg_qualifies(a, t.size(), cfg)) return std::move(*rep);
    if (tried >= cfg.candidate_cap) break;
    // One cleaning pass: keep vertices popular-adjacent to at least half of a.
    std::vector<Word> cleaned;
    for (Word w : a.elems) {
      std::size_t deg = 0;
      for (Word u : a.elems)
        if (popular.test(w ^ u)) ++deg;
      if (2 * deg >= a.size()) cleaned.push_back(w);
    }
    if (cleaned.size() != a.size() && !cleaned.empty()) {
      ++tried;
      if (auto rep = detail::bsg_qualifies(PointSet{t.n, std::move(cleaned)}, t.size(), cfg))
        return std::move(*rep);
    }
  }
  if (auto rep = detail::bsg_qualifies(t, t.size(), cfg)) return std::move(*rep);
  throw stage_error("bsg", "no candidate met c1=" + cfg.c1_fraction.str() +
                               ", c2=" + cfg.c2_bound.str() + " after " +
                               std::to_string(tried) + " candidates");
}

// ---------------------------------------------------------------------------
// Chang-type covering and spectrum point sets.

// Greedy cover: picks elements of X outside the current span while 3X is not
// inside span(T) + 2X. Returns the picked elements in pick order. The
// postcondition 3X subset-of span(T) + 2X is verified exhaustively.
inline std::vector<Word> chang_cover(const PointSet& x, std::size_t budget) {
  if (budget < 1) throw precondition_error("chang_cover: budget must be >= 1");
  if (!x.contains(0))
    throw precondition_error("chang_cover: X must contain 0 (translate first)");
  const PointSet two_x = sumset(x, x);
  const PointSet three_x = sumset(two_x, x);
  std::vector<Word> picked;
  Subspace span_t = Subspace::zero(x.n);
  auto covered = [&] {
    return is_subset(three_x, sumset(PointSet{x.n, span_t.elements()}, two_x));
  };
  while (!covered()) {
    Word next = 0;
    bool found = false;
    for (Word e : x.elems) {
      if (!span_t.contains(e)) {
        next = e;
        found = true;
        break;
      }
    }
    if (!found)
      throw invariant_error("chang_cover: X inside span(T) but 3X uncovered");
    if (picked.size() >= budget)
      throw stage_error("chang_cover",
                        "budget exhausted at |T|=" + std::to_string(picked.size()));
    picked.push_back(next);
    span_t = span_with(span_t, next);
  }
  if (!is_subset(three_x, sumset(PointSet{x.n, span_t.elements()}, two_x)))
    throw invariant_error("chang_cover: postcondition failed");
  return picked;
}

// Frequencies r with |sum_{x in X} (-1)^<r,x>|^2 * 4 * d_bound >= |X|^2,
// ascending. Squaring keeps the 1/(2 sqrt(D)) threshold exact.
inline std::vector<Word> chang_spectrum_points(const PointSet& x, const BigRational& d_bound) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (x.empty()) throw precondition_error("chang_spectrum_points: empty set");
  if (d_bound <= 0) throw precondition_error("chang_spectrum_points: D must be positive");
  std::vector<BigInt> spec = int_spectrum(x);
  const BigInt rhs = BigInt(x.size()) * x.size() * denominator(d_bound);
  std::vector<Word> out;
  for (std::size_t r = 0; r < spec.size(); ++r)
    if (spec[r] * spec[r] * 4 * numerator(d_bound) >= rhs)
      out.push_back(static_cast<Word>(r));
  return out;
}

// Greedy linear-independence filter: extends `start` by the given points in
// order, keeping those that enlarge the span. Returns the kept points.
inline std::vector<Word> greedy_basis_extension(const Subspace& start,
                                                const std::vector<Word>& points) {
  Subspace s = start;
  std::vector<Word> kept;
  for (Word p : points) {
    if (!s.contains(p)) {
      kept.push_back(p);
      s = span_with(s, p);
    }
  }
  return kept;
}

}  // namespace specnorm
