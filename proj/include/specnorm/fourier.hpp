#pragma once

// Fourier analysis on F_2^n with exact dyadic arithmetic.
//
// Conventions: f-hat(r) = 2^-n * sum_x f(x) (-1)^<r,x>, so a table of
// integers has spectrum with log2-denominators <= n, Fourier inversion is
// the unnormalized butterfly, and ||f||_A = sum_r |f-hat(r)|.

#include <cstdint>
#include <vector>

#include "dyadic.hpp"
#include "errors.hpp"
#include "gf2.hpp"

namespace specnorm {

struct FunctionTable {
  int n = 0;
  std::vector<Dyadic> values;  // indexed by point, size 2^n

  static FunctionTable zero(int ambient) {
    check_dim(ambient);
    return FunctionTable{ambient, std::vector<Dyadic>(std::size_t{1} << ambient)};
  }

  static FunctionTable of(int ambient, std::vector<Dyadic> vals) {
    check_dim(ambient);
    if (vals.size() != (std::size_t{1} << ambient))
      throw dim_mismatch("table size does not match ambient dimension");
    return FunctionTable{ambient, std::move(vals)};
  }

  std::size_t size() const { return values.size(); }
  const Dyadic& operator[](std::size_t i) const { return values[i]; }
  Dyadic& operator[](std::size_t i) { return values[i]; }

  friend bool operator==(const FunctionTable& a, const FunctionTable& b) {
    return a.n == b.n && a.values == b.values;
  }
};

struct SpectrumTable {
  int n = 0;
  std::vector<Dyadic> values;  // indexed by frequency, size 2^n

  std::size_t size() const { return values.size(); }
  const Dyadic& operator[](std::size_t i) const { return values[i]; }
  Dyadic& operator[](std::size_t i) { return values[i]; }

  friend bool operator==(const SpectrumTable& a, const SpectrumTable& b) {
    return a.n == b.n && a.values == b.values;
  }
};

namespace detail {

// In-place unnormalized Walsh-Hadamard butterfly; applied twice it
// multiplies by 2^n.
inline void butterfly(std::vector<Dyadic>& v) {
  const std::size_t N = v.size();
  for (std::size_t h = 1; h < N; h <<= 1) {
    for (std::size_t i = 0; i < N; i += (h << 1)) {
      for (std::size_t j = i; j < i + h; ++j) {
        Dyadic a = v[j];
        Dyadic b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

}  // namespace detail

inline SpectrumTable wht(const FunctionTable& f) {
  std::vector<Dyadic> v = f.values;
  detail::butterfly(v);
  for (Dyadic& d : v) d = d.div_pow2(static_cast<unsigned>(f.n));
  return SpectrumTable{f.n, std::move(v)};
}

inline FunctionTable inverse_wht(const SpectrumTable& s) {
  std::vector<Dyadic> v = s.values;
  detail::butterfly(v);
  return FunctionTable{s.n, std::move(v)};
}

inline Dyadic spectral_norm(const SpectrumTable& s) {
  Dyadic acc;
  for (const Dyadic& d : s.values) acc += d.abs();
  return acc;
}

inline Dyadic norm_a(const FunctionTable& f) { return spectral_norm(wht(f)); }

// {r : |f-hat(r)| >= rho * ||f||_A}, ascending. rho in (0, 1].
inline std::vector<Word> spec_set(const SpectrumTable& s, const BigRational& rho) {
  if (rho <= 0 || rho > 1) throw precondition_error("spec_set: rho outside (0,1]");
  BigRational bound = rho * spectral_norm(s).to_rational();
  std::vector<Word> out;
  for (std::size_t r = 0; r < s.size(); ++r)
    if (s[r].abs().to_rational() >= bound) out.push_back(static_cast<Word>(r));
  return out;
}

// f * mu_V by direct averaging over cosets; independent of the transform.
inline FunctionTable convolve_subspace(const FunctionTable& f, const Subspace& v) {
  if (f.n != v.ambient_dim())
    throw dim_mismatch("convolve_subspace: ambient dimensions differ");
  const std::vector<Word> elems = v.elements();
  const unsigned d = static_cast<unsigned>(v.dim());
  FunctionTable g = FunctionTable::zero(f.n);
  std::vector<char> seen(f.size(), 0);
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (seen[x]) continue;
    Dyadic sum;
    for (Word e : elems) sum += f.values[x ^ e];
    Dyadic avg = sum.div_pow2(d);
    for (Word e : elems) {
      g.values[x ^ e] = avg;
      seen[x ^ e] = 1;
    }
  }
  return g;
}

// g(x) = f(x + t).
inline FunctionTable translate(const FunctionTable& f, Word t) {
  t &= word_mask(f.n);
  FunctionTable g = FunctionTable::zero(f.n);
  for (std::size_t x = 0; x < f.size(); ++x) g.values[x] = f.values[x ^ t];
  return g;
}

inline FunctionTable operator-(const FunctionTable& a, const FunctionTable& b) {
  if (a.n != b.n) throw dim_mismatch("table subtraction: dimensions differ");
  FunctionTable out = FunctionTable::zero(a.n);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

inline FunctionTable operator+(const FunctionTable& a, const FunctionTable& b) {
  if (a.n != b.n) throw dim_mismatch("table addition: dimensions differ");
  FunctionTable out = FunctionTable::zero(a.n);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] + b.values[i];
  return out;
}

// Pointwise nearest-integer view. epsilon is the exact max distance to the
// integer lattice; rounding_unique reports whether every point is strictly
// closer than 1/2 to its rounded value.
struct AlmostIntegerView {
  std::vector<BigInt> f_z;
  Dyadic epsilon;
  bool rounding_unique = true;
};

inline AlmostIntegerView round_table(const FunctionTable& f) {
  AlmostIntegerView view;
  view.f_z.reserve(f.size());
  const Dyadic half = Dyadic::scaled(1, 1);
  for (const Dyadic& d : f.values) {
    view.f_z.push_back(d.nearest_int());
    Dyadic dist = d.dist_to_int();
    if (dist > view.epsilon) view.epsilon = dist;
  }
  view.rounding_unique = view.epsilon < half;
  return view;
}

inline bool integer_part_is_zero(const AlmostIntegerView& v) {
  for (const BigInt& z : v.f_z)
    if (!z.is_zero()) return false;
  return true;
}

// E_{x in W} (f(x) - g(x))^p for even p; returns the p-th power of the
// L_p(mu_W) gap so all comparisons stay exact.
inline Dyadic lp_power_gap(const FunctionTable& f, const FunctionTable& g,
                           const Coset& w, unsigned p) {
  if (f.n != g.n || f.n != w.sub.ambient_dim())
    throw dim_mismatch("lp_power_gap: dimensions differ");
  if (p == 0 || p % 2 != 0) throw precondition_error("lp_power_gap: p must be even");
  Dyadic acc;
  for (Word e : w.sub.elements()) {
    std::size_t x = static_cast<std::size_t>(w.rep ^ e);
    acc += (f.values[x] - g.values[x]).pow(p);
  }
  return acc.div_pow2(static_cast<unsigned>(w.sub.dim()));
}

// ||f * mu_V||_A computed from a precomputed spectrum: the mass of f-hat on
// the annihilator of V.
inline Dyadic masked_norm(const SpectrumTable& s, const Subspace& v_perp) {
  Dyadic acc;
  for (Word r : v_perp.elements()) acc += s.values[r].abs();
  return acc;
}

}  // namespace specnorm
