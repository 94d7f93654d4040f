#pragma once

// Linear algebra over F_2^n for n <= 24. Points are bit-packed into 32-bit
// words; bit i is coordinate i, so the integer order on words is the
// lexicographic order on coordinate strings read most-significant-first.
//
// Subspaces are stored as reduced row echelon bases: each row's most
// significant set bit is its pivot, every row is zero at the other rows'
// pivots, and rows are sorted ascending (equivalently: pivots ascending).
// This basis is unique per subspace, so operator== is structural equality.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace specnorm {

using Word = std::uint32_t;

inline constexpr int kMaxDim = 24;

inline void check_dim(int n) {
  if (n < 0 || n > kMaxDim)
    throw dim_mismatch("ambient dimension out of range: " + std::to_string(n));
}

inline Word word_mask(int n) {
  check_dim(n);
  return n == 0 ? 0u : (~Word{0} >> (32 - n));
}

// Parity of the standard bilinear form <a, b>.
inline int dot(Word a, Word b) { return std::popcount(a & b) & 1; }

inline int pivot_bit(Word row) { return std::bit_width(row) - 1; }

struct Point {
  Word bits = 0;
  int n = 0;
  friend bool operator==(const Point& a, const Point& b) {
    return a.n == b.n && a.bits == b.bits;
  }
  friend bool operator<(const Point& a, const Point& b) { return a.bits < b.bits; }
};

class Subspace {
 public:
  Subspace() : n_(0) {}

  static Subspace zero(int n) {
    check_dim(n);
    Subspace s;
    s.n_ = n;
    return s;
  }

  static Subspace full(int n) {
    check_dim(n);
    Subspace s;
    s.n_ = n;
    for (int i = 0; i < n; ++i) s.rows_.push_back(Word{1} << i);
    return s;
  }

  static Subspace from_generators(int n, const std::vector<Word>& gens) {
    check_dim(n);
    const Word mask = word_mask(n);
    std::array<Word, kMaxDim> pr{};  // pr[b] = row with pivot b, or 0
    for (Word g : gens) {
      Word x = g & mask;
      for (int b = n - 1; b >= 0; --b)
        if (((x >> b) & 1u) && pr[b]) x ^= pr[b];
      if (x == 0) continue;
      int p = pivot_bit(x);
      pr[p] = x;
      for (int q = p + 1; q < n; ++q)
        if (pr[q] && ((pr[q] >> p) & 1u)) pr[q] ^= x;
    }
    Subspace s;
    s.n_ = n;
    for (int b = 0; b < n; ++b)
      if (pr[b]) s.rows_.push_back(pr[b]);
    return s;
  }

  int ambient_dim() const { return n_; }
  int dim() const { return static_cast<int>(rows_.size()); }
  const std::vector<Word>& basis() const { return rows_; }
  std::uint64_t size() const { return std::uint64_t{1} << rows_.size(); }

  // Canonical coset representative: x with every pivot coordinate cleared.
  // It is the lexicographic minimum of x + V.
  Word reduce(Word x) const {
    for (Word row : rows_)
      if ((x >> pivot_bit(row)) & 1u) x ^= row;
    return x;
  }

  bool contains(Word x) const { return reduce(x) == 0; }

  // All 2^dim elements, ascending.
  std::vector<Word> elements() const {
    std::vector<Word> out(size(), 0);
    for (std::size_t s = 1; s < out.size(); ++s)
      out[s] = out[s & (s - 1)] ^ rows_[std::countr_zero(s)];
    std::sort(out.begin(), out.end());
    return out;
  }

  // Canonical coset representatives (all pivot coordinates zero), ascending.
  std::vector<Word> coset_reps() const {
    Word piv = 0;
    for (Word row : rows_) piv |= Word{1} << pivot_bit(row);
    std::vector<int> free_bits;
    for (int b = 0; b < n_; ++b)
      if (!((piv >> b) & 1u)) free_bits.push_back(b);
    std::vector<Word> out;
    out.reserve(std::size_t{1} << free_bits.size());
    for (Word v = 0; v < (Word{1} << free_bits.size()); ++v) {
      Word x = 0;
      for (std::size_t i = 0; i < free_bits.size(); ++i)
        if ((v >> i) & 1u) x |= Word{1} << free_bits[i];
      out.push_back(x);
    }
    return out;
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.n_ == b.n_ && a.rows_ == b.rows_;
  }
  friend bool operator!=(const Subspace& a, const Subspace& b) { return !(a == b); }
  // Total order used only for deterministic tie-breaking.
  friend bool operator<(const Subspace& a, const Subspace& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.rows_ < b.rows_;
  }

 private:
  int n_;
  std::vector<Word> rows_;
};

inline void check_same_ambient(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw dim_mismatch("subspace ambient dimensions differ");
}

inline Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  check_same_ambient(a, b);
  std::vector<Word> gens = a.basis();
  gens.insert(gens.end(), b.basis().begin(), b.basis().end());
  return Subspace::from_generators(a.ambient_dim(), gens);
}

inline Subspace span_with(const Subspace& v, Word x) {
  std::vector<Word> gens = v.basis();
  gens.push_back(x);
  return Subspace::from_generators(v.ambient_dim(), gens);
}

// Annihilator V^perp = {r : <r, x> = 0 for all x in V}.
inline Subspace perp(const Subspace& v) {
  const int n = v.ambient_dim();
  Word piv = 0;
  for (Word row : v.basis()) piv |= Word{1} << pivot_bit(row);
  std::vector<Word> gens;
  for (int f = 0; f < n; ++f) {
    if ((piv >> f) & 1u) continue;
    Word w = Word{1} << f;
    for (Word row : v.basis())
      if ((row >> f) & 1u) w |= Word{1} << pivot_bit(row);
    gens.push_back(w);
  }
  return Subspace::from_generators(n, gens);
}

inline Subspace intersect(const Subspace& a, const Subspace& b) {
  check_same_ambient(a, b);
  return perp(subspace_sum(perp(a), perp(b)));
}

struct Coset {
  Word rep = 0;
  Subspace sub;

  static Coset of(Word x, const Subspace& v) { return Coset{v.reduce(x), v}; }
  bool contains(Word x) const { return sub.contains(x ^ rep); }
  friend bool operator==(const Coset& a, const Coset& b) {
    return a.rep == b.rep && a.sub == b.sub;
  }
};

// Finite subset of F_2^n, stored sorted and deduplicated.
struct PointSet {
  int n = 0;
  std::vector<Word> elems;

  static PointSet of(int ambient, std::vector<Word> words) {
    check_dim(ambient);
    const Word mask = word_mask(ambient);
    for (Word& w : words) w &= mask;
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return PointSet{ambient, std::move(words)};
  }

  std::size_t size() const { return elems.size(); }
  bool empty() const { return elems.empty(); }
  bool contains(Word x) const {
    return std::binary_search(elems.begin(), elems.end(), x);
  }
  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.n == b.n && a.elems == b.elems;
  }
};

inline bool is_subset(const PointSet& a, const PointSet& b) {
  if (a.n != b.n) throw dim_mismatch("point set ambient dimensions differ");
  return std::includes(b.elems.begin(), b.elems.end(), a.elems.begin(), a.elems.end());
}

// Enumerates every subspace of F_2^n of dimension d exactly once, in a fixed
// deterministic order: pivot sets ascend lexicographically, then free entries
// count up. The callback receives the subspace by const reference.
template <class F>
void for_each_subspace_of_dim(int n, int d, F&& fn) {
  check_dim(n);
  if (d < 0 || d > n) throw dim_mismatch("subspace dimension out of range");
  if (d == 0) {
    fn(Subspace::zero(n));
    return;
  }
  std::vector<int> piv(d);  // ascending pivot positions
  for (int i = 0; i < d; ++i) piv[i] = i;
  for (;;) {
    Word piv_mask = 0;
    for (int p : piv) piv_mask |= Word{1} << p;
    // Row i (pivot piv[i]) may have arbitrary entries at non-pivot
    // positions below its pivot.
    std::vector<std::vector<int>> slots(d);
    int total = 0;
    for (int i = 0; i < d; ++i) {
      for (int b = 0; b < piv[i]; ++b)
        if (!((piv_mask >> b) & 1u)) slots[i].push_back(b);
      total += static_cast<int>(slots[i].size());
    }
    for (std::uint64_t fill = 0; fill < (std::uint64_t{1} << total); ++fill) {
      std::vector<Word> rows(d);
      int used = 0;
      for (int i = 0; i < d; ++i) {
        Word r = Word{1} << piv[i];
        for (int s : slots[i]) {
          if ((fill >> used) & 1u) r |= Word{1} << s;
          ++used;
        }
        rows[i] = r;
      }
      Subspace sub = Subspace::from_generators(n, rows);
      fn(static_cast<const Subspace&>(sub));
    }
    // next pivot combination
    int i = d - 1;
    while (i >= 0 && piv[i] == n - d + i) --i;
    if (i < 0) break;
    ++piv[i];
    for (int j = i + 1; j < d; ++j) piv[j] = piv[j - 1] + 1;
  }
}

template <class F>
void for_each_subspace(int n, F&& fn) {
  for (int d = 0; d <= n; ++d) for_each_subspace_of_dim(n, d, fn);
}

inline std::string to_hex(Word x, int n) {
  int digits = (n + 3) / 4;
  if (digits == 0) digits = 1;
  std::string s(static_cast<std::size_t>(digits), '0');
  for (int i = digits - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = "0123456789abcdef"[x & 0xf];
    x >>= 4;
  }
  return s;
}

inline std::optional<Word> from_hex(const std::string& s, int n) {
  if (s.empty() || s.size() > 8) return std::nullopt;
  Word x = 0;
  for (char c : s) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else return std::nullopt;
    x = (x << 4) | static_cast<Word>(v);
  }
  if (x & ~word_mask(n)) return std::nullopt;
  return x;
}

}  // namespace specnorm
