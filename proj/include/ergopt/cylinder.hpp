#pragma once

// Locally constant observables on the full shift and the variation / norm
// functionals built on them.
//
// A depth-k CylinderFunction is a table over the m^k words of length k in
// lexicographic order. Values share one positive denominator, so the hot
// loops (variations, max-plus relaxations) run on integer numerators.

#include "ergopt/a_sequence.hpp"
#include "ergopt/rational.hpp"
#include "ergopt/shift.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ergopt {

/// m^k, throwing instead of overflowing.
inline std::size_t checked_pow(std::uint64_t m, std::size_t k) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (out > std::numeric_limits<std::size_t>::max() / m)
      throw std::overflow_error("table size m^k overflows");
    out *= m;
  }
  return out;
}

/// Lexicographic index of w among words of its length.
inline std::size_t word_index(const Word& w, std::uint32_t m) {
  std::size_t idx = 0;
  for (Symbol s : w) idx = idx * m + s;
  return idx;
}

inline Word index_word(std::size_t idx, std::size_t len, std::uint32_t m) {
  Word w(len);
  for (std::size_t t = len; t-- > 0;) {
    w[t] = static_cast<Symbol>(idx % m);
    idx /= m;
  }
  return w;
}

class CylinderFunction {
 public:
  CylinderFunction(Alphabet alphabet, std::size_t depth, const std::vector<Rational>& values)
      : alphabet_(alphabet), depth_(depth), den_(1) {
    const std::size_t n = checked_pow(alphabet.size, depth);
    if (values.size() != n)
      throw std::invalid_argument("table has " + std::to_string(values.size()) + " entries, expected m^k = " +
                                  std::to_string(n));
    for (const auto& v : values)
      if (!mpz_divisible_p(den_.get_mpz_t(), v.get_den_mpz_t())) den_ = lcm(den_, v.get_den());
    num_.resize(n);
    Integer factor;
    for (std::size_t i = 0; i < n; ++i) {
      mpz_divexact(factor.get_mpz_t(), den_.get_mpz_t(), values[i].get_den_mpz_t());
      num_[i] = values[i].get_num() * factor;
    }
  }

  /// Values num[i] / den, taken as given (no reduction).
  static CylinderFunction from_scaled(Alphabet alphabet, std::size_t depth, std::vector<Integer> numerators,
                                      Integer denominator) {
    if (numerators.size() != checked_pow(alphabet.size, depth))
      throw std::invalid_argument("scaled table size does not match m^k");
    if (denominator <= 0) throw std::invalid_argument("common denominator must be positive");
    CylinderFunction f(alphabet, depth);
    f.num_ = std::move(numerators);
    f.den_ = std::move(denominator);
    return f;
  }

  static CylinderFunction constant(Alphabet alphabet, std::size_t depth, const Rational& c) {
    CylinderFunction f(alphabet, depth);
    f.num_.assign(checked_pow(alphabet.size, depth), c.get_num());
    f.den_ = c.get_den();
    return f;
  }

  static CylinderFunction zero(Alphabet alphabet, std::size_t depth) { return constant(alphabet, depth, 0); }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t depth() const { return depth_; }
  std::size_t size() const { return num_.size(); }
  const std::vector<Integer>& numerators() const { return num_; }
  const Integer& denominator() const { return den_; }

  Rational operator[](std::size_t idx) const {
    Rational r(num_[idx], den_);
    r.canonicalize();
    return r;
  }

  Rational at(const Word& w) const {
    if (w.size() != depth_) throw std::invalid_argument("word length differs from function depth");
    return (*this)[word_index(w, alphabet_.size)];
  }

  /// f(x): looks at the first depth() symbols.
  Rational operator()(const Point& x) const {
    if (!(x.alphabet() == alphabet_)) throw AlphabetMismatch();
    std::size_t idx = 0;
    for (std::size_t t = 0; t < depth_; ++t) idx = idx * alphabet_.size + x[t];
    return (*this)[idx];
  }

  std::vector<Rational> values() const {
    std::vector<Rational> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = (*this)[i];
    return out;
  }

  bool is_zero() const {
    return std::all_of(num_.begin(), num_.end(), [](const Integer& z) { return z == 0; });
  }

  /// Divides out the common factor of all numerators and the denominator.
  void normalize() {
    Integer g = den_;
    for (const auto& z : num_) {
      if (g == 1) break;
      g = gcd(g, z);
    }
    if (g == 1) return;
    for (auto& z : num_) mpz_divexact(z.get_mpz_t(), z.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
  }

 private:
  CylinderFunction(Alphabet alphabet, std::size_t depth) : alphabet_(alphabet), depth_(depth), den_(1) {}

  Alphabet alphabet_;
  std::size_t depth_;
  std::vector<Integer> num_;
  Integer den_;
};

/// Same function after re-tabulating at depth K >= depth(f).
inline CylinderFunction lift_depth(const CylinderFunction& f, std::size_t depth) {
  if (depth < f.depth()) throw std::invalid_argument("cannot lift to a smaller depth");
  if (depth == f.depth()) return f;
  const std::size_t block = checked_pow(f.alphabet().size, depth - f.depth());
  std::vector<Integer> num(f.size() * block);
  for (std::size_t i = 0; i < f.size(); ++i)
    std::fill(num.begin() + static_cast<std::ptrdiff_t>(i * block),
              num.begin() + static_cast<std::ptrdiff_t>((i + 1) * block), f.numerators()[i]);
  return CylinderFunction::from_scaled(f.alphabet(), depth, std::move(num), f.denominator());
}

/// h o T, one level deeper: (h o T)(w_0 w_1 ... w_j) = h(w_1 ... w_j).
inline CylinderFunction compose_shift(const CylinderFunction& h) {
  const std::size_t n = h.size();
  std::vector<Integer> num(n * h.alphabet().size);
  for (std::size_t i = 0; i < num.size(); ++i) num[i] = h.numerators()[i % n];
  return CylinderFunction::from_scaled(h.alphabet(), h.depth() + 1, std::move(num), h.denominator());
}

/// a*f + b*g on a common depth and denominator.
inline CylinderFunction linear_combination(const Rational& a, const CylinderFunction& f, const Rational& b,
                                           const CylinderFunction& g) {
  if (!(f.alphabet() == g.alphabet())) throw AlphabetMismatch();
  const std::size_t depth = std::max(f.depth(), g.depth());
  std::optional<CylinderFunction> f_lift, g_lift;
  if (f.depth() < depth) f_lift = lift_depth(f, depth);
  if (g.depth() < depth) g_lift = lift_depth(g, depth);
  const CylinderFunction& fl = f_lift ? *f_lift : f;
  const CylinderFunction& gl = g_lift ? *g_lift : g;
  // a*nf/df + b*ng/dg over den = lcm(df*a.den, dg*b.den)
  const Integer da = fl.denominator() * a.get_den();
  const Integer db = gl.denominator() * b.get_den();
  const Integer den = lcm(da, db);
  const Integer ca = a.get_num() * Integer(den / da);
  const Integer cb = b.get_num() * Integer(den / db);
  std::vector<Integer> num(fl.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    num[i] = fl.numerators()[i] * ca;
    mpz_addmul(num[i].get_mpz_t(), gl.numerators()[i].get_mpz_t(), cb.get_mpz_t());
  }
  return CylinderFunction::from_scaled(f.alphabet(), depth, std::move(num), den);
}

inline CylinderFunction add(const CylinderFunction& f, const CylinderFunction& g) {
  return linear_combination(1, f, 1, g);
}

inline CylinderFunction subtract(const CylinderFunction& f, const CylinderFunction& g) {
  return linear_combination(1, f, -1, g);
}

inline CylinderFunction scale(const Rational& c, const CylinderFunction& f) {
  std::vector<Integer> num(f.size());
  for (std::size_t i = 0; i < num.size(); ++i) num[i] = f.numerators()[i] * c.get_num();
  return CylinderFunction::from_scaled(f.alphabet(), f.depth(), std::move(num), f.denominator() * c.get_den());
}

inline CylinderFunction add_constant(const CylinderFunction& f, const Rational& c) {
  return add(f, CylinderFunction::constant(f.alphabet(), 0, c));
}

/// Pointwise equality of the represented functions (depths may differ).
inline bool same_function(const CylinderFunction& f, const CylinderFunction& g) {
  if (!(f.alphabet() == g.alphabet())) return false;
  const std::size_t depth = std::max(f.depth(), g.depth());
  const CylinderFunction fl = lift_depth(f, depth);
  const CylinderFunction gl = lift_depth(g, depth);
  for (std::size_t i = 0; i < fl.size(); ++i)
    if (fl.numerators()[i] * gl.denominator() != gl.numerators()[i] * fl.denominator()) return false;
  return true;
}

/// var_0 .. var_depth; var_j is the largest change of f between points that
/// agree on their first j symbols, and vanishes for j >= depth.
inline std::vector<Rational> variation_profile(const CylinderFunction& f) {
  const std::uint32_t m = f.alphabet().size;
  const auto& num = f.numerators();
  std::vector<Rational> var(f.depth() + 1, Rational(0));
  // Per group at the current level: indices of the min and max entries.
  std::vector<std::size_t> lo(num.size()), hi(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) lo[i] = hi[i] = i;
  for (std::size_t level = f.depth(); level-- > 0;) {
    const std::size_t groups = lo.size() / m;
    std::vector<std::size_t> nlo(groups), nhi(groups);
    Integer widest = 0, diff;
    for (std::size_t g = 0; g < groups; ++g) {
      std::size_t l = lo[g * m], h = hi[g * m];
      for (std::uint32_t a = 1; a < m; ++a) {
        if (num[lo[g * m + a]] < num[l]) l = lo[g * m + a];
        if (num[hi[g * m + a]] > num[h]) h = hi[g * m + a];
      }
      nlo[g] = l;
      nhi[g] = h;
      mpz_sub(diff.get_mpz_t(), num[h].get_mpz_t(), num[l].get_mpz_t());
      if (diff > widest) widest = diff;
    }
    var[level] = Rational(widest, f.denominator());
    var[level].canonicalize();
    lo.swap(nlo);
    hi.swap(nhi);
  }
  return var;
}

inline Rational var_k(const CylinderFunction& f, std::size_t j) {
  if (j >= f.depth()) return Rational(0);
  return variation_profile(f)[j];
}

/// V_n(f) = sum_{j >= n} var_j(f), a finite sum for cylinder functions.
inline Rational tail_sum_V(const CylinderFunction& f, std::size_t n) {
  auto var = variation_profile(f);
  Rational s(0);
  for (std::size_t j = n; j < var.size(); ++j) s += var[j];
  return s;
}

inline Rational sup_norm(const CylinderFunction& f) {
  const Integer* best = nullptr;
  for (const auto& z : f.numerators())
    if (!best || mpz_cmpabs(z.get_mpz_t(), best->get_mpz_t()) > 0) best = &z;
  Rational r(best ? Integer(abs(*best)) : Integer(0), f.denominator());
  r.canonicalize();
  return r;
}

struct NormReport {
  std::vector<Rational> variations;  // var_0 .. var_depth
  std::vector<Rational> tail_sums;   // V_0 .. V_depth
  Rational lip_A;
  Rational sup_norm;
  Rational a_norm;
};

/// Lip_A(f) = max_j var_j / A_j (finitely many nonzero terms) and
/// ||f||_A = Lip_A(f) + ||f||_inf.
inline NormReport a_norm(const CylinderFunction& f, const ASequence& a) {
  NormReport r;
  r.variations = variation_profile(f);
  r.tail_sums.assign(r.variations.size(), Rational(0));
  Rational running(0);
  for (std::size_t j = r.variations.size(); j-- > 0;) {
    running += r.variations[j];
    r.tail_sums[j] = running;
  }
  r.lip_A = 0;
  for (std::size_t j = 0; j < f.depth(); ++j)
    if (r.variations[j] != 0) r.lip_A = std::max(r.lip_A, Rational(r.variations[j] / a(j)));
  r.sup_norm = sup_norm(f);
  r.a_norm = r.lip_A + r.sup_norm;
  return r;
}

/// S_n f(x) = sum_{i<n} f(T^i x).
inline Rational birkhoff_sum(const CylinderFunction& f, const Point& x, Index n) {
  if (!(x.alphabet() == f.alphabet())) throw AlphabetMismatch();
  const std::uint32_t m = f.alphabet().size;
  const std::size_t window = f.size() / (f.depth() ? m : 1);  // m^{depth-1}
  Integer total = 0;
  std::size_t idx = 0;
  for (std::size_t t = 0; t < f.depth(); ++t) idx = idx * m + x[t];
  for (Index i = 0; i < n; ++i) {
    total += f.numerators()[idx];
    if (f.depth()) idx = (idx % window) * m + x[i + f.depth()];
  }
  Rational r(total, f.denominator());
  r.canonicalize();
  return r;
}

/// Sum of f over one period of the periodic point block^inf, as a numerator
/// over f.denominator().
inline Integer cycle_sum_scaled(const CylinderFunction& f, const Word& block) {
  const std::uint32_t m = f.alphabet().size;
  const std::size_t p = block.size();
  Integer total = 0;
  for (std::size_t s = 0; s < p; ++s) {
    std::size_t idx = 0;
    for (std::size_t t = 0; t < f.depth(); ++t) idx = idx * m + block[(s + t) % p];
    total += f.numerators()[idx];
  }
  return total;
}

/// Mean of f over the periodic point block^inf (any rotation gives the same).
inline Rational cycle_mean(const CylinderFunction& f, const Word& block) {
  Rational r(cycle_sum_scaled(f, block), f.denominator() * static_cast<unsigned long>(block.size()));
  r.canonicalize();
  return r;
}

/// f-bar(y) = integral of f against the periodic orbit measure of Y.
inline Rational ergodic_average(const CylinderFunction& f, const PeriodicOrbit& orbit) {
  if (!(orbit.alphabet() == f.alphabet())) throw AlphabetMismatch();
  return cycle_mean(f, orbit.necklace());
}

/// d_A(x,y) = A_{first disagreement}; 0 on equality.
inline Rational d_A(const Point& x, const Point& y, const ASequence& a) {
  auto k = first_disagreement(x, y);
  if (!k) return Rational(0);
  return a(*k);
}

/// Depth-K surrogate for d_A(t, O y): with c the longest common prefix of the
/// word and an orbit point, returns A_{min(c, K)}.
inline Rational d_A_to_orbit_truncated(const Word& w, const PeriodicOrbit& orbit, const ASequence& a) {
  if (w.empty()) throw std::invalid_argument("truncation depth must be >= 1");
  Index best = 0;
  for (const Point& y : orbit.points()) {
    Index c = 0;
    while (c < w.size() && w[c] == y[c]) ++c;
    best = std::max(best, c);
  }
  return a(best);
}

/// Tabulates d_A_to_orbit_truncated over all words of length K.
inline CylinderFunction truncated_orbit_distance(const PeriodicOrbit& orbit, const ASequence& a, std::size_t depth) {
  if (depth < 1) throw std::invalid_argument("truncation depth must be >= 1");
  const std::uint32_t m = orbit.alphabet().size;
  const std::size_t n = checked_pow(m, depth);
  std::vector<unsigned char> best(n, 0);
  for (const Point& y : orbit.points()) {
    std::size_t prefix = 0;
    for (std::size_t c = 1; c <= depth; ++c) {
      prefix = prefix * m + y[c - 1];
      const std::size_t span = checked_pow(m, depth - c);
      for (std::size_t i = prefix * span; i < (prefix + 1) * span; ++i)
        best[i] = std::max<unsigned char>(best[i], static_cast<unsigned char>(c));
    }
  }
  std::vector<Rational> levels(depth + 1);
  Integer den = 1;
  for (std::size_t c = 0; c <= depth; ++c) {
    levels[c] = a(c);
    den = lcm(den, levels[c].get_den());
  }
  std::vector<Integer> level_num(depth + 1);
  for (std::size_t c = 0; c <= depth; ++c) level_num[c] = levels[c].get_num() * Integer(den / levels[c].get_den());
  std::vector<Integer> num(n);
  for (std::size_t i = 0; i < n; ++i) num[i] = level_num[best[i]];
  return CylinderFunction::from_scaled(orbit.alphabet(), depth, std::move(num), den);
}

}  // namespace ergopt
