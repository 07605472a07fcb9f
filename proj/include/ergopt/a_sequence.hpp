#pragma once

// A-sequences: positive sequences A_n -> 0 that define the ultrametric
// d_A(x,y) = A_{first disagreement} and the norm ||f||_A = Lip_A(f) + ||f||_inf.
//
// Sequences are closed-form kinds so A_n is exact for every n; points can
// first disagree arbitrarily deep.

#include "ergopt/rational.hpp"
#include "ergopt/shift.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergopt {

enum class SuperContinuity { Yes, No, Unknown };

class NotLacunary : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ASequence {
 public:
  enum class Kind { Dyadic, Geometric, TriangularDyadic, CustomTable };

  /// A_n = 2^{-n}.
  static ASequence dyadic() { return ASequence(Kind::Dyadic); }

  /// A_n = a0 * ratio^n.
  static ASequence geometric(Rational a0, Rational ratio) {
    if (a0 <= 0) throw std::invalid_argument("geometric A-sequence needs a0 > 0");
    if (ratio <= 0 || ratio >= 1) throw std::invalid_argument("geometric A-sequence needs 0 < ratio < 1");
    ASequence a(Kind::Geometric);
    a.a0_ = std::move(a0);
    a.ratio_ = std::move(ratio);
    return a;
  }

  /// A_n = 2^{-n(n+1)/2}; the ratio 2^{-(n+1)} tends to zero.
  static ASequence triangular_dyadic() { return ASequence(Kind::TriangularDyadic); }

  /// A_n = values[n] for n < T, then values[T-1] * tail^{n-T+1}.
  /// The finite prefix need not be monotone; lacunarize() repairs it.
  static ASequence custom_table(std::vector<Rational> values, Rational tail_ratio) {
    if (values.empty()) throw std::invalid_argument("custom A-sequence needs at least one value");
    for (const auto& v : values)
      if (v <= 0) throw std::invalid_argument("A-sequence values must be positive");
    if (tail_ratio <= 0 || tail_ratio >= 1)
      throw std::invalid_argument("custom A-sequence tail ratio must lie in (0,1)");
    ASequence a(Kind::CustomTable);
    a.table_ = std::move(values);
    a.ratio_ = std::move(tail_ratio);
    return a;
  }

  Kind kind() const { return kind_; }

  std::string kind_name() const {
    switch (kind_) {
      case Kind::Dyadic: return "dyadic";
      case Kind::Geometric: return "geometric";
      case Kind::TriangularDyadic: return "triangular_dyadic";
      case Kind::CustomTable: return "custom_table";
    }
    return "?";
  }

  const Rational& a0_param() const { return a0_; }
  const Rational& ratio_param() const { return ratio_; }
  const std::vector<Rational>& table() const { return table_; }

  Rational operator()(Index n) const {
    switch (kind_) {
      case Kind::Dyadic: return pow2(-static_cast<std::int64_t>(n));
      case Kind::Geometric: return a0_ * pow(ratio_, n);
      case Kind::TriangularDyadic: return pow2(-static_cast<std::int64_t>(n * (n + 1) / 2));
      case Kind::CustomTable:
        if (n < table_.size()) return table_[n];
        return table_.back() * pow(ratio_, n - table_.size() + 1);
    }
    return Rational(0);
  }

  /// A_{n+1} / A_n.
  Rational ratio_at(Index n) const {
    switch (kind_) {
      case Kind::Dyadic: return Rational(1, 2);
      case Kind::Geometric: return ratio_;
      case Kind::TriangularDyadic: return pow2(-static_cast<std::int64_t>(n + 1));
      case Kind::CustomTable:
        if (n + 1 < table_.size()) return table_[n + 1] / table_[n];
        return ratio_;
    }
    return Rational(0);
  }

  /// limsup of A_{n+1}/A_n, exact per kind.
  Rational limsup_ratio() const {
    switch (kind_) {
      case Kind::Dyadic: return Rational(1, 2);
      case Kind::TriangularDyadic: return Rational(0);
      default: return ratio_;
    }
  }

  /// inf_n (1 - A_{n+1}/A_n) when positive. Ratios are monotone (or constant)
  /// beyond a finite prefix for every kind, so the infimum is a finite scan.
  std::optional<Rational> delta() const {
    Rational worst;
    switch (kind_) {
      case Kind::Dyadic: worst = Rational(1, 2); break;
      case Kind::Geometric: worst = ratio_; break;
      case Kind::TriangularDyadic: worst = Rational(1, 2); break;
      case Kind::CustomTable:
        worst = ratio_;
        for (std::size_t n = 0; n + 1 < table_.size(); ++n) worst = std::max(worst, ratio_at(n));
        break;
    }
    Rational delta = 1 - worst;
    if (delta <= 0) return std::nullopt;
    return delta;
  }

  bool is_lacunary() const { return delta().has_value(); }

  bool is_decreasing() const {
    for (std::size_t n = 0; n + 1 < table_.size(); ++n)
      if (table_[n + 1] >= table_[n]) return false;
    return true;
  }

  /// Whether A_{n+1}/A_n -> 0, decided per closed form. Custom tables only
  /// know their declared tail, which says nothing past the truncation.
  SuperContinuity super_continuity() const {
    switch (kind_) {
      case Kind::TriangularDyadic: return SuperContinuity::Yes;
      case Kind::CustomTable: return SuperContinuity::Unknown;
      default: return SuperContinuity::No;
    }
  }

  bool operator==(const ASequence& o) const {
    return kind_ == o.kind_ && a0_ == o.a0_ && ratio_ == o.ratio_ && table_ == o.table_;
  }

 private:
  explicit ASequence(Kind k) : kind_(k) {}

  Kind kind_;
  Rational a0_{1};
  Rational ratio_{0};
  std::vector<Rational> table_;
};

struct Lacunarization {
  ASequence b;
  Rational m;        // ||f||_A <= m ||f||_B
  Rational m_prime;  // max_n A_n / B_n
};

/// Finite repair of an A-sequence with limsup ratio < 1 into one with every
/// ratio <= 1 - delta. Already-lacunary inputs come back unchanged.
inline Lacunarization lacunarize(const ASequence& a) {
  if (a.is_lacunary()) return {a, Rational(1), Rational(1)};
  if (a.limsup_ratio() >= 1) throw NotLacunary("limsup A_{n+1}/A_n >= 1; no finite repair exists");
  // Only custom tables can fail lacunarity with limsup < 1. Patch terms
  // downward with target ratio c = (1 + tail)/2 until B rejoins A; c > tail
  // guarantees B catches up inside the geometric tail.
  const Rational c = (1 + a.ratio_param()) / 2;
  const std::size_t table_len = a.table().size();
  std::vector<Rational> b{a(0)};
  Rational m_prime(1);
  for (Index n = 1;; ++n) {
    Rational an = a(n);
    Rational bn = std::min<Rational>(an, c * b.back());
    m_prime = std::max(m_prime, Rational(an / bn));
    b.push_back(bn);
    if (n + 1 >= table_len && bn == an) break;
    if (n > table_len + 100000) throw NotLacunary("lacunary repair did not converge");
  }
  Rational m(1);
  for (Index n = 0; n < b.size(); ++n) m = std::max(m, Rational(b[n] / a(n)));
  return {ASequence::custom_table(std::move(b), a.ratio_param()), m, m_prime};
}

/// gamma_A = 2(A_0 + 1 + delta)/delta^2 for lacunary A; otherwise
/// M * M' * gamma_B through lacunarize().
inline Rational gamma_A(const ASequence& a) {
  if (auto delta = a.delta()) {
    Rational dd = *delta;
    return 2 * (a(0) + 1 + dd) / (dd * dd);
  }
  Lacunarization lac = lacunarize(a);
  return lac.m * lac.m_prime * gamma_A(lac.b);
}

}  // namespace ergopt
