#pragma once

// Points, orbits and the dyadic metric on the one-sided full shift.
//
// Only eventually periodic points u.v.v.v... are representable. They are
// closed under the shift, admit exact equality and exact distances, and are
// dense in the full shift.

#include "ergopt/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ergopt {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;
using Index = std::uint64_t;

class AlphabetMismatch : public std::invalid_argument {
 public:
  AlphabetMismatch() : std::invalid_argument("points live on different alphabets") {}
};

struct Alphabet {
  std::uint32_t size = 2;

  Alphabet() = default;
  explicit Alphabet(std::uint32_t m) : size(m) {
    if (m < 2) throw std::invalid_argument("alphabet needs at least two symbols");
  }
  bool contains(Symbol s) const { return s < size; }
  bool operator==(const Alphabet&) const = default;
};

inline std::string word_to_string(const Word& w) {
  const bool wide = std::any_of(w.begin(), w.end(), [](Symbol s) { return s > 9; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i && wide) out += ",";
    out += std::to_string(w[i]);
  }
  return out;
}

namespace detail {

inline void check_symbols(const Alphabet& a, const Word& w) {
  for (Symbol s : w)
    if (!a.contains(s))
      throw std::invalid_argument("symbol " + std::to_string(s) + " outside alphabet of size " +
                                  std::to_string(a.size));
}

/// Shortest d with w == (w[0..d))^(n/d).
inline std::size_t primitive_period(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return d;
  }
  return n;
}

inline Word least_rotation(const Word& w) {
  Word best = w;
  Word cand(w.size());
  for (std::size_t r = 1; r < w.size(); ++r) {
    std::rotate_copy(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(r), w.end(), cand.begin());
    if (cand < best) best = cand;
  }
  return best;
}

}  // namespace detail

class Point {
 public:
  Point(Alphabet alphabet, Word preperiod, Word period)
      : alphabet_(alphabet), preperiod_(std::move(preperiod)), period_(std::move(period)) {
    if (period_.empty()) throw std::invalid_argument("point needs a nonempty period word");
    detail::check_symbols(alphabet_, preperiod_);
    detail::check_symbols(alphabet_, period_);
    canonicalize();
  }

  static Point periodic(Alphabet alphabet, Word period) {
    return Point(alphabet, {}, std::move(period));
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const Word& preperiod() const { return preperiod_; }
  const Word& period() const { return period_; }

  Symbol operator[](Index i) const {
    if (i < preperiod_.size()) return preperiod_[i];
    return period_[(i - preperiod_.size()) % period_.size()];
  }

  Word prefix(std::size_t n) const {
    Word out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (*this)[i];
    return out;
  }

  /// T^n x.
  Point shifted(Index n = 1) const {
    if (n <= preperiod_.size())
      return Point(alphabet_, Word(preperiod_.begin() + static_cast<std::ptrdiff_t>(n), preperiod_.end()),
                   period_);
    const Index r = (n - preperiod_.size()) % period_.size();
    Word rotated(period_.size());
    std::rotate_copy(period_.begin(), period_.begin() + static_cast<std::ptrdiff_t>(r), period_.end(),
                     rotated.begin());
    return Point(alphabet_, {}, std::move(rotated));
  }

  /// The preimage a.x.
  Point prepended(Symbol a) const {
    Word u;
    u.reserve(preperiod_.size() + 1);
    u.push_back(a);
    u.insert(u.end(), preperiod_.begin(), preperiod_.end());
    return Point(alphabet_, std::move(u), period_);
  }

  bool operator==(const Point&) const = default;

  std::string to_string() const {
    std::string s = word_to_string(preperiod_);
    if (!s.empty()) s += ".";
    return s + "(" + word_to_string(period_) + ")^inf";
  }

 private:
  void canonicalize() {
    period_.resize(detail::primitive_period(period_));
    while (!preperiod_.empty() && preperiod_.back() == period_.back()) {
      preperiod_.pop_back();
      std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
    }
  }

  Alphabet alphabet_;
  Word preperiod_;
  Word period_;
};

inline Point shift(const Point& x) { return x.shifted(1); }

/// Smallest index where x and y differ; nullopt encodes "never" (x == y).
inline std::optional<Index> first_disagreement(const Point& x, const Point& y) {
  if (!(x.alphabet() == y.alphabet())) throw AlphabetMismatch();
  const Index bound = x.preperiod().size() + y.preperiod().size() +
                      std::lcm<Index, Index>(x.period().size(), y.period().size());
  for (Index i = 0; i < bound; ++i)
    if (x[i] != y[i]) return i;
  return std::nullopt;
}

/// Length of the longest common prefix, capped at `cap`.
inline Index common_prefix(const Point& x, const Point& y, Index cap) {
  auto k = first_disagreement(x, y);
  return k ? std::min(*k, cap) : cap;
}

/// d(x,y) = 2^{-k}, k the first disagreement; 0 when x == y.
inline Rational d(const Point& x, const Point& y) {
  auto k = first_disagreement(x, y);
  if (!k) return Rational(0);
  return pow2(-static_cast<std::int64_t>(*k));
}

struct OrbitSegment {
  Point base;
  Index start = 0;
  Index length = 1;

  OrbitSegment(Point b, Index s, Index n) : base(std::move(b)), start(s), length(n) {
    if (n < 1) throw std::invalid_argument("orbit segment needs length >= 1");
  }

  Point at(Index t) const { return base.shifted(start + t); }
};

/// The orbit of a periodic point, stored as its necklace (least rotation of the
/// primitive period word). points()[i] is T^i of necklace^inf.
class PeriodicOrbit {
 public:
  PeriodicOrbit(Alphabet alphabet, const Word& block) : alphabet_(alphabet) {
    if (block.empty()) throw std::invalid_argument("periodic orbit needs a nonempty block");
    detail::check_symbols(alphabet, block);
    Word root(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(detail::primitive_period(block)));
    necklace_ = detail::least_rotation(root);
    for (std::size_t i = 0; i < necklace_.size(); ++i) {
      Word rot(necklace_.size());
      std::rotate_copy(necklace_.begin(), necklace_.begin() + static_cast<std::ptrdiff_t>(i), necklace_.end(),
                       rot.begin());
      points_.push_back(Point::periodic(alphabet, std::move(rot)));
    }
  }

  /// The periodic orbit that x eventually enters.
  static PeriodicOrbit limit_of(const Point& x) { return PeriodicOrbit(x.alphabet(), x.period()); }

  const Alphabet& alphabet() const { return alphabet_; }
  const Word& necklace() const { return necklace_; }
  std::size_t period() const { return necklace_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& point(std::size_t i) const { return points_[i % points_.size()]; }

  std::optional<std::size_t> index_of(const Point& x) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (points_[i] == x) return i;
    return std::nullopt;
  }
  bool contains(const Point& x) const { return index_of(x).has_value(); }

  /// min over distinct orbit points of d; 1 for a fixed point (no pairs).
  Rational min_separation() const {
    const std::size_t p = period();
    if (p == 1) return Rational(1);
    Index longest = 0;
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = a + 1; b < p; ++b)
        longest = std::max(longest, *first_disagreement(points_[a], points_[b]));
    return pow2(-static_cast<std::int64_t>(longest));
  }

  bool operator==(const PeriodicOrbit& o) const {
    return alphabet_ == o.alphabet_ && necklace_ == o.necklace_;
  }

  std::string to_string() const { return "(" + word_to_string(necklace_) + ")"; }

 private:
  Alphabet alphabet_;
  Word necklace_;
  std::vector<Point> points_;
};

inline Rational distance_to_orbit(const Point& x, const PeriodicOrbit& orbit) {
  Rational best(1);
  for (const Point& y : orbit.points()) best = std::min(best, d(x, y));
  return best;
}

/// Index of the unique closest orbit point, or nullopt on a tie.
inline std::optional<std::size_t> closest_in_orbit(const Point& x, const PeriodicOrbit& orbit) {
  std::optional<std::size_t> best;
  Rational best_d(2);
  bool tie = false;
  for (std::size_t i = 0; i < orbit.period(); ++i) {
    Rational di = d(x, orbit.point(i));
    if (di < best_d) {
      best_d = di;
      best = i;
      tie = false;
    } else if (di == best_d) {
      tie = true;
    }
  }
  return tie ? std::nullopt : best;
}

/// x eps-shadows the segment: d(T^i x, T^{start+i} base) <= eps for i < length.
inline bool shadows(const Point& x, const OrbitSegment& seg, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("shadowing tolerance must be positive");
  Point xi = x;
  Point yi = seg.at(0);
  for (Index i = 0; i < seg.length; ++i) {
    if (d(xi, yi) > eps) return false;
    xi = shift(xi);
    yi = shift(yi);
  }
  return true;
}

/// d(T^i x, Y) <= eps for 0 <= i < steps.
inline bool stays_close(const Point& x, const PeriodicOrbit& orbit, const Rational& eps, Index steps) {
  if (eps <= 0) throw std::invalid_argument("closeness tolerance must be positive");
  if (steps < 1) throw std::invalid_argument("need at least one step");
  Point xi = x;
  for (Index i = 0; i < steps; ++i) {
    if (distance_to_orbit(xi, orbit) > eps) return false;
    xi = shift(xi);
  }
  return true;
}

namespace detail {

/// Index (into pts) of the unique closest point to x, nullopt on a tie.
inline std::optional<std::size_t> unique_closest(const Point& x, const std::vector<Point>& pts) {
  std::optional<std::size_t> best;
  Rational best_d(2);
  bool tie = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Rational di = d(x, pts[i]);
    if (di < best_d) {
      best_d = di;
      best = i;
      tie = false;
    } else if (di == best_d) {
      tie = true;
    }
  }
  return tie ? std::nullopt : best;
}

}  // namespace detail

/// x follows S in order for `steps` steps: each T^s x has a unique closest
/// point y' in S (as a set), T y' lies in S, and T y' is the unique closest
/// point to T^{s+1} x. Ties report false.
inline bool follows_in_order(const Point& x, const OrbitSegment& seg, Index steps) {
  if (steps < 1) throw std::invalid_argument("need at least one step");
  std::vector<Point> pts;
  for (Index t = 0; t < seg.length; ++t) {
    Point p = seg.at(t);
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(std::move(p));
  }
  Point xs = x;
  for (Index s = 0; s < steps; ++s) {
    auto here = detail::unique_closest(xs, pts);
    if (!here) return false;
    Point image = shift(pts[*here]);
    auto it = std::find(pts.begin(), pts.end(), image);
    if (it == pts.end()) return false;
    Point next = shift(xs);
    auto there = detail::unique_closest(next, pts);
    if (!there || *there != static_cast<std::size_t>(it - pts.begin())) return false;
    xs = std::move(next);
  }
  return true;
}

inline bool follows_in_order(const Point& x, const PeriodicOrbit& orbit, Index steps) {
  return follows_in_order(x, OrbitSegment(orbit.point(0), 0, orbit.period()), steps);
}

struct Recurrence {
  Index i = 0;
  Index j = 0;
  bool operator==(const Recurrence&) const = default;
};

/// First pair i < j <= horizon whose length-k blocks coincide, i.e.
/// d(T^i x, T^j x) <= 2^{-k}. Taking the smallest such j makes the pair
/// minimal (no matching pair strictly inside); ties go to the smallest i.
inline Recurrence minimal_recurrence(const Point& x, std::size_t k, Index horizon) {
  if (k < 1) throw std::invalid_argument("recurrence depth must be >= 1");
  std::map<Word, Index> first_seen;
  for (Index j = 0; j <= horizon; ++j) {
    Word block(k);
    for (std::size_t t = 0; t < k; ++t) block[t] = x[j + t];
    auto [it, inserted] = first_seen.emplace(std::move(block), j);
    if (!inserted) return {it->second, j};
  }
  throw std::runtime_error("no recurrence of depth " + std::to_string(k) + " within horizon " +
                           std::to_string(horizon));
}

/// The period-(j-i) point y with y_n = x_{i + ((n - i) mod p)}, i.e.
/// (y)_i^{j-1} = (x)_i^{j-1}.
inline Point recurrence_point(const Point& x, Index i, Index j) {
  if (i >= j) throw std::invalid_argument("recurrence needs i < j");
  const Index p = j - i;
  Word period(p);
  for (Index n = 0; n < p; ++n) period[n] = x[i + ((n + p - (i % p)) % p)];
  return Point::periodic(x.alphabet(), std::move(period));
}

inline PeriodicOrbit periodic_point_from_recurrence(const Point& x, Index i, Index j) {
  if (i >= j) throw std::invalid_argument("recurrence needs i < j");
  Word block(j - i);
  for (Index n = i; n < j; ++n) block[n - i] = x[n];
  return PeriodicOrbit(x.alphabet(), block);
}

}  // namespace ergopt
