#pragma once

// Lyndon words (aperiodic necklaces) by Duval's generation order. Every
// periodic orbit of primitive period p has exactly one Lyndon word of length p
// as its least rotation, so this enumerates periodic orbits without repeats.

#include "ergopt/cylinder.hpp"
#include "ergopt/shift.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ergopt {

/// Calls visit(w) for every Lyndon word of length 1..max_len over m symbols,
/// in lexicographic order. Stops early if visit returns false.
inline void for_each_lyndon_word(std::uint32_t m, std::size_t max_len, const std::function<bool(const Word&)>& visit) {
  if (max_len == 0) return;
  Word w{0};
  while (!w.empty()) {
    if (!visit(w)) return;
    const std::size_t n = w.size();
    while (w.size() < max_len) w.push_back(w[w.size() - n]);
    while (!w.empty() && w.back() == m - 1) w.pop_back();
    if (!w.empty()) ++w.back();
  }
}

inline std::vector<Word> lyndon_words(std::uint32_t m, std::size_t max_len) {
  std::vector<Word> out;
  for_each_lyndon_word(m, max_len, [&](const Word& w) {
    out.push_back(w);
    return true;
  });
  return out;
}

inline std::vector<PeriodicOrbit> periodic_orbits_up_to(Alphabet alphabet, std::size_t max_period) {
  std::vector<PeriodicOrbit> out;
  for_each_lyndon_word(alphabet.size, max_period, [&](const Word& w) {
    out.emplace_back(alphabet, w);
    return true;
  });
  return out;
}

struct OracleResult {
  Rational value;
  std::vector<Word> best;  // Lyndon words attaining value
  std::size_t orbits_checked = 0;
};

class OracleGuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive max of the periodic-orbit averages of f over periods <= P.
inline OracleResult oracle_max(const CylinderFunction& f, std::size_t max_period, double guard = 1e7) {
  if (max_period < 1) throw std::invalid_argument("oracle period must be >= 1");
  const double size = std::pow(static_cast<double>(f.alphabet().size), static_cast<double>(max_period));
  if (size > guard)
    throw OracleGuardExceeded("oracle enumeration m^P = " + std::to_string(size) + " exceeds the guard");
  OracleResult r;
  bool first = true;
  for_each_lyndon_word(f.alphabet().size, max_period, [&](const Word& w) {
    ++r.orbits_checked;
    Rational mean = cycle_mean(f, w);
    if (first || mean > r.value) {
      r.value = mean;
      r.best.assign(1, w);
      first = false;
    } else if (mean == r.value) {
      r.best.push_back(w);
    }
    return true;
  });
  return r;
}

/// The same maximum as oracle_max, computed over closed walks instead of
/// words: a periodic point of period L is a closed walk of L edges in the de
/// Bruijn graph of f, so the answer is max over L <= P and nodes v of the best
/// closed walk at v of length L, divided by L. Polynomial in P, no guard.
inline Rational oracle_max_by_walks(const CylinderFunction& f, std::size_t max_period) {
  if (max_period < 1) throw std::invalid_argument("oracle period must be >= 1");
  const CylinderFunction g = f.depth() == 0 ? lift_depth(f, 1) : f;
  const std::uint32_t m = g.alphabet().size;
  const std::size_t edges = g.size(), nodes = edges / m;
  const auto& w = g.numerators();
  std::optional<Rational> best;
  std::vector<Integer> cur(nodes), next(nodes);
  std::vector<char> reach(nodes), next_reach(nodes);
  for (std::size_t v = 0; v < nodes; ++v) {
    std::fill(reach.begin(), reach.end(), 0);
    reach[v] = 1;
    cur[v] = 0;
    for (std::size_t len = 1; len <= max_period; ++len) {
      std::fill(next_reach.begin(), next_reach.end(), 0);
      // Edge e = u*m + a runs from node u to node e mod nodes.
      for (std::size_t u = 0; u < nodes; ++u) {
        if (!reach[u]) continue;
        for (std::uint32_t a = 0; a < m; ++a) {
          const std::size_t e = u * m + a, t = e % nodes;
          Integer c = cur[u] + w[e];
          if (!next_reach[t] || c > next[t]) {
            next[t] = std::move(c);
            next_reach[t] = 1;
          }
        }
      }
      cur.swap(next);
      reach.swap(next_reach);
      if (reach[v]) {
        Rational mean(cur[v], g.denominator() * static_cast<unsigned long>(len));
        mean.canonicalize();
        if (!best || mean > *best) best = mean;
      }
    }
  }
  return *best;
}

}  // namespace ergopt
