#pragma once

// Maximum cycle mean on the de Bruijn graph, exactly.
//
// Karp's recurrence is used on small graphs. Large graphs (lock-in runs at
// depth ~21) go through Howard policy iteration: every node picks one in-edge,
// the chosen edges form a functional graph whose cycles give candidate means,
// and values are kept as integers over a per-class denominator so no rational
// normalisation happens in the inner loops.

#include "ergopt/debruijn.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ergopt {

/// beta = max cycle mean, as a rational in function units.
/// Edges with removed[e] set are skipped (removed may be empty).
inline Rational karp_max_mean(const DeBruijnGraph& g, const std::vector<char>& removed = {}) {
  const std::size_t n = g.node_count;
  auto allowed = [&](std::size_t e) { return removed.empty() || !removed[e]; };
  // D[t][v]: best weight of a walk of exactly t edges ending at v, starting anywhere.
  std::vector<std::vector<Integer>> dist(n + 1, std::vector<Integer>(n));
  std::vector<std::vector<char>> finite(n + 1, std::vector<char>(n, 0));
  std::fill(finite[0].begin(), finite[0].end(), 1);
  for (std::size_t t = 1; t <= n; ++t) {
    for (std::size_t v = 0; v < n; ++v) {
      for (std::uint32_t a = 0; a < g.m; ++a) {
        const std::size_t e = g.in_edge(v, a);
        const std::size_t u = g.src(e);
        if (!allowed(e) || !finite[t - 1][u]) continue;
        Integer cand = dist[t - 1][u] + g.weight[e];
        if (!finite[t][v] || cand > dist[t][v]) {
          dist[t][v] = std::move(cand);
          finite[t][v] = 1;
        }
      }
    }
  }
  std::optional<Rational> best;
  for (std::size_t v = 0; v < n; ++v) {
    if (!finite[n][v]) continue;
    std::optional<Rational> worst;
    for (std::size_t t = 0; t < n; ++t) {
      if (!finite[t][v]) continue;
      Rational q(dist[n][v] - dist[t][v], static_cast<unsigned long>(n - t));
      q.canonicalize();
      if (!worst || q < *worst) worst = q;
    }
    if (worst && (!best || *worst > *best)) best = worst;
  }
  if (!best) throw std::invalid_argument("graph has no cycle");
  Rational beta = *best / g.denominator;
  return beta;
}

struct HowardResult {
  // Cycle mean lambda = lambda_num / (denominator * lambda_den) per class;
  // the fields below describe the best class.
  Integer lambda_num;
  Integer lambda_den = 1;
  std::vector<Integer> values;         // value(v) = values[v] / (denominator * class_den(v))
  std::vector<std::uint8_t> policy;    // chosen in-edge symbol per node
  std::vector<std::uint32_t> node_class;
  std::vector<Integer> class_num, class_den;
  bool single_lambda = true;  // every node sits in a class of mean lambda
  std::size_t iterations = 0;

  Rational lambda(const Integer& denominator) const {
    Rational r(lambda_num, denominator * lambda_den);
    r.canonicalize();
    return r;
  }
};

struct HowardOptions {
  const std::vector<std::uint8_t>* warm_policy = nullptr;
  const std::vector<char>* removed = nullptr;
  std::size_t max_iterations = 100000;
};

/// Policy iteration reusing the buffers of r (values keep their limb storage
/// between calls, which dominates the cost on large graphs).
inline void howard_solve(const DeBruijnGraph& g, const HowardOptions& opt, HowardResult& r) {
  const std::size_t n = g.node_count;
  if (n > std::numeric_limits<std::uint32_t>::max()) throw std::overflow_error("graph too large");
  const bool masked = opt.removed && !opt.removed->empty();
  auto allowed = [&](std::size_t e) { return !masked || !(*opt.removed)[e]; };

  r.iterations = 0;
  r.single_lambda = true;
  r.class_num.clear();
  r.class_den.clear();
  if (opt.warm_policy && opt.warm_policy->size() == n)
    r.policy = *opt.warm_policy;
  else
    r.policy.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    bool fresh = !(opt.warm_policy && opt.warm_policy->size() == n);
    if (!fresh && allowed(g.in_edge(v, r.policy[v]))) continue;
    std::optional<std::uint32_t> pick;
    for (std::uint32_t a = 0; a < g.m; ++a) {
      const std::size_t e = g.in_edge(v, a);
      if (!allowed(e)) continue;
      if (!pick || g.weight[e] > g.weight[g.in_edge(v, *pick)]) pick = a;
    }
    if (!pick) throw std::invalid_argument("node without an admissible in-edge");
    r.policy[v] = static_cast<std::uint8_t>(*pick);
  }

  std::vector<Integer>& value = r.values;
  if (value.size() != n) value.assign(n, Integer(0));
  std::vector<std::uint32_t>& cls = r.node_class;
  cls.assign(n, 0);
  std::vector<Integer> old_num, old_den;
  std::vector<std::uint32_t> old_cls;
  std::vector<std::uint8_t> state(n);
  std::vector<std::uint32_t> path;
  std::vector<std::uint32_t> rank;
  Integer tmp, best, cur;

  auto pred = [&](std::size_t v) { return g.src(g.in_edge(v, r.policy[v])); };

  for (std::size_t iter = 0;; ++iter) {
    if (iter >= opt.max_iterations) throw std::runtime_error("policy iteration did not converge");
    r.iterations = iter + 1;

    // Policy evaluation.
    old_num.swap(r.class_num);
    old_den.swap(r.class_den);
    old_cls.swap(cls);
    cls.assign(n, 0);
    r.class_num.clear();
    r.class_den.clear();
    std::fill(state.begin(), state.end(), 0);  // 0 new, 1 on path, 2 done
    for (std::size_t s = 0; s < n; ++s) {
      if (state[s]) continue;
      path.clear();
      std::size_t v = s;
      while (state[v] == 0) {
        state[v] = 1;
        path.push_back(static_cast<std::uint32_t>(v));
        v = pred(v);
      }
      std::size_t tail_end = path.size();  // path[0..tail_end) still needs values
      if (state[v] == 1) {
        // New cycle: path from v to the end of path.
        const std::size_t start = static_cast<std::size_t>(std::find(path.begin(), path.end(), v) - path.begin());
        Integer w = 0;
        std::size_t root = v;
        for (std::size_t t = start; t < path.size(); ++t) {
          w += g.weight[g.in_edge(path[t], r.policy[path[t]])];
          root = std::min<std::size_t>(root, path[t]);
        }
        Integer len = static_cast<unsigned long>(path.size() - start);
        Integer gg = gcd(w, len);
        Integer lam_num = w / gg, lam_den = len / gg;
        const std::uint32_t c = static_cast<std::uint32_t>(r.class_num.size());
        r.class_num.push_back(lam_num);
        r.class_den.push_back(lam_den);
        const bool keep_root = iter > 0 && old_num[old_cls[root]] == lam_num && old_den[old_cls[root]] == lam_den;
        if (!keep_root) value[root] = 0;
        // Order the cycle so that cycle[0] = root and cycle[i+1] = pred(cycle[i]).
        std::vector<std::uint32_t> cyc;
        std::size_t x = root;
        do {
          cyc.push_back(static_cast<std::uint32_t>(x));
          x = pred(x);
        } while (x != root);
        for (std::size_t i = cyc.size(); i-- > 1;) {
          const std::size_t u = cyc[i];
          const std::size_t p = (i + 1 < cyc.size()) ? cyc[i + 1] : root;
          Integer& h = value[u];
          h = g.weight[g.in_edge(u, r.policy[u])];
          if (lam_den != 1) h *= lam_den;
          h -= lam_num;
          h += value[p];
        }
        for (std::uint32_t u : cyc) {
          cls[u] = c;
          state[u] = 2;
        }
        tail_end = start;
      }
      // Tree part: path[t] hangs off path[t+1] (or off v at the end).
      for (std::size_t t = tail_end; t-- > 0;) {
        const std::size_t u = path[t];
        const std::size_t p = pred(u);
        const std::uint32_t c = cls[p];
        Integer& h = value[u];
        h = g.weight[g.in_edge(u, r.policy[u])];
        if (r.class_den[c] != 1) h *= r.class_den[c];
        h -= r.class_num[c];
        h += value[p];
        cls[u] = c;
        state[u] = 2;
      }
    }

    // Rank classes by mean.
    const std::size_t classes = r.class_num.size();
    std::vector<std::uint32_t> order(classes);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::uint32_t a, std::uint32_t b) {
      return r.class_num[a] * r.class_den[b] < r.class_num[b] * r.class_den[a];
    };
    std::sort(order.begin(), order.end(), less);
    rank.assign(classes, 0);
    for (std::size_t i = 1; i < classes; ++i)
      rank[order[i]] = rank[order[i - 1]] + (less(order[i - 1], order[i]) ? 1 : 0);

    // Phase 1: move to predecessors of strictly better mean.
    bool changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      std::uint32_t best_rank = rank[cls[v]];
      std::optional<std::uint32_t> pick;
      for (std::uint32_t a = 0; a < g.m; ++a) {
        const std::size_t e = g.in_edge(v, a);
        if (!allowed(e)) continue;
        const std::uint32_t rc = rank[cls[g.src(e)]];
        if (rc > best_rank) {
          best_rank = rc;
          pick = a;
        }
      }
      if (!pick) continue;
      // Among predecessors of that rank take the best value.
      std::optional<std::uint32_t> choice;
      for (std::uint32_t a = 0; a < g.m; ++a) {
        const std::size_t e = g.in_edge(v, a);
        const std::size_t u = g.src(e);
        if (!allowed(e) || rank[cls[u]] != best_rank) continue;
        tmp = g.weight[e] * r.class_den[cls[u]];
        tmp += value[u];
        if (!choice || tmp > best) {
          best = tmp;
          choice = a;
        }
      }
      r.policy[v] = static_cast<std::uint8_t>(*choice);
      changed = true;
    }
    if (changed) continue;

    // Phase 2: strict value improvement among equal-mean predecessors.
    for (std::size_t v = 0; v < n; ++v) {
      const std::uint32_t c = cls[v];
      const Integer& den = r.class_den[c];
      const std::size_t cur_e = g.in_edge(v, r.policy[v]);
      cur = g.weight[cur_e];
      if (den != 1) cur *= den;
      cur += value[g.src(cur_e)];
      for (std::uint32_t a = 0; a < g.m; ++a) {
        if (a == r.policy[v]) continue;
        const std::size_t e = g.in_edge(v, a);
        const std::size_t u = g.src(e);
        if (!allowed(e) || rank[cls[u]] != rank[c]) continue;
        tmp = g.weight[e];
        if (den != 1) tmp *= den;
        tmp += value[u];
        if (tmp > cur) {
          cur = tmp;
          r.policy[v] = static_cast<std::uint8_t>(a);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  std::uint32_t top = 0;
  for (std::uint32_t c = 1; c < r.class_num.size(); ++c)
    if (r.class_num[c] * r.class_den[top] > r.class_num[top] * r.class_den[c]) top = c;
  r.lambda_num = r.class_num[top];
  r.lambda_den = r.class_den[top];
  for (std::uint32_t c = 0; c < r.class_num.size(); ++c)
    if (r.class_num[c] != r.lambda_num || r.class_den[c] != r.lambda_den) r.single_lambda = false;
}

inline HowardResult howard_max_mean(const DeBruijnGraph& g, const HowardOptions& opt = {}) {
  HowardResult r;
  howard_solve(g, opt, r);
  return r;
}

}  // namespace ergopt
