#pragma once

// Bousch's operator, its fixed point, and the normal form f_hat <= 0.

#include "ergopt/a_sequence.hpp"
#include "ergopt/cylinder.hpp"
#include "ergopt/debruijn.hpp"
#include "ergopt/howard.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ergopt {

class CertificateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (Phi_f g)(w) = max_a [ f(aw) + g((aw)_0^{k-2}) ] for every word w of length k-1.
inline CylinderFunction apply_phi(const CylinderFunction& f, const CylinderFunction& g) {
  if (!(f.alphabet() == g.alphabet())) throw AlphabetMismatch();
  if (f.depth() < 1) throw std::invalid_argument("Phi needs f of depth >= 1");
  if (g.depth() > f.depth() - 1) throw std::invalid_argument("g must have depth <= depth(f) - 1");
  const CylinderFunction gl = lift_depth(g, f.depth() - 1);
  const DeBruijnGraph gr = build_graph(f);
  const Integer den = lcm(f.denominator(), gl.denominator());
  const Integer cf = den / f.denominator(), cg = den / gl.denominator();
  std::vector<Integer> out(gr.node_count);
  Integer cand;
  for (std::size_t v = 0; v < gr.node_count; ++v) {
    for (std::uint32_t a = 0; a < gr.m; ++a) {
      const std::size_t e = gr.in_edge(v, a);
      cand = f.numerators()[e] * cf;
      mpz_addmul(cand.get_mpz_t(), gl.numerators()[gr.src(e)].get_mpz_t(), cg.get_mpz_t());
      if (a == 0 || cand > out[v]) out[v] = cand;
    }
  }
  auto r = CylinderFunction::from_scaled(f.alphabet(), f.depth() - 1, std::move(out), den);
  r.normalize();
  return r;
}

enum class SolveMethod { Auto, Kleene, Howard };

struct SolveOptions {
  SolveMethod method = SolveMethod::Auto;
  std::size_t kleene_node_limit = 512;
  const std::vector<std::uint8_t>* warm_policy = nullptr;
};

/// Norm certificates of a normal form with respect to an A-sequence.
struct NormBounds {
  Rational gamma;
  Rational f_norm;
  Rational f_hat_norm;
  bool norm_bound = false;  // ||f_hat||_A <= gamma ||f||_A
  std::vector<Rational> tail_sums;   // V_n(f_hat), n = 0..depth
  std::vector<Rational> tail_rhs;    // gamma ||f||_A A_n
  bool tail_bound = false;
  Rational lip_h;
  Rational lip_f_over_delta;
  bool lip_bound = false;  // Lip_A(h) <= Lip_A(f) / delta
};

struct NormalForm {
  Rational beta;
  CylinderFunction h;      // depth k-1, Phi_{f-beta} h = h
  CylinderFunction f_hat;  // depth k, f - beta + h - h o T <= 0
  std::vector<std::uint8_t> policy;  // optimal in-edge per node (Howard only)
  SolveMethod method = SolveMethod::Kleene;
  bool fixed_point = false;
  bool nonpositive = false;
  std::optional<NormBounds> bounds;
};

namespace detail {

// Solution in scaled integers: beta = p / (D q), h(v) = H[v] / (D q).
struct ScaledSolution {
  Integer p, q;
  std::vector<Integer> H;
  std::vector<std::uint8_t> policy;
};

inline ScaledSolution solve_kleene(const DeBruijnGraph& g) {
  const std::size_t n = g.node_count;
  const Rational beta_scaled = karp_max_mean(g) * g.denominator;
  ScaledSolution s;
  s.p = beta_scaled.get_num();
  s.q = beta_scaled.get_den();
  std::vector<Integer> red(g.edge_count);
  for (std::size_t e = 0; e < g.edge_count; ++e) red[e] = g.weight[e] * s.q - s.p;

  // Potential: longest reduced walk ending at v (no positive cycles remain).
  std::vector<Integer> phi(n, Integer(0));
  for (std::size_t round = 0;; ++round) {
    if (round > n + 1) throw CertificateFailure("positive cycle after subtracting beta");
    bool changed = false;
    for (std::size_t e = 0; e < g.edge_count; ++e) {
      Integer cand = phi[g.src(e)] + red[e];
      if (cand > phi[g.dst(e)]) {
        phi[g.dst(e)] = std::move(cand);
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<char> zero(g.edge_count, 0);
  for (std::size_t e = 0; e < g.edge_count; ++e) zero[e] = (red[e] + phi[g.src(e)] - phi[g.dst(e)] == 0);
  const SccResult scc = strongly_connected(g, zero);

  // Max over critical columns of the Kleene star: longest reduced path from any critical node.
  std::vector<char> known(n, 0);
  s.H.assign(n, Integer(0));
  for (std::size_t v = 0; v < n; ++v)
    if (scc.cyclic[scc.component[v]]) known[v] = 1;
  for (std::size_t round = 0;; ++round) {
    if (round > n + 1) throw CertificateFailure("Kleene star did not stabilise");
    bool changed = false;
    for (std::size_t e = 0; e < g.edge_count; ++e) {
      const std::size_t u = g.src(e), v = g.dst(e);
      if (!known[u]) continue;
      Integer cand = s.H[u] + red[e];
      if (!known[v] || cand > s.H[v]) {
        s.H[v] = std::move(cand);
        known[v] = 1;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return s;
}

inline ScaledSolution solve_howard(const DeBruijnGraph& g, const std::vector<std::uint8_t>* warm) {
  HowardOptions opt;
  opt.warm_policy = warm;
  HowardResult hr = howard_max_mean(g, opt);
  if (!hr.single_lambda) throw CertificateFailure("policy iteration ended with several cycle means");
  ScaledSolution s;
  s.p = hr.lambda_num;
  s.q = hr.lambda_den;
  s.H = std::move(hr.values);
  s.policy = std::move(hr.policy);
  return s;
}

}  // namespace detail

/// beta, the sub-action h and f_hat = f - beta + h - h o T, with the fixed-point
/// equation and f_hat <= 0 verified exactly (failure throws).
inline NormalForm solve_normal_form(const CylinderFunction& f, const SolveOptions& opt = {}) {
  if (f.depth() == 0) return solve_normal_form(lift_depth(f, 1), opt);
  const DeBruijnGraph g = build_graph(f);
  SolveMethod method = opt.method;
  if (method == SolveMethod::Auto)
    method = g.node_count <= opt.kleene_node_limit ? SolveMethod::Kleene : SolveMethod::Howard;
  detail::ScaledSolution s =
      method == SolveMethod::Kleene ? detail::solve_kleene(g) : detail::solve_howard(g, opt.warm_policy);

  const std::size_t n = g.node_count;
  // Fixed point: max over in-edges of w q - p + H(src) equals H(v), and
  // f_hat(e) = w q - p + H(src) - H(dst) <= 0.
  std::vector<Integer> fhat(g.edge_count);
  bool fixed = true, nonpos = true;
  for (std::size_t v = 0; v < n; ++v) {
    bool attained = false;
    for (std::uint32_t a = 0; a < g.m; ++a) {
      const std::size_t e = g.in_edge(v, a);
      Integer& x = fhat[e];
      x = g.weight[e];
      if (s.q != 1) x *= s.q;
      x -= s.p;
      x += s.H[g.src(e)];
      x -= s.H[v];
      if (x > 0) nonpos = false;
      if (x == 0) attained = true;
    }
    if (!attained) fixed = false;
  }
  if (!fixed || !nonpos) throw CertificateFailure("fixed-point certificate failed");

  const Integer den = g.denominator * s.q;
  NormalForm nf{Rational(s.p, den),
                CylinderFunction::from_scaled(f.alphabet(), f.depth() - 1, std::move(s.H), den),
                CylinderFunction::from_scaled(f.alphabet(), f.depth(), std::move(fhat), den),
                std::move(s.policy),
                method,
                fixed,
                nonpos,
                std::nullopt};
  nf.beta.canonicalize();
  if (nf.f_hat.size() <= 4096) {
    nf.h.normalize();
    nf.f_hat.normalize();
  }
  return nf;
}

inline NormBounds norm_bounds(const CylinderFunction& f, const NormalForm& nf, const ASequence& a) {
  NormBounds b;
  b.gamma = gamma_A(a);
  const NormReport fr = a_norm(f, a);
  const NormReport hr = a_norm(nf.f_hat, a);
  b.f_norm = fr.a_norm;
  b.f_hat_norm = hr.a_norm;
  b.norm_bound = b.f_hat_norm <= b.gamma * b.f_norm;
  b.tail_sums = hr.tail_sums;
  b.tail_bound = true;
  for (std::size_t j = 0; j < b.tail_sums.size(); ++j) {
    b.tail_rhs.push_back(b.gamma * b.f_norm * a(j));
    if (b.tail_sums[j] > b.tail_rhs.back()) b.tail_bound = false;
  }
  b.lip_h = a_norm(nf.h, a).lip_A;
  // Lacunarised sequences keep the bound up to the equivalence constants; use
  // delta of the sequence actually lacunary.
  auto delta = a.delta();
  if (delta) {
    b.lip_f_over_delta = fr.lip_A / *delta;
    b.lip_bound = b.lip_h <= b.lip_f_over_delta;
  } else {
    Lacunarization lac = lacunarize(a);
    b.lip_f_over_delta = lac.m * lac.m_prime * fr.lip_A / *lac.b.delta();
    b.lip_bound = b.lip_h <= b.lip_f_over_delta;
  }
  return b;
}

/// Normal form with its norm certificates for the given A-sequence.
inline NormalForm normal_form(const CylinderFunction& f, const ASequence& a, const SolveOptions& opt = {}) {
  NormalForm nf = solve_normal_form(f, opt);
  nf.bounds = norm_bounds(f, nf, a);
  return nf;
}

/// The sub-action alone: h with Phi_f h = h + beta.
struct SubAction {
  CylinderFunction h;
  Rational beta;
};

inline SubAction sub_action(const CylinderFunction& f, const SolveOptions& opt = {}) {
  NormalForm nf = solve_normal_form(f, opt);
  return {std::move(nf.h), std::move(nf.beta)};
}

struct MaximizingSupport {
  std::vector<PeriodicOrbit> orbits;  // simple cycles of the critical graph, sorted by necklace
  bool unique = false;
  bool complete = true;  // false when enumeration was capped
  std::size_t cyclic_nodes = 0;
  std::size_t cyclic_edges = 0;
};

struct SupportOptions {
  std::size_t max_cycles = 10000;
  std::size_t enumeration_node_limit = 4096;
};

/// Cyclic part of the zero subgraph {e : f_hat(e) = 0} and its simple cycles.
inline MaximizingSupport critical_support(const DeBruijnGraph& g, const std::vector<char>& zero, Alphabet alphabet,
                                          const SupportOptions& opt = {}) {
  const SccResult scc = strongly_connected(g, zero);
  std::vector<char> cyc(g.edge_count, 0);
  std::vector<std::size_t> comp_nodes(scc.count, 0), comp_edges(scc.count, 0);
  MaximizingSupport ms;
  for (std::size_t v = 0; v < g.node_count; ++v)
    if (scc.cyclic[scc.component[v]]) {
      ++comp_nodes[scc.component[v]];
      ++ms.cyclic_nodes;
    }
  for (std::size_t e = 0; e < g.edge_count; ++e)
    if (zero[e] && scc.component[g.src(e)] == scc.component[g.dst(e)] && scc.cyclic[scc.component[g.src(e)]]) {
      cyc[e] = 1;
      ++comp_edges[scc.component[g.src(e)]];
      ++ms.cyclic_edges;
    }
  std::size_t cyclic_components = 0;
  bool all_simple = true;
  for (std::size_t c = 0; c < scc.count; ++c)
    if (scc.cyclic[c]) {
      ++cyclic_components;
      if (comp_edges[c] != comp_nodes[c]) all_simple = false;
    }
  ms.unique = cyclic_components == 1 && all_simple;

  if (all_simple || g.node_count > opt.enumeration_node_limit) {
    // Walk each component from its least node along the smallest cyclic edge;
    // for simple components that traces the whole cycle.
    std::vector<char> seen(scc.count, 0);
    for (std::size_t v = 0; v < g.node_count; ++v) {
      const std::uint32_t c = scc.component[v];
      if (!scc.cyclic[c] || seen[c]) continue;
      seen[c] = 1;
      std::vector<std::size_t> edges;
      std::size_t x = v;
      do {
        std::size_t next = SIZE_MAX;
        for (std::uint32_t a = 0; a < g.m && next == SIZE_MAX; ++a)
          if (cyc[g.out_edge(x, a)]) next = g.out_edge(x, a);
        edges.push_back(next);
        x = g.dst(next);
        if (edges.size() > comp_nodes[c]) break;
      } while (x != v);
      if (x != v) {
        // Non-simple component: keep the first closed loop encountered.
        std::vector<std::size_t> nodes{v};
        for (std::size_t e : edges) nodes.push_back(g.dst(e));
        for (std::size_t i = 0; i < nodes.size(); ++i) {
          auto it = std::find(nodes.begin() + static_cast<std::ptrdiff_t>(i) + 1, nodes.end(), nodes[i]);
          if (it != nodes.end()) {
            const std::size_t j = static_cast<std::size_t>(it - nodes.begin());
            edges = std::vector<std::size_t>(edges.begin() + static_cast<std::ptrdiff_t>(i),
                                             edges.begin() + static_cast<std::ptrdiff_t>(j));
            break;
          }
        }
      }
      ms.orbits.emplace_back(alphabet, cycle_block(g, edges));
      if (!all_simple) ms.complete = false;
    }
  } else {
    ms.complete = enumerate_simple_cycles(g, cyc, opt.max_cycles, [&](const std::vector<std::size_t>& edges) {
      ms.orbits.emplace_back(alphabet, cycle_block(g, edges));
    });
  }
  std::sort(ms.orbits.begin(), ms.orbits.end(),
            [](const PeriodicOrbit& a, const PeriodicOrbit& b) { return a.necklace() < b.necklace(); });
  ms.orbits.erase(std::unique(ms.orbits.begin(), ms.orbits.end()), ms.orbits.end());
  return ms;
}

inline MaximizingSupport maximizing_support(const NormalForm& nf, const SupportOptions& opt = {}) {
  const DeBruijnGraph g = build_graph(nf.f_hat);
  std::vector<char> zero(g.edge_count, 0);
  for (std::size_t e = 0; e < g.edge_count; ++e) zero[e] = nf.f_hat.numerators()[e] == 0;
  return critical_support(g, zero, nf.f_hat.alphabet(), opt);
}

struct MaxMeanResult {
  Rational beta;
  std::vector<PeriodicOrbit> critical_cycles;
  bool unique = false;
  bool complete = true;
};

inline MaxMeanResult max_mean_cycle(const CylinderFunction& f, const SolveOptions& opt = {}) {
  NormalForm nf = solve_normal_form(f, opt);
  MaximizingSupport ms = maximizing_support(nf);
  return {nf.beta, std::move(ms.orbits), ms.unique, ms.complete};
}

}  // namespace ergopt
