#pragma once

// The de Bruijn graph of a depth-k cylinder function, kept implicit.
//
// Node v is a word of length k-1 (by lexicographic index), edge e a word of
// length k. Edge e runs from src(e) = e / m to dst(e) = e mod m^{k-1}; the
// in-edges of v are a * m^{k-1} + v and its out-edges v * m + a. Depth 1 gives
// a single node carrying m loops.

#include "ergopt/cylinder.hpp"
#include "ergopt/shift.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace ergopt {

struct DeBruijnGraph {
  std::uint32_t m = 2;
  std::size_t order = 1;       // k
  std::size_t node_count = 1;  // m^{k-1}
  std::size_t edge_count = 2;  // m^k
  const Integer* weight = nullptr;  // numerators over denominator, borrowed from the function
  Integer denominator = 1;

  std::size_t src(std::size_t e) const { return e / m; }
  std::size_t dst(std::size_t e) const { return e % node_count; }
  std::size_t in_edge(std::size_t v, std::uint32_t a) const { return a * node_count + v; }
  std::size_t out_edge(std::size_t v, std::uint32_t a) const { return v * m + a; }
  /// First symbol of the edge word, i.e. the symbol emitted when traversing e.
  Symbol head_symbol(std::size_t e) const { return static_cast<Symbol>(e / node_count); }
};

/// The returned graph borrows f's table; f must outlive it.
inline DeBruijnGraph build_graph(const CylinderFunction& f) {
  if (f.depth() < 1) throw std::invalid_argument("de Bruijn graph needs depth >= 1");
  DeBruijnGraph g;
  g.m = f.alphabet().size;
  g.order = f.depth();
  g.edge_count = f.size();
  g.node_count = f.size() / g.m;
  g.weight = f.numerators().data();
  g.denominator = f.denominator();
  return g;
}

/// Symbol block traced by a closed walk given as consecutive edges.
inline Word cycle_block(const DeBruijnGraph& g, const std::vector<std::size_t>& edges) {
  Word w(edges.size());
  for (std::size_t t = 0; t < edges.size(); ++t) w[t] = g.head_symbol(edges[t]);
  return w;
}

/// Edges of the closed walk traced by the periodic point block^inf.
inline std::vector<std::size_t> cycle_edges(const DeBruijnGraph& g, const Word& block) {
  std::vector<std::size_t> edges(block.size());
  for (std::size_t s = 0; s < block.size(); ++s) {
    std::size_t idx = 0;
    for (std::size_t t = 0; t < g.order; ++t) idx = idx * g.m + block[(s + t) % block.size()];
    edges[s] = idx;
  }
  return edges;
}

/// Strongly connected components of the subgraph of edges with keep[e] != 0.
struct SccResult {
  std::vector<std::uint32_t> component;  // per node
  std::vector<char> cyclic;              // per component: contains a cycle
  std::size_t count = 0;
};

inline SccResult strongly_connected(const DeBruijnGraph& g, const std::vector<char>& keep) {
  constexpr std::uint32_t unset = UINT32_MAX;
  const std::size_t n = g.node_count;
  SccResult r;
  r.component.assign(n, unset);
  std::vector<std::uint32_t> index(n, unset), low(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<char> on_stack(n, 0);
  struct Frame {
    std::uint32_t v;
    std::uint32_t next_symbol;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unset) continue;
    call.push_back({static_cast<std::uint32_t>(root), 0});
    index[root] = low[root] = counter++;
    stack.push_back(static_cast<std::uint32_t>(root));
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      const std::uint32_t v = fr.v;
      if (fr.next_symbol < g.m) {
        const std::size_t e = g.out_edge(v, fr.next_symbol++);
        if (!keep[e]) continue;
        const std::uint32_t w = static_cast<std::uint32_t>(g.dst(e));
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        const std::uint32_t c = static_cast<std::uint32_t>(r.count++);
        std::size_t members = 0;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          r.component[w] = c;
          ++members;
        } while (w != v);
        bool loop = false;
        if (members == 1)
          for (std::uint32_t a = 0; a < g.m; ++a) {
            const std::size_t e = g.out_edge(v, a);
            if (keep[e] && g.dst(e) == v) loop = true;
          }
        r.cyclic.push_back(members > 1 || loop);
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return r;
}

/// Johnson's enumeration of the simple cycles of the subgraph keep[e] != 0,
/// each reported as its edge list starting at its least node. Stops after
/// max_cycles; returns false if it stopped early.
inline bool enumerate_simple_cycles(const DeBruijnGraph& g, const std::vector<char>& keep, std::size_t max_cycles,
                                    const std::function<void(const std::vector<std::size_t>&)>& emit) {
  const std::size_t n = g.node_count;
  std::vector<char> blocked(n, 0);
  std::vector<std::vector<std::size_t>> block_map(n);
  std::vector<std::size_t> path_edges;
  std::size_t found = 0;
  bool truncated = false;

  auto unblock = [&](std::size_t u) {
    std::vector<std::size_t> work{u};
    while (!work.empty()) {
      const std::size_t x = work.back();
      work.pop_back();
      if (!blocked[x]) continue;
      blocked[x] = 0;
      for (std::size_t y : block_map[x]) work.push_back(y);
      block_map[x].clear();
    }
  };

  for (std::size_t s = 0; s < n && !truncated; ++s) {
    // Restrict to nodes >= s: the component of s in that subgraph.
    std::vector<char> sub(keep.size(), 0);
    for (std::size_t e = 0; e < keep.size(); ++e)
      if (keep[e] && g.src(e) >= s && g.dst(e) >= s) sub[e] = 1;
    SccResult scc = strongly_connected(g, sub);
    if (!scc.cyclic[scc.component[s]]) continue;
    const std::uint32_t cs = scc.component[s];
    auto usable = [&](std::size_t e) { return sub[e] && scc.component[g.dst(e)] == cs; };
    for (std::size_t v = s; v < n; ++v) {
      blocked[v] = 0;
      block_map[v].clear();
    }

    // Iterative circuit(v) with explicit frames.
    struct Frame {
      std::size_t v;
      std::uint32_t next_symbol;
      bool found_cycle;
    };
    std::vector<Frame> call{{s, 0, false}};
    blocked[s] = 1;
    while (!call.empty() && !truncated) {
      Frame& fr = call.back();
      if (fr.next_symbol < g.m) {
        const std::size_t e = g.out_edge(fr.v, fr.next_symbol++);
        if (!usable(e)) continue;
        const std::size_t w = g.dst(e);
        if (w == s) {
          path_edges.push_back(e);
          emit(path_edges);
          path_edges.pop_back();
          fr.found_cycle = true;
          if (++found >= max_cycles) truncated = true;
        } else if (!blocked[w]) {
          path_edges.push_back(e);
          blocked[w] = 1;
          call.push_back({w, 0, false});
        }
        continue;
      }
      const Frame done = fr;
      call.pop_back();
      if (done.found_cycle) {
        unblock(done.v);
      } else {
        for (std::uint32_t a = 0; a < g.m; ++a) {
          const std::size_t e = g.out_edge(done.v, a);
          if (!usable(e)) continue;
          auto& lst = block_map[g.dst(e)];
          if (std::find(lst.begin(), lst.end(), done.v) == lst.end()) lst.push_back(done.v);
        }
      }
      if (!call.empty()) {
        path_edges.pop_back();
        if (done.found_cycle) call.back().found_cycle = true;
      }
    }
    path_edges.clear();
  }
  return !truncated;
}

}  // namespace ergopt
