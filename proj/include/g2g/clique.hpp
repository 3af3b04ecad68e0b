#pragma once

#include <cstdint>
#include <vector>

#include "g2g/graph.hpp"

namespace g2g {

namespace detail {

// True when mask a, read as an ascending node list, precedes mask b
// lexicographically: the lowest differing bit decides.
inline bool lex_before(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t d = a ^ b;
    if (d == 0) return false;
    return (a & (d & ~(d - 1))) != 0;
}

struct BronKerbosch {
    const std::vector<std::uint64_t>& nb;
    std::uint64_t best = 0;
    int best_size = -1;

    void expand(std::uint64_t r, std::uint64_t p, std::uint64_t x, int rsize) {
        if (p == 0 && x == 0) {
            if (rsize > best_size || (rsize == best_size && lex_before(r, best))) {
                best = r;
                best_size = rsize;
            }
            return;
        }
        // pivot: member of P|X covering the most of P
        std::uint64_t px = p | x;
        int best_cover = -1;
        std::uint64_t pivot_nb = 0;
        for (std::uint64_t m = px; m;) {
            const int u = __builtin_ctzll(m);
            m &= m - 1;
            const int cover = __builtin_popcountll(p & nb[static_cast<std::size_t>(u)]);
            if (cover > best_cover) {
                best_cover = cover;
                pivot_nb = nb[static_cast<std::size_t>(u)];
            }
        }
        for (std::uint64_t m = p & ~pivot_nb; m;) {
            const int v = __builtin_ctzll(m);
            m &= m - 1;
            const std::uint64_t vb = 1ULL << v;
            expand(r | vb, p & nb[static_cast<std::size_t>(v)],
                   x & nb[static_cast<std::size_t>(v)], rsize + 1);
            p &= ~vb;
            x |= vb;
        }
    }
};

}  // namespace detail

// Exact maximum clique (Bron-Kerbosch with pivoting), as an ascending node
// list. Ties between equal-size cliques go to the lexicographically smallest
// node set. Graphs are capped at 64 nodes.
inline std::vector<int> max_clique(const Graph& g) {
    validate(g);
    require(g.n <= 64, "max_clique: ", g.n, " nodes exceeds the 64-node guard");
    if (g.n == 0) return {};
    std::vector<std::uint64_t> nb(static_cast<std::size_t>(g.n), 0);
    for (const auto& [a, b] : g.edges) {
        nb[static_cast<std::size_t>(a)] |= 1ULL << b;
        nb[static_cast<std::size_t>(b)] |= 1ULL << a;
    }
    detail::BronKerbosch bk{nb};
    const std::uint64_t all = g.n == 64 ? ~0ULL : (1ULL << g.n) - 1;
    bk.expand(0, all, 0, 0);
    std::vector<int> out;
    for (std::uint64_t m = bk.best; m;) {
        out.push_back(__builtin_ctzll(m));
        m &= m - 1;
    }
    return out;
}

// Graph with the same node count carrying exactly the pairwise edges among
// `members` — the complete subgraph on those nodes.
inline Graph clique_subgraph(const Graph& g, const std::vector<int>& members) {
    Graph out;
    out.n = g.n;
    out.label = g.label;
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) out.add_edge(members[i], members[j]);
    return out;
}

inline Graph max_clique_oracle(const Graph& g) { return clique_subgraph(g, max_clique(g)); }

// Diagnostic: does pred describe *some* maximum clique of input (not
// necessarily the canonical tie-broken one)? pred must contain exactly the
// pairwise edges of one clique whose size equals the maximum.
inline bool matches_some_max_clique(const Graph& input, const Graph& pred) {
    require(pred.n == input.n, "matches_some_max_clique: node counts ", pred.n, " vs ", input.n);
    std::vector<int> members;
    const auto deg = pred.degrees();
    for (int v = 0; v < pred.n; ++v)
        if (deg[static_cast<std::size_t>(v)] > 0) members.push_back(v);
    const std::size_t k = members.size();
    if (pred.edges.size() != k * (k - (k ? 1 : 0)) / 2) return false;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            if (!pred.has_edge(members[i], members[j])) return false;
            if (!input.has_edge(members[i], members[j])) return false;
        }
    const std::size_t maximum = max_clique(input).size();
    return std::max<std::size_t>(k, 1) == std::max<std::size_t>(maximum, 1);
}

}  // namespace g2g
