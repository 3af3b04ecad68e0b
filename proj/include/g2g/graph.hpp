#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "g2g/common.hpp"

namespace g2g {

// Undirected graph with binary edges. Edges are stored as (i, j) pairs with
// j < i, both in [0, n).
struct Graph {
    int n = 0;
    std::set<std::pair<int, int>> edges;
    std::optional<int> label;

    void add_edge(int a, int b) {
        require(a != b, "graph: self-loop at node ", a);
        require(a >= 0 && b >= 0 && a < n && b < n, "graph: edge (", a, ",", b,
                ") outside node range [0,", n, ")");
        if (a < b) std::swap(a, b);
        edges.insert({a, b});
    }

    bool has_edge(int a, int b) const {
        if (a < b) std::swap(a, b);
        return edges.count({a, b}) > 0;
    }

    std::vector<int> degrees() const {
        std::vector<int> deg(static_cast<std::size_t>(n), 0);
        for (const auto& [a, b] : edges) {
            ++deg[static_cast<std::size_t>(a)];
            ++deg[static_cast<std::size_t>(b)];
        }
        return deg;
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (const auto& [a, b] : edges) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        return adj;
    }

    bool operator==(const Graph& o) const { return n == o.n && edges == o.edges; }
};

inline void validate(const Graph& g) {
    require(g.n >= 0, "graph: negative node count");
    for (const auto& [a, b] : g.edges) {
        require(b < a, "graph: edge (", a, ",", b, ") not stored as (hi,lo)");
        require(a != b, "graph: self-loop at node ", a);
        require(a < g.n && b >= 0, "graph: edge (", a, ",", b, ") outside node range [0,", g.n, ")");
    }
}

// Relabels g by perm: node v becomes perm[v].
inline Graph apply_permutation(const Graph& g, const std::vector<int>& perm) {
    require(perm.size() == static_cast<std::size_t>(g.n), "apply_permutation: size mismatch");
    Graph out;
    out.n = g.n;
    out.label = g.label;
    for (const auto& [a, b] : g.edges)
        out.add_edge(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
    return out;
}

// Sequence of adjacency vectors, lower triangle only. Row r (r in
// [0, width-1)) belongs to node r+1 and has r+1 entries; entry e is the edge
// indicator for (r+1, r-e), so entry 0 refers to the immediately preceding
// node. Rows for nodes beyond the represented graph are all zero.
struct AdjVecSeq {
    std::size_t width = 0;
    std::vector<std::vector<std::uint8_t>> rows;

    static AdjVecSeq zeros(std::size_t width) {
        AdjVecSeq s;
        s.width = width;
        if (width > 0) {
            s.rows.resize(width - 1);
            for (std::size_t r = 0; r + 1 < width; ++r) s.rows[r].assign(r + 1, 0);
        }
        return s;
    }

    std::uint8_t at(std::size_t row, std::size_t e) const { return rows[row][e]; }

    std::size_t ones() const {
        std::size_t c = 0;
        for (const auto& row : rows)
            for (auto b : row) c += b;
        return c;
    }

    bool operator==(const AdjVecSeq& o) const { return width == o.width && rows == o.rows; }
};

inline void validate(const AdjVecSeq& s) {
    require(s.rows.size() + 1 == s.width || (s.width == 0 && s.rows.empty()),
            "adjvecseq: row count ", s.rows.size(), " does not match width ", s.width);
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
        require(s.rows[r].size() == r + 1, "adjvecseq: row ", r, " has length ", s.rows[r].size());
        for (auto b : s.rows[r]) require(b == 0 || b == 1, "adjvecseq: entry not in {0,1}");
    }
}

inline AdjVecSeq to_sequence(const Graph& g, std::size_t width) {
    require(static_cast<std::size_t>(g.n) <= width, "to_sequence: graph with ", g.n,
            " nodes exceeds width ", width);
    AdjVecSeq s = AdjVecSeq::zeros(width);
    for (const auto& [a, b] : g.edges)
        s.rows[static_cast<std::size_t>(a) - 1][static_cast<std::size_t>(a - 1 - b)] = 1;
    return s;
}

inline Graph from_sequence(const AdjVecSeq& s) {
    Graph g;
    g.n = static_cast<int>(s.width);
    for (std::size_t r = 0; r < s.rows.size(); ++r)
        for (std::size_t e = 0; e < s.rows[r].size(); ++e)
            if (s.rows[r][e]) g.add_edge(static_cast<int>(r + 1), static_cast<int>(r - e));
    return g;
}

namespace detail {

// Iterated neighborhood refinement. Returns a per-node key that is invariant
// under relabeling: key 0 is the degree, and each round replaces a node's key
// with the rank of (key, sorted neighbor keys) among all such signatures.
inline std::vector<int> refine_keys(const Graph& g, const std::vector<std::vector<int>>& adj) {
    const auto n = static_cast<std::size_t>(g.n);
    std::vector<int> key(n);
    for (std::size_t v = 0; v < n; ++v) key[v] = static_cast<int>(adj[v].size());
    std::size_t classes = 0;
    for (std::size_t round = 0; round < n; ++round) {
        std::map<std::pair<int, std::vector<int>>, int> rank;
        std::vector<std::pair<int, std::vector<int>>> sig(n);
        for (std::size_t v = 0; v < n; ++v) {
            std::vector<int> nb;
            nb.reserve(adj[v].size());
            for (int u : adj[v]) nb.push_back(key[static_cast<std::size_t>(u)]);
            std::sort(nb.begin(), nb.end());
            sig[v] = {key[v], std::move(nb)};
            rank.emplace(sig[v], 0);
        }
        int next = 0;
        for (auto& [s, r] : rank) r = next++;
        for (std::size_t v = 0; v < n; ++v) key[v] = rank[sig[v]];
        if (rank.size() == classes) break;
        classes = rank.size();
    }
    return key;
}

// Finds, for one connected component, the depth-first node order whose
// adjacency-row sequence is lexicographically smallest. Roots are restricted
// to maximum-degree nodes with minimal refinement key; whenever several
// unvisited neighbors tie on (degree, key) the search branches over all of
// them. Tied nodes whose exchange is an automorphism are explored only once,
// and branches whose row prefix already exceeds the best sequence are cut.
class CanonSearch {
  public:
    CanonSearch(const std::vector<std::vector<int>>& adj, const std::vector<char>& amat,
                const std::vector<int>& deg, const std::vector<int>& key, std::size_t n)
        : adj_(adj), amat_(amat), deg_(deg), key_(key), n_(n), visited_(n, 0) {}

    std::vector<int> run(const std::vector<int>& members,
                         std::vector<std::vector<std::uint8_t>>& rows_out) {
        comp_size_ = members.size();
        have_best_ = false;
        best_order_.clear();
        best_rows_.clear();
        int root_deg = -1, root_key = 0;
        for (int v : members) {
            const auto iv = static_cast<std::size_t>(v);
            if (deg_[iv] > root_deg || (deg_[iv] == root_deg && key_[iv] < root_key)) {
                root_deg = deg_[iv];
                root_key = key_[iv];
            }
        }
        std::vector<int> roots;
        for (int v : members)
            if (deg_[static_cast<std::size_t>(v)] == root_deg &&
                key_[static_cast<std::size_t>(v)] == root_key)
                roots.push_back(v);
        std::sort(roots.begin(), roots.end());
        dedupe(roots);
        for (int r : roots) {
            place(r);
            std::vector<int> path{r};
            search(path, true);
            unplace();
        }
        rows_out = best_rows_;
        return best_order_;
    }

  private:
    bool edge(int a, int b) const {
        return amat_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)] != 0;
    }

    // True when swapping u and w (fixing everything else) maps the graph onto
    // itself, i.e. both connect identically to all other nodes.
    bool interchangeable(int u, int w) const {
        for (std::size_t x = 0; x < n_; ++x) {
            if (static_cast<int>(x) == u || static_cast<int>(x) == w) continue;
            if (edge(u, static_cast<int>(x)) != edge(w, static_cast<int>(x))) return false;
        }
        return true;
    }

    // Removes candidates whose exchange with an earlier one is an automorphism.
    void dedupe(std::vector<int>& cand) const {
        std::vector<int> kept;
        for (int c : cand) {
            bool dup = false;
            for (int k : kept)
                if (interchangeable(k, c)) {
                    dup = true;
                    break;
                }
            if (!dup) kept.push_back(c);
        }
        cand = kept;
    }

    void place(int v) {
        const std::size_t p = order_.size();
        visited_[static_cast<std::size_t>(v)] = 1;
        if (p > 0) {
            std::vector<std::uint8_t> row(p);
            for (std::size_t e = 0; e < p; ++e)
                row[e] = edge(v, order_[p - 1 - e]) ? 1 : 0;
            rows_.push_back(std::move(row));
        }
        order_.push_back(v);
    }

    void unplace() {
        visited_[static_cast<std::size_t>(order_.back())] = 0;
        order_.pop_back();
        if (!order_.empty()) rows_.pop_back();
    }

    // tight: row prefix so far equals the best sequence's prefix.
    void search(std::vector<int>& path, bool tight) {
        ++expansions_;
        require(expansions_ <= kMaxExpansions,
                "canonical_order: symmetry search exceeded ", kMaxExpansions, " expansions");
        // back up past nodes with no unvisited neighbors
        std::vector<int> popped;
        while (!path.empty()) {
            const int top = path.back();
            bool open = false;
            for (int u : adj_[static_cast<std::size_t>(top)])
                if (!visited_[static_cast<std::size_t>(u)]) {
                    open = true;
                    break;
                }
            if (open) break;
            popped.push_back(top);
            path.pop_back();
        }
        if (path.empty()) {
            require(order_.size() == comp_size_, "canonical_order: incomplete traversal");
            if (!have_best_) {
                best_order_ = order_;
                best_rows_ = rows_;
                have_best_ = true;
            } else if (!tight && rows_ < best_rows_) {
                best_order_ = order_;
                best_rows_ = rows_;
            }
        } else {
            const int top = path.back();
            std::vector<int> cand;
            int c_deg = 0, c_key = 0;
            for (int u : adj_[static_cast<std::size_t>(top)]) {
                if (visited_[static_cast<std::size_t>(u)]) continue;
                const auto iu = static_cast<std::size_t>(u);
                if (cand.empty() || deg_[iu] < c_deg || (deg_[iu] == c_deg && key_[iu] < c_key)) {
                    if (deg_[iu] != c_deg || key_[iu] != c_key) cand.clear();
                    c_deg = deg_[iu];
                    c_key = key_[iu];
                }
                if (deg_[iu] == c_deg && key_[iu] == c_key) cand.push_back(u);
            }
            std::sort(cand.begin(), cand.end());
            dedupe(cand);
            for (int c : cand) {
                place(c);
                bool child_tight = tight;
                bool cut = false;
                if (have_best_ && child_tight) {
                    const auto& row = rows_.back();
                    const auto& ref = best_rows_[rows_.size() - 1];
                    if (row > ref) cut = true;
                    else if (row < ref) child_tight = false;
                }
                if (!cut) {
                    path.push_back(c);
                    search(path, child_tight);
                    path.pop_back();
                }
                unplace();
            }
        }
        for (auto it = popped.rbegin(); it != popped.rend(); ++it) path.push_back(*it);
    }

    static constexpr long long kMaxExpansions = 4'000'000;
    const std::vector<std::vector<int>>& adj_;
    const std::vector<char>& amat_;
    const std::vector<int>& deg_;
    const std::vector<int>& key_;
    std::size_t n_;
    std::size_t comp_size_ = 0;
    std::vector<char> visited_;
    std::vector<int> order_;
    std::vector<std::vector<std::uint8_t>> rows_;
    bool have_best_ = false;
    std::vector<int> best_order_;
    std::vector<std::vector<std::uint8_t>> best_rows_;
    long long expansions_ = 0;
};

}  // namespace detail

// Permutation (old node id -> new node id) realizing the canonical order:
// each component is laid out by the depth-first traversal minimizing its
// adjacency-row sequence (see CanonSearch), and components are emitted
// largest first, ties broken by comparing their sequences. The result
// depends only on graph structure, never on the incoming labeling.
inline std::vector<int> canonical_permutation(const Graph& g) {
    validate(g);
    const auto n = static_cast<std::size_t>(g.n);
    if (n == 0) return {};
    const auto adj = g.adjacency();
    const auto deg = g.degrees();
    const auto key = detail::refine_keys(g, adj);
    std::vector<char> amat(n * n, 0);
    for (const auto& [a, b] : g.edges) {
        amat[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] = 1;
        amat[static_cast<std::size_t>(b) * n + static_cast<std::size_t>(a)] = 1;
    }

    std::vector<char> assigned(n, 0);
    struct Component {
        std::vector<int> order;
        std::vector<std::vector<std::uint8_t>> rows;
    };
    std::vector<Component> comps;
    detail::CanonSearch search(adj, amat, deg, key, n);
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (assigned[seed]) continue;
        std::vector<int> members;
        std::vector<int> stack{static_cast<int>(seed)};
        assigned[seed] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int u : adj[static_cast<std::size_t>(v)])
                if (!assigned[static_cast<std::size_t>(u)]) {
                    assigned[static_cast<std::size_t>(u)] = 1;
                    stack.push_back(u);
                }
        }
        Component c;
        c.order = search.run(members, c.rows);
        comps.push_back(std::move(c));
    }

    std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        if (a.order.size() != b.order.size()) return a.order.size() > b.order.size();
        return a.rows < b.rows;
    });

    std::vector<int> perm(n);  // old id -> new id
    int next = 0;
    for (const auto& c : comps)
        for (int v : c.order) perm[static_cast<std::size_t>(v)] = next++;
    return perm;
}

inline Graph canonical_order(const Graph& g) {
    if (g.n == 0) {
        validate(g);
        return g;
    }
    return apply_permutation(g, canonical_permutation(g));
}

}  // namespace g2g
