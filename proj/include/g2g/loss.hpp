#pragma once

#include <set>
#include <utility>
#include <vector>

#include "g2g/autodiff.hpp"
#include "g2g/graph.hpp"

namespace g2g {

// Which adjacency positions are supervised. Positions are (row, entry)
// indices into AdjVecSeq rows.
struct EdgeMask {
    enum class Mode { input_edges_only, all_pairs };
    Mode mode = Mode::all_pairs;
    std::set<std::pair<std::size_t, std::size_t>> pairs;

    static EdgeMask all_pairs(std::size_t width) {
        EdgeMask m;
        m.mode = Mode::all_pairs;
        for (std::size_t r = 0; r + 1 < width; ++r)
            for (std::size_t e = 0; e <= r; ++e) m.pairs.insert({r, e});
        return m;
    }

    // supervise exactly the positions carrying a 1 in the input sequence
    static EdgeMask input_edges(const AdjVecSeq& input) {
        EdgeMask m;
        m.mode = Mode::input_edges_only;
        for (std::size_t r = 0; r < input.rows.size(); ++r)
            for (std::size_t e = 0; e < input.rows[r].size(); ++e)
                if (input.rows[r][e]) m.pairs.insert({r, e});
        return m;
    }
};

struct FocalConfig {
    double gamma = 2.0;
};

// Focal loss summed over the masked positions:
//   p^t = o where the target bit is 1, else 1-o
//   l = -(1-p^t)^gamma * log(p^t)
// Probabilities are clamped into [1e-12, 1-1e-12] before the log.
inline Var focal_loss(Tape& t, const std::vector<Var>& prob_rows, const AdjVecSeq& target,
                      const EdgeMask& mask, const FocalConfig& cfg = {}) {
    require(cfg.gamma >= 0.0, "focal_loss: gamma must be nonnegative, got ", cfg.gamma);
    require(!mask.pairs.empty(), "focal_loss: empty mask, nothing to supervise");
    require(prob_rows.size() == target.rows.size(), "focal_loss: ", prob_rows.size(),
            " probability rows for ", target.rows.size(), " target rows");
    std::size_t total = 0;
    for (std::size_t r = 0; r < prob_rows.size(); ++r) {
        require(prob_rows[r]->value.numel() == r + 1, "focal_loss: row ", r, " has shape ",
                shape_str(prob_rows[r]->value));
        total += r + 1;
    }
    // flatten rows, then apply the target flip and the mask as constants:
    //   p^t = a*o + b  with a = 2y-1, b = 1-y
    Tensor a({total}), b({total}), w({total});
    for (const auto& [r, e] : mask.pairs) {
        require(r < target.rows.size() && e < target.rows[r].size(),
                "focal_loss: mask position (", r, ",", e, ") out of range");
        w.v[r * (r + 1) / 2 + e] = 1.0;
    }
    std::size_t off = 0;
    for (std::size_t r = 0; r < target.rows.size(); ++r)
        for (std::size_t e = 0; e < target.rows[r].size(); ++e, ++off) {
            const double y = target.rows[r][e];
            a.v[off] = 2.0 * y - 1.0;
            b.v[off] = 1.0 - y;
        }
    const Var o = prob_rows.size() == 1 ? prob_rows[0] : t.concat(prob_rows);
    const Var pt = t.clamp(t.add(t.mul(o, make_const(std::move(a))), make_const(std::move(b))),
                           1e-12, 1.0 - 1e-12);
    const Var ell = t.mul(t.pow(t.affine(pt, -1.0, 1.0), cfg.gamma), t.log(pt));
    return t.scale(t.sum(t.mul(ell, make_const(std::move(w)))), -1.0);
}

// Intersection over union of the two edge sets; 1 when both are empty.
inline double edge_iou(const Graph& pred, const Graph& truth) {
    require(pred.n == truth.n, "edge_iou: node counts ", pred.n, " vs ", truth.n);
    std::size_t inter = 0;
    for (const auto& e : pred.edges) inter += truth.edges.count(e);
    const std::size_t uni = pred.edges.size() + truth.edges.size() - inter;
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Fraction of positions where the predicted edge set is exactly right.
inline double exact_accuracy(const std::vector<Graph>& preds, const std::vector<Graph>& truths) {
    require(preds.size() == truths.size(), "exact_accuracy: ", preds.size(), " predictions for ",
            truths.size(), " truths");
    require(!preds.empty(), "exact_accuracy: empty lists");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i].edges == truths[i].edges) ++hits;
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

}  // namespace g2g
