#pragma once

#include <string>
#include <utility>
#include <vector>

#include "g2g/autodiff.hpp"

namespace g2g {

// Named parameter registry used for optimizer state, checkpoints and clones.
using ParamMap = std::vector<std::pair<std::string, Var>>;

// Uniform init in +/- 1/sqrt(fan_in).
inline Var init_weight(Rng& rng, std::vector<std::size_t> shape, std::size_t fan_in) {
    Tensor t(std::move(shape));
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
    for (auto& x : t.v) x = (2.0 * rng.uniform() - 1.0) * s;
    return make_leaf(std::move(t), true);
}

inline Var init_zeros(std::vector<std::size_t> shape) {
    return make_leaf(Tensor(std::move(shape)), true);
}

// Gated recurrent unit. The update gate blends toward the candidate:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   c = tanh(Wh x + Uh (r*h) + bh)
//   h' = (1-z)*h + z*c
struct GruCell {
    std::size_t input_dim = 0, hidden_dim = 0;
    Var wz, uz, bz, wr, ur, br, wh, uh, bh;

    GruCell() = default;
    GruCell(std::size_t in, std::size_t hid, Rng& rng) : input_dim(in), hidden_dim(hid) {
        wz = init_weight(rng, {hid, in}, in);
        uz = init_weight(rng, {hid, hid}, hid);
        bz = init_zeros({hid});
        wr = init_weight(rng, {hid, in}, in);
        ur = init_weight(rng, {hid, hid}, hid);
        br = init_zeros({hid});
        wh = init_weight(rng, {hid, in}, in);
        uh = init_weight(rng, {hid, hid}, hid);
        bh = init_zeros({hid});
    }

    Var step(Tape& t, const Var& x, const Var& h) const {
        require(x->value.numel() == input_dim, "gru: input has shape ", shape_str(x->value),
                ", cell expects [", input_dim, "]");
        require(h->value.numel() == hidden_dim, "gru: state has shape ", shape_str(h->value),
                ", cell expects [", hidden_dim, "]");
        const Var z = t.sigmoid(t.add(t.add(t.mm(wz, x), t.mm(uz, h)), bz));
        const Var r = t.sigmoid(t.add(t.add(t.mm(wr, x), t.mm(ur, h)), br));
        const Var c = t.tanh(t.add(t.add(t.mm(wh, x), t.mm(uh, t.mul(r, h))), bh));
        return t.add(t.mul(t.affine(z, -1.0, 1.0), h), t.mul(z, c));
    }

    Var zero_state() const { return make_const(Tensor({hidden_dim})); }

    void collect(ParamMap& out, const std::string& p) const {
        out.push_back({p + ".wz", wz});
        out.push_back({p + ".uz", uz});
        out.push_back({p + ".bz", bz});
        out.push_back({p + ".wr", wr});
        out.push_back({p + ".ur", ur});
        out.push_back({p + ".br", br});
        out.push_back({p + ".wh", wh});
        out.push_back({p + ".uh", uh});
        out.push_back({p + ".bh", bh});
    }
};

// Feedforward head with tanh hidden layers and a sigmoid output squeezed
// into [1e-12, 1-1e-12] so downstream logs stay finite.
struct MlpHead {
    std::vector<std::size_t> dims;  // input, hidden..., output
    std::vector<Var> w, b;

    MlpHead() = default;
    MlpHead(std::vector<std::size_t> layer_dims, Rng& rng) : dims(std::move(layer_dims)) {
        require(dims.size() >= 2, "mlp: need at least input and output dims");
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            w.push_back(init_weight(rng, {dims[l + 1], dims[l]}, dims[l]));
            b.push_back(init_zeros({dims[l + 1]}));
        }
    }

    Var forward(Tape& t, const Var& x) const {
        require(x->value.numel() == dims.front(), "mlp: input has shape ", shape_str(x->value),
                ", head expects [", dims.front(), "]");
        Var h = x;
        for (std::size_t l = 0; l < w.size(); ++l) {
            h = t.add(t.mm(w[l], h), b[l]);
            h = (l + 1 == w.size()) ? t.sigmoid(h) : t.tanh(h);
        }
        return t.clamp(h, 1e-12, 1.0 - 1e-12);
    }

    void collect(ParamMap& out, const std::string& p) const {
        for (std::size_t l = 0; l < w.size(); ++l) {
            out.push_back({p + ".w" + std::to_string(l), w[l]});
            out.push_back({p + ".b" + std::to_string(l), b[l]});
        }
    }
};

enum class AttnMode { learned, fixed };

// Attention over encoder states. Learned mode scores each key against the
// query with a one-hidden-layer network and softmax-normalizes; fixed mode
// returns key i outright (identity alignment).
struct AttentionNet {
    AttnMode mode = AttnMode::learned;
    std::size_t query_dim = 0, key_dim = 0, hidden = 0;
    Var w1, b1, w2, b2;
    mutable long long clamped_steps = 0;  // fixed-mode queries past the last key

    AttentionNet() = default;
    AttentionNet(AttnMode m, std::size_t q_dim, std::size_t k_dim, Rng& rng,
                 std::size_t hidden_dim = 64)
        : mode(m), query_dim(q_dim), key_dim(k_dim), hidden(hidden_dim) {
        if (mode == AttnMode::learned) {
            w1 = init_weight(rng, {hidden, q_dim + k_dim}, q_dim + k_dim);
            b1 = init_zeros({hidden});
            w2 = init_weight(rng, {1, hidden}, hidden);
            b2 = init_zeros({1});
        }
    }

    struct Result {
        Var context;
        Var weights;
    };

    // i indexes keys from 0 and is only consulted in fixed mode.
    Result context(Tape& t, const Var& query, const std::vector<Var>& keys, std::size_t i) const {
        require(!keys.empty(), "attention: no keys");
        if (mode == AttnMode::fixed) {
            std::size_t j = i;
            if (j >= keys.size()) {
                j = keys.size() - 1;
                ++clamped_steps;
            }
            Tensor onehot({keys.size()});
            onehot.v[j] = 1.0;
            return {keys[j], make_const(std::move(onehot))};
        }
        require(query->value.numel() == query_dim, "attention: query has shape ",
                shape_str(query->value), ", expected [", query_dim, "]");
        std::vector<Var> scores;
        scores.reserve(keys.size());
        for (const auto& k : keys) {
            require(k->value.numel() == key_dim, "attention: key has shape ",
                    shape_str(k->value), ", expected [", key_dim, "]");
            const Var qk = t.concat({query, k});
            scores.push_back(t.add(t.mm(w2, t.tanh(t.add(t.mm(w1, qk), b1))), b2));
        }
        const Var alpha = t.softmax_lastdim(t.concat(scores));
        const Var ctx = t.tmm(t.stack(keys), alpha);
        return {ctx, alpha};
    }

    void collect(ParamMap& out, const std::string& p) const {
        if (mode != AttnMode::learned) return;
        out.push_back({p + ".w1", w1});
        out.push_back({p + ".b1", b1});
        out.push_back({p + ".w2", w2});
        out.push_back({p + ".b2", b2});
    }
};

}  // namespace g2g
