#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "g2g/cells.hpp"
#include "g2g/graph.hpp"

namespace g2g {

enum class EncodeMode { bidirectional, forward_only };

// Where a decoder context vector comes from:
//   learned     - scored attention over encoder states
//   fixed       - identity alignment (state i attends to encoder state i)
//   final_state - the encoder's final state at every step (node level only)
//   zeros       - context disabled
enum class ContextMode { learned, fixed, final_state, zeros };

inline const char* to_string(EncodeMode m) {
    return m == EncodeMode::bidirectional ? "bidirectional" : "forward_only";
}
inline const char* to_string(ContextMode m) {
    switch (m) {
        case ContextMode::learned: return "learned";
        case ContextMode::fixed: return "fixed";
        case ContextMode::final_state: return "final_state";
        default: return "zeros";
    }
}

struct ModelConfig {
    std::size_t width = 0;        // sequence width all inputs are padded to
    std::size_t edge_hidden = 32;
    std::size_t node_hidden = 128;  // per direction; also the latent size
    std::size_t down_hidden = 32;   // previous-row encoder
    std::size_t emb_dim = 16;       // previous-bit embedding
    std::vector<std::size_t> head_hidden = {64};
    std::size_t attn_hidden = 64;
    EncodeMode encode_mode = EncodeMode::bidirectional;
    ContextMode node_context = ContextMode::learned;
    ContextMode edge_context = ContextMode::learned;
    bool full_edge_keys = false;  // edge attention over every row's states
    double threshold = 0.5;

    // decoder state size: both node directions concatenated
    std::size_t decoder_dim() const {
        return (encode_mode == EncodeMode::bidirectional ? 2 : 1) * node_hidden;
    }

    bool operator==(const ModelConfig&) const = default;
};

inline void validate(const ModelConfig& c) {
    require(c.width >= 1, "config: width ", c.width);
    require(c.edge_hidden >= 1 && c.node_hidden >= 1 && c.down_hidden >= 1 && c.emb_dim >= 1,
            "config: zero-size hidden dimension");
    require(c.attn_hidden >= 1, "config: attention hidden size");
    require(c.edge_context != ContextMode::final_state,
            "config: final_state context applies to the node level only");
    require(c.threshold >= 0.0 && c.threshold <= 1.0, "config: threshold ", c.threshold);
}

// Reconstruction preset: one-directional encoder, every node context pinned
// to the final encoder state (the latent), no edge context.
inline ModelConfig autoencoder_config(std::size_t width) {
    ModelConfig c;
    c.width = width;
    c.encode_mode = EncodeMode::forward_only;
    c.node_context = ContextMode::final_state;
    c.edge_context = ContextMode::zeros;
    return c;
}

struct ModelParams {
    ModelConfig config;
    GruCell enc_edge;       // reads adjacency bits within a row
    GruCell enc_node_fwd;   // reads row encodings left to right
    GruCell enc_node_rev;   // right to left; absent in forward_only mode
    GruCell down;           // re-encodes the previously emitted row
    GruCell dec_node;       // node-level decoder recurrence
    GruCell dec_edge;       // edge-level decoder recurrence
    MlpHead edge_head;      // decoder edge state -> probability
    AttentionNet node_attn;
    AttentionNet edge_attn;
    Var sos_node;  // stands in for the row encoding before the first row
    Var emb_bit;   // image of a previous bit of 1
    Var sos_edge;  // start-of-row token (image of the start flag)

    ModelParams() = default;

    ModelParams(const ModelConfig& cfg, Rng& rng) : config(cfg) {
        validate(cfg);
        const std::size_t dn = cfg.decoder_dim();
        enc_edge = GruCell(1, cfg.edge_hidden, rng);
        enc_node_fwd = GruCell(cfg.edge_hidden, cfg.node_hidden, rng);
        if (cfg.encode_mode == EncodeMode::bidirectional)
            enc_node_rev = GruCell(cfg.edge_hidden, cfg.node_hidden, rng);
        down = GruCell(1, cfg.down_hidden, rng);
        dec_node = GruCell(cfg.down_hidden + dn, dn, rng);
        dec_edge = GruCell(cfg.emb_dim + cfg.edge_hidden, dn, rng);
        std::vector<std::size_t> head_dims{dn};
        for (std::size_t h : cfg.head_hidden) head_dims.push_back(h);
        head_dims.push_back(1);
        edge_head = MlpHead(head_dims, rng);
        if (cfg.node_context == ContextMode::learned)
            node_attn = AttentionNet(AttnMode::learned, dn, dn, rng, cfg.attn_hidden);
        else if (cfg.node_context == ContextMode::fixed)
            node_attn = AttentionNet(AttnMode::fixed, dn, dn, rng, cfg.attn_hidden);
        if (cfg.edge_context == ContextMode::learned)
            edge_attn = AttentionNet(AttnMode::learned, dn, cfg.edge_hidden, rng, cfg.attn_hidden);
        else if (cfg.edge_context == ContextMode::fixed)
            edge_attn = AttentionNet(AttnMode::fixed, dn, cfg.edge_hidden, rng, cfg.attn_hidden);
        sos_node = init_weight(rng, {cfg.down_hidden}, cfg.down_hidden);
        emb_bit = init_weight(rng, {cfg.emb_dim}, cfg.emb_dim);
        sos_edge = init_weight(rng, {cfg.emb_dim}, cfg.emb_dim);
    }

    ParamMap params() const {
        ParamMap out;
        enc_edge.collect(out, "enc.edge");
        enc_node_fwd.collect(out, "enc.node_fwd");
        if (config.encode_mode == EncodeMode::bidirectional)
            enc_node_rev.collect(out, "enc.node_rev");
        down.collect(out, "dec.down");
        dec_node.collect(out, "dec.node");
        dec_edge.collect(out, "dec.edge");
        edge_head.collect(out, "dec.head");
        if (config.node_context == ContextMode::learned) node_attn.collect(out, "attn.node");
        if (config.edge_context == ContextMode::learned) edge_attn.collect(out, "attn.edge");
        out.emplace_back("dec.sos_node", sos_node);
        out.emplace_back("dec.emb_bit", emb_bit);
        out.emplace_back("dec.sos_edge", sos_edge);
        return out;
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& [name, v] : params()) n += v->value.numel();
        return n;
    }
};

struct EncoderOutput {
    std::vector<std::vector<Var>> edge_hidden;  // per row, one state per bit read
    std::vector<Var> row_encoding;              // final edge state of each row
    std::vector<Var> node_hidden;               // per row, both directions joined
    Var final_state;                            // decoder's initial state
};

// Runs the two-level encoder over a width-aligned sequence: the edge cell
// folds each row into an encoding, the node cell(s) fold the encodings into
// per-row hidden states. In bidirectional mode forward and reverse passes
// are paired position-for-position, and the final state joins the last
// forward state with the reverse state produced at the same position.
inline EncoderOutput encode(Tape& t, const AdjVecSeq& s, const ModelParams& p) {
    validate(s);
    require(s.width == p.config.width, "encode: sequence width ", s.width,
            " does not match the model width ", p.config.width);
    const std::size_t rows = s.rows.size();
    EncoderOutput out;
    out.edge_hidden.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        Var h = p.enc_edge.zero_state();
        for (std::size_t e = 0; e <= r; ++e) {
            Tensor bit({1});
            bit.v[0] = s.at(r, e);
            h = p.enc_edge.step(t, make_const(std::move(bit)), h);
            out.edge_hidden[r].push_back(h);
        }
        out.row_encoding.push_back(h);
    }
    std::vector<Var> fwd(rows);
    Var h = p.enc_node_fwd.zero_state();
    for (std::size_t r = 0; r < rows; ++r) {
        h = p.enc_node_fwd.step(t, out.row_encoding[r], h);
        fwd[r] = h;
    }
    if (p.config.encode_mode == EncodeMode::bidirectional) {
        std::vector<Var> rev(rows);
        Var g = p.enc_node_rev.zero_state();
        for (std::size_t r = rows; r-- > 0;) {
            g = p.enc_node_rev.step(t, out.row_encoding[r], g);
            rev[r] = g;
        }
        for (std::size_t r = 0; r < rows; ++r)
            out.node_hidden.push_back(t.concat({fwd[r], rev[r]}));
    } else {
        out.node_hidden = fwd;
    }
    out.final_state = rows == 0 ? make_const(Tensor({p.config.decoder_dim()}))
                                : out.node_hidden.back();
    return out;
}

struct DecodeOutput {
    std::vector<Var> prob_rows;              // row r holds r+1 probabilities
    std::vector<std::vector<double>> probs;  // plain copy of the same values
    AdjVecSeq hard;                          // probabilities thresholded
};

namespace detail {

inline Var bit_input(double bit) {
    Tensor x({1});
    x.v[0] = bit;
    return make_const(std::move(x));
}

// One decoding pass. With `teacher` set, previous bits and rows are read
// from it (teacher forcing); otherwise the thresholded predictions are fed
// back. `restrict_to` zeroes any predicted bit absent from it before the
// bit is emitted or fed back.
inline DecodeOutput decode_impl(Tape& t, const EncoderOutput& enc, const ModelParams& p,
                                const AdjVecSeq* teacher, std::size_t out_rows,
                                double threshold, const AdjVecSeq* restrict_to) {
    const ModelConfig& cfg = p.config;
    const std::size_t dn = cfg.decoder_dim();
    require(enc.node_hidden.size() + 1 == cfg.width, "decode: encoder carries ",
            enc.node_hidden.size(), " states, the model width ", cfg.width, " needs ",
            cfg.width - 1);
    require(out_rows < cfg.width, "decode: ", out_rows, " output rows exceed width ", cfg.width);

    std::vector<Var> flat_edge_keys;
    if (cfg.full_edge_keys &&
        (cfg.edge_context == ContextMode::learned || cfg.edge_context == ContextMode::fixed)) {
        for (const auto& row : enc.edge_hidden)
            flat_edge_keys.insert(flat_edge_keys.end(), row.begin(), row.end());
    }
    const Var zero_node_ctx = make_const(Tensor({dn}));
    const Var zero_edge_ctx = make_const(Tensor({cfg.edge_hidden}));

    DecodeOutput out;
    out.hard = AdjVecSeq::zeros(out_rows + 1);
    Var s_node = enc.final_state;
    Var prev_row_enc = p.sos_node;
    for (std::size_t r = 0; r < out_rows; ++r) {
        Var ctx = zero_node_ctx;
        switch (cfg.node_context) {
            case ContextMode::learned:
            case ContextMode::fixed:
                ctx = p.node_attn.context(t, s_node, enc.node_hidden, r).context;
                break;
            case ContextMode::final_state: ctx = enc.final_state; break;
            case ContextMode::zeros: break;
        }
        s_node = p.dec_node.step(t, t.concat({prev_row_enc, ctx}), s_node);

        Var s_edge = s_node;
        std::vector<Var> row_probs;
        for (std::size_t e = 0; e <= r; ++e) {
            Var prev;
            if (e == 0) {
                prev = p.sos_edge;
            } else {
                const int prev_bit = teacher ? teacher->at(r, e - 1) : out.hard.at(r, e - 1);
                prev = prev_bit ? Var(p.emb_bit) : make_const(Tensor({cfg.emb_dim}));
            }
            Var ectx = zero_edge_ctx;
            if (cfg.edge_context == ContextMode::learned ||
                cfg.edge_context == ContextMode::fixed) {
                const auto& keys = cfg.full_edge_keys ? flat_edge_keys : enc.edge_hidden[r];
                const std::size_t align = cfg.full_edge_keys ? r * (r + 1) / 2 + e : e;
                ectx = p.edge_attn.context(t, s_edge, keys, align).context;
            }
            s_edge = p.dec_edge.step(t, t.concat({prev, ectx}), s_edge);
            const Var o = p.edge_head.forward(t, s_edge);
            row_probs.push_back(o);
            int bit = o->value.v[0] > threshold ? 1 : 0;
            if (restrict_to && !restrict_to->at(r, e)) bit = 0;
            out.hard.rows[r][e] = static_cast<std::uint8_t>(bit);
        }
        out.prob_rows.push_back(row_probs.size() == 1 ? row_probs[0] : t.concat(row_probs));
        out.probs.emplace_back();
        for (std::size_t e = 0; e <= r; ++e)
            out.probs.back().push_back(out.prob_rows[r]->value.v[e]);

        // fold the row just handled into the input of the next node step
        const AdjVecSeq& fed = teacher ? *teacher : out.hard;
        Var h = p.down.zero_state();
        for (std::size_t e = 0; e <= r; ++e) h = p.down.step(t, bit_input(fed.at(r, e)), h);
        prev_row_enc = h;
    }
    return out;
}

}  // namespace detail

// Decodes alongside a ground-truth sequence: every previous-bit and
// previous-row input is taken from `target`, so the emitted probabilities
// are the model's conditionals at exactly the target's prefixes.
inline DecodeOutput decode_teacher_forced(Tape& t, const EncoderOutput& enc,
                                          const AdjVecSeq& target, const ModelParams& p) {
    validate(target);
    require(target.width == p.config.width, "decode: target width ", target.width,
            " does not match the model width ", p.config.width);
    return detail::decode_impl(t, enc, p, &target, target.rows.size(), p.config.threshold,
                               nullptr);
}

// Free-running decoding of an m-node output: each thresholded bit is fed
// back as the next edge input, and each completed hard row is re-encoded
// for the next node step. With `restrict_to`, bits it lacks are forced to
// zero before feedback (the probabilities stay raw).
inline DecodeOutput generate(Tape& t, const EncoderOutput& enc, std::size_t m,
                             const ModelParams& p, double threshold,
                             const AdjVecSeq* restrict_to = nullptr) {
    require(m >= 1, "generate: zero output nodes");
    require(m <= p.config.width, "generate: ", m, " nodes exceed the model width ",
            p.config.width);
    if (restrict_to)
        require(restrict_to->width == m, "generate: restriction width ", restrict_to->width,
                " does not match the ", m, "-node output");
    return detail::decode_impl(t, enc, p, nullptr, m - 1, threshold, restrict_to);
}

// The latent representation of a graph under reconstruction-mode params:
// the final forward node state of its canonical sequence.
inline std::vector<double> encode_latent(const Graph& g, const ModelParams& p) {
    require(p.config.encode_mode == EncodeMode::forward_only,
            "encode_latent: params are bidirectional, not reconstruction-mode");
    Tape t;
    const auto enc = encode(t, to_sequence(canonical_order(g), p.config.width), p);
    return enc.final_state->value.v;
}

struct PredictResult {
    Graph graph;                             // thresholded output, canonical input frame
    AdjVecSeq hard;
    std::vector<std::vector<double>> probs;  // row r holds r+1 edge probabilities
};

// Full pipeline on one graph: canonicalize, encode padded to the model
// width, free-run a same-size output, and lift it back to a graph. With
// `mask_to_input`, predicted edges absent from the input are dropped.
inline PredictResult run_model(const Graph& g_in, const ModelParams& p, double threshold,
                               bool mask_to_input = false) {
    validate(g_in);
    require(g_in.n >= 1, "run_model: empty graph");
    require(static_cast<std::size_t>(g_in.n) <= p.config.width, "run_model: ", g_in.n,
            " nodes exceed the model width ", p.config.width);
    const Graph canon = canonical_order(g_in);
    const std::size_t m = static_cast<std::size_t>(g_in.n);
    Tape t;
    const auto enc = encode(t, to_sequence(canon, p.config.width), p);
    const AdjVecSeq own_frame = to_sequence(canon, m);
    const auto dec =
        generate(t, enc, m, p, threshold, mask_to_input ? &own_frame : nullptr);
    PredictResult res;
    res.graph = from_sequence(dec.hard);
    res.graph.label = g_in.label;
    res.hard = dec.hard;
    res.probs = dec.probs;
    return res;
}

}  // namespace g2g
