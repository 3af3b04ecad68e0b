#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "g2g/loss.hpp"
#include "g2g/model.hpp"

using namespace g2g;

namespace {

ModelConfig tiny_config(std::size_t width) {
    ModelConfig c;
    c.width = width;
    c.edge_hidden = 4;
    c.node_hidden = 5;
    c.down_hidden = 3;
    c.emb_dim = 3;
    c.head_hidden = {6};
    c.attn_hidden = 8;
    return c;
}

Graph path4() {
    Graph g;
    g.n = 4;
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    return g;
}

Graph k4() {
    Graph g;
    g.n = 4;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < a; ++b) g.add_edge(a, b);
    return g;
}

AdjVecSeq random_seq(Rng& rng, std::size_t width, double p) {
    AdjVecSeq s = AdjVecSeq::zeros(width);
    for (auto& row : s.rows)
        for (auto& bit : row) bit = rng.bernoulli(p) ? 1 : 0;
    return s;
}

AdjVecSeq full_seq(std::size_t width) {
    AdjVecSeq s = AdjVecSeq::zeros(width);
    for (auto& row : s.rows)
        for (auto& bit : row) bit = 1;
    return s;
}

void zero_all(ModelParams& p) {
    for (auto& [name, v] : p.params())
        for (double& x : v->value.v) x = 0.0;
}

double tf_loss(const ModelParams& p, const AdjVecSeq& input, const AdjVecSeq& target,
               const EdgeMask& mask) {
    Tape t;
    const auto enc = encode(t, input, p);
    const auto dec = decode_teacher_forced(t, enc, target, p);
    return scalar_of(focal_loss(t, dec.prob_rows, target, mask));
}

// Finite-difference audit of the full pipeline loss against the recorded
// backward pass, probing a few entries of every parameter tensor.
void audit_gradients(const ModelConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    ModelParams p(cfg, rng);
    Rng data_rng(mix_seed(seed, 1));
    const AdjVecSeq input = random_seq(data_rng, cfg.width, 0.6);
    const AdjVecSeq target = random_seq(data_rng, cfg.width, 0.4);
    const EdgeMask mask = EdgeMask::all_pairs(cfg.width);

    Tape t;
    const auto enc = encode(t, input, p);
    const auto dec = decode_teacher_forced(t, enc, target, p);
    const Var loss = focal_loss(t, dec.prob_rows, target, mask);
    t.backward(loss);

    const double eps = 1e-5;
    for (auto& [name, v] : p.params()) {
        const std::size_t n = v->value.numel();
        std::vector<std::size_t> probes{0};
        if (n > 1) probes.push_back(n / 2);
        if (n > 2) probes.push_back(n - 1);
        for (std::size_t i : probes) {
            const double kept = v->value.v[i];
            v->value.v[i] = kept + eps;
            const double up = tf_loss(p, input, target, mask);
            v->value.v[i] = kept - eps;
            const double dn = tf_loss(p, input, target, mask);
            v->value.v[i] = kept;
            const double fd = (up - dn) / (2.0 * eps);
            const double an = v->grad.v[i];
            // the 1e-6 floor keeps cancellation noise in the central
            // difference (loss is O(1), so fd carries ~1e-11 of it) from
            // failing honestly-tiny gradients
            const double err =
                std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-6});
            INFO(name << "[" << i << "] fd=" << fd << " analytic=" << an);
            REQUIRE(err < 1e-4);
        }
        zero_grad(v);
    }
}

}  // namespace

TEST_CASE("encoder produces one hidden state per row") {
    Rng rng(1);
    ModelParams p(tiny_config(6), rng);
    Rng drng(2);
    const AdjVecSeq s = random_seq(drng, 6, 0.5);
    Tape t;
    const auto enc = encode(t, s, p);
    REQUIRE(enc.node_hidden.size() == 5);
    REQUIRE(enc.row_encoding.size() == 5);
    for (std::size_t r = 0; r < 5; ++r) {
        REQUIRE(enc.edge_hidden[r].size() == r + 1);
        REQUIRE(enc.node_hidden[r]->value.numel() == 10);  // both directions
        REQUIRE(enc.edge_hidden[r].back()->value.v == enc.row_encoding[r]->value.v);
    }
    // the decoder starts from the last position's joined state
    REQUIRE(enc.final_state->value.v == enc.node_hidden.back()->value.v);

    ModelConfig ae = autoencoder_config(6);
    ae.node_hidden = 5;
    ae.edge_hidden = 4;
    ae.down_hidden = 3;
    ae.emb_dim = 3;
    Rng rng2(3);
    ModelParams q(ae, rng2);
    Tape t2;
    const auto enc2 = encode(t2, s, q);
    REQUIRE(enc2.node_hidden[0]->value.numel() == 5);  // single direction
    REQUIRE(enc2.final_state->value.v == enc2.node_hidden.back()->value.v);
}

TEST_CASE("encoding rejects a width mismatch") {
    Rng rng(1);
    ModelParams p(tiny_config(6), rng);
    Tape t;
    REQUIRE_THROWS_WITH(encode(t, AdjVecSeq::zeros(5), p),
                        Catch::Matchers::ContainsSubstring("width"));
}

TEST_CASE("all-zero parameters give zero states and indifferent probabilities") {
    Rng rng(1);
    ModelParams p(tiny_config(5), rng);
    zero_all(p);
    Tape t;
    const auto enc = encode(t, AdjVecSeq::zeros(5), p);
    for (const auto& h : enc.node_hidden)
        for (double x : h->value.v) REQUIRE(x == 0.0);
    const auto dec = decode_teacher_forced(t, enc, AdjVecSeq::zeros(5), p);
    for (const auto& row : dec.probs)
        for (double x : row) REQUIRE(x == 0.5);
}

TEST_CASE("the whole pipeline is deterministic") {
    Rng rng(7);
    ModelParams p(tiny_config(6), rng);
    Rng drng(8);
    const AdjVecSeq s = random_seq(drng, 6, 0.5);
    const AdjVecSeq y = random_seq(drng, 6, 0.3);
    std::vector<std::vector<double>> first, second;
    {
        Tape t;
        first = decode_teacher_forced(t, encode(t, s, p), y, p).probs;
    }
    {
        Tape t;
        second = decode_teacher_forced(t, encode(t, s, p), y, p).probs;
    }
    REQUIRE(first == second);
}

TEST_CASE("structurally different graphs get different encodings") {
    Rng rng(5);
    ModelParams p(tiny_config(4), rng);
    Tape t;
    const auto a = encode(t, to_sequence(canonical_order(path4()), 4), p);
    const auto b = encode(t, to_sequence(canonical_order(k4()), 4), p);
    REQUIRE(a.final_state->value.v != b.final_state->value.v);
}

TEST_CASE("teacher-forced output aligns with the target shape") {
    Rng rng(9);
    ModelParams p(tiny_config(7), rng);
    Rng drng(10);
    const AdjVecSeq s = random_seq(drng, 7, 0.5);
    const AdjVecSeq y = random_seq(drng, 7, 0.4);
    Tape t;
    const auto dec = decode_teacher_forced(t, encode(t, s, p), y, p);
    REQUIRE(dec.prob_rows.size() == 6);
    REQUIRE(dec.hard.width == 7);
    for (std::size_t r = 0; r < 6; ++r) {
        REQUIRE(dec.prob_rows[r]->value.numel() == r + 1);
        for (double x : dec.probs[r]) {
            REQUIRE(x > 0.0);
            REQUIRE(x < 1.0);
        }
    }
}

TEST_CASE("a saturated head pushes every probability to one") {
    Rng rng(11);
    ModelParams p(tiny_config(5), rng);
    for (auto& [name, v] : p.params())
        if (name == "dec.head.b1")
            for (double& x : v->value.v) x = 40.0;
    Rng drng(12);
    const AdjVecSeq s = random_seq(drng, 5, 0.5);
    Tape t;
    const auto dec = decode_teacher_forced(t, encode(t, s, p), s, p);
    for (const auto& row : dec.probs)
        for (double x : row) REQUIRE(x > 0.999);
    // the thresholded sequence is then the complete graph
    REQUIRE(dec.hard == full_seq(5));
}

TEST_CASE("a single-node width decodes to nothing") {
    ModelConfig c = tiny_config(1);
    Rng rng(13);
    ModelParams p(c, rng);
    Tape t;
    const auto enc = encode(t, AdjVecSeq::zeros(1), p);
    REQUIRE(enc.node_hidden.empty());
    const auto dec = decode_teacher_forced(t, enc, AdjVecSeq::zeros(1), p);
    REQUIRE(dec.prob_rows.empty());
    REQUIRE(dec.probs.empty());
}

TEST_CASE("loss gradients survive a finite-difference audit end to end") {
    SECTION("bidirectional with learned attention at both levels") {
        audit_gradients(tiny_config(5), 101);
    }
    SECTION("fixed attention at both levels") {
        ModelConfig c = tiny_config(5);
        c.node_context = ContextMode::fixed;
        c.edge_context = ContextMode::fixed;
        audit_gradients(c, 102);
    }
    SECTION("reconstruction mode") {
        ModelConfig c = tiny_config(5);
        c.encode_mode = EncodeMode::forward_only;
        c.node_context = ContextMode::final_state;
        c.edge_context = ContextMode::zeros;
        audit_gradients(c, 103);
    }
    SECTION("attention over every row's edge states") {
        ModelConfig c = tiny_config(5);
        c.full_edge_keys = true;
        audit_gradients(c, 104);
    }
    SECTION("disabled contexts") {
        ModelConfig c = tiny_config(5);
        c.node_context = ContextMode::zeros;
        c.edge_context = ContextMode::zeros;
        audit_gradients(c, 105);
    }
}

TEST_CASE("conditional probabilities multiply to the sequence likelihood") {
    Rng rng(21);
    ModelParams p(tiny_config(6), rng);
    Rng drng(22);
    const AdjVecSeq s = random_seq(drng, 6, 0.5);
    const AdjVecSeq y = random_seq(drng, 6, 0.4);
    Tape t;
    const auto dec = decode_teacher_forced(t, encode(t, s, p), y, p);
    double product = 1.0;
    for (std::size_t r = 0; r < dec.probs.size(); ++r)
        for (std::size_t e = 0; e <= r; ++e) {
            const double o = dec.probs[r][e];
            product *= y.at(r, e) ? o : 1.0 - o;
        }
    FocalConfig plain;
    plain.gamma = 0.0;
    const double ce =
        scalar_of(focal_loss(t, dec.prob_rows, y, EdgeMask::all_pairs(6), plain));
    REQUIRE(product == Catch::Approx(std::exp(-ce)).epsilon(1e-10));
}

TEST_CASE("free-running extremes produce the complete and the empty graph") {
    Rng rng(31);
    ModelParams p(tiny_config(6), rng);
    Rng drng(32);
    const AdjVecSeq s = random_seq(drng, 6, 0.5);
    Tape t;
    const auto enc = encode(t, s, p);
    const auto full = generate(t, enc, 6, p, 0.0);
    REQUIRE(full.hard == full_seq(6));
    const auto empty = generate(t, enc, 6, p, 1.0);
    REQUIRE(empty.hard == AdjVecSeq::zeros(6));
    REQUIRE(empty.prob_rows.size() == 5);

    const auto smaller = generate(t, enc, 4, p, 0.5);
    REQUIRE(smaller.hard.width == 4);
    REQUIRE_THROWS_WITH(generate(t, enc, 7, p, 0.5),
                        Catch::Matchers::ContainsSubstring("width"));
}

TEST_CASE("generation can be restricted to the input's edges") {
    Rng rng(41);
    ModelParams p(tiny_config(6), rng);
    Rng drng(42);
    const AdjVecSeq input = random_seq(drng, 6, 0.5);
    Tape t;
    const auto enc = encode(t, input, p);
    const auto dec = generate(t, enc, 6, p, 0.0, &input);
    // probability 1 everywhere, so the output is exactly the allowed set
    REQUIRE(dec.hard == input);
}

TEST_CASE("hard output is the thresholded probabilities") {
    Rng rng(51);
    ModelParams p(tiny_config(6), rng);
    Rng drng(52);
    const AdjVecSeq s = random_seq(drng, 6, 0.5);
    Tape t;
    const auto enc = encode(t, s, p);
    const double thr = 0.5;
    const auto dec = generate(t, enc, 6, p, thr);
    for (std::size_t r = 0; r < dec.probs.size(); ++r)
        for (std::size_t e = 0; e <= r; ++e)
            REQUIRE(static_cast<int>(dec.hard.at(r, e)) == (dec.probs[r][e] > thr ? 1 : 0));
}

TEST_CASE("latents come from the forward encoder's last state") {
    ModelConfig c = autoencoder_config(6);
    c.node_hidden = 7;
    c.edge_hidden = 4;
    c.down_hidden = 3;
    c.emb_dim = 3;
    Rng rng(61);
    ModelParams p(c, rng);
    Graph g = path4();
    const auto lat = encode_latent(g, p);
    REQUIRE(lat.size() == 7);
    REQUIRE(encode_latent(g, p) == lat);

    Tape t;
    const auto enc = encode(t, to_sequence(canonical_order(g), 6), p);
    REQUIRE(enc.final_state->value.v == lat);

    Rng rng2(62);
    ModelParams bidi(tiny_config(6), rng2);
    REQUIRE_THROWS_WITH(encode_latent(g, bidi),
                        Catch::Matchers::ContainsSubstring("bidirectional"));
}

TEST_CASE("the default latent size is 128") {
    ModelConfig c = autoencoder_config(6);
    Rng rng(63);
    ModelParams p(c, rng);
    REQUIRE(encode_latent(path4(), p).size() == 128);
}

TEST_CASE("reconstruction mode drops the reverse cell and the attention nets") {
    ModelConfig bidi = tiny_config(6);
    ModelConfig ae = bidi;
    ae.encode_mode = EncodeMode::forward_only;
    ae.node_context = ContextMode::final_state;
    ae.edge_context = ContextMode::zeros;
    Rng r1(71), r2(72);
    const ModelParams a(bidi, r1);
    const ModelParams b(ae, r2);
    REQUIRE(b.param_count() < a.param_count());

    ModelConfig fixed = bidi;
    fixed.node_context = ContextMode::fixed;
    fixed.edge_context = ContextMode::fixed;
    Rng r3(73);
    const ModelParams f(fixed, r3);
    REQUIRE(f.param_count() < a.param_count());
}

TEST_CASE("whole-graph prediction keeps the node count") {
    Rng rng(81);
    ModelParams p(tiny_config(8), rng);
    Rng drng(82);
    Graph g;
    g.n = 6;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < a; ++b)
            if (drng.bernoulli(0.5)) g.add_edge(a, b);
    const auto res = run_model(g, p, 0.5);
    REQUIRE(res.graph.n == 6);
    validate(res.graph);
    REQUIRE(res.hard.width == 6);
    REQUIRE(res.probs.size() == 5);

    // masked to the input at threshold zero: exactly the canonical input
    const auto masked = run_model(g, p, 0.0, true);
    REQUIRE(masked.graph == canonical_order(g));
}

TEST_CASE("prediction rejects graphs beyond the model width") {
    Rng rng(83);
    ModelParams p(tiny_config(4), rng);
    Graph g;
    g.n = 5;
    REQUIRE_THROWS_WITH(run_model(g, p, 0.5), Catch::Matchers::ContainsSubstring("width"));
}

TEST_CASE("config validation rejects ill-formed setups") {
    ModelConfig c = tiny_config(0);
    REQUIRE_THROWS(validate(c));
    c = tiny_config(5);
    c.edge_context = ContextMode::final_state;
    REQUIRE_THROWS_WITH(validate(c), Catch::Matchers::ContainsSubstring("node level"));
    c = tiny_config(5);
    c.threshold = 1.5;
    REQUIRE_THROWS(validate(c));
}
