#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "g2g/checkpoint.hpp"
#include "g2g/train.hpp"

using namespace g2g;

namespace {

ModelConfig small_model(std::size_t width) {
    ModelConfig c;
    c.width = width;
    c.edge_hidden = 6;
    c.node_hidden = 8;
    c.down_hidden = 4;
    c.emb_dim = 4;
    c.head_hidden = {8};
    c.attn_hidden = 8;
    c.node_context = ContextMode::fixed;
    c.edge_context = ContextMode::fixed;
    return c;
}

TrainConfig quick_train(std::size_t epochs, std::uint64_t seed) {
    TrainConfig c;
    c.learning_rate = 0.01;
    c.batch_size = 8;
    c.epochs = epochs;
    c.seed = seed;
    return c;
}

Dataset clique_ds(int count, std::uint64_t seed) {
    Dataset ds = gen_planted_clique(count, 6, 8, 3, 4, 0.15, seed);
    split(ds, 0.75, 0.25, 0.0, seed);
    return ds;
}

Dataset single_pair_ds() {
    Graph g;
    g.n = 5;
    g.add_edge(0, 1);
    g.add_edge(0, 2);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    g.add_edge(3, 4);
    Dataset ds;
    ds.name = "memorize";
    ds.task = "max_clique";
    ds.width = 5;
    ds.graphs = {g};
    ds.targets = {max_clique_oracle(g)};
    ds.splits.train = {0};
    return ds;
}

ParamMap single_param(double value, double grad) {
    Tensor t({1});
    t.v[0] = value;
    Var w = make_leaf(t, true);
    w->grad.v[0] = grad;
    return ParamMap{{"w", w}};
}

bool same_values(const ModelParams& a, const ModelParams& b) {
    const ParamMap pa = a.params(), pb = b.params();
    if (pa.size() != pb.size()) return false;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (pa[i].first != pb[i].first) return false;
        if (pa[i].second->value.v != pb[i].second->value.v) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("adam leaves parameters alone when all gradients are zero") {
    Rng rng(11);
    ModelParams p(small_model(5), rng);
    const ParamMap pm = p.params();
    const ModelParams before = clone_params(p);
    AdamState st = AdamState::init(pm);
    adam_step(pm, st, 0.01);
    CHECK(st.step == 1);
    CHECK(same_values(p, before));
}

TEST_CASE("adam moments decay toward zero on zero gradients") {
    ParamMap pm = single_param(1.0, 0.0);
    AdamState st = AdamState::init(pm);
    st.m[0].v[0] = 0.5;
    st.v[0].v[0] = 0.25;
    adam_step(pm, st, 0.01);
    CHECK(st.m[0].v[0] == Catch::Approx(0.45).epsilon(1e-12));
    CHECK(st.v[0].v[0] == Catch::Approx(0.25 * 0.999).epsilon(1e-12));
}

TEST_CASE("first adam step moves by the learning rate against the gradient sign") {
    for (double g : {0.7, -0.003, 12.0}) {
        ParamMap pm = single_param(0.3, g);
        AdamState st = AdamState::init(pm);
        adam_step(pm, st, 0.01);
        const double moved = pm[0].second->value.v[0] - 0.3;
        CHECK(std::abs(moved - (g > 0 ? -0.01 : 0.01)) < 1e-6);
    }
}

TEST_CASE("adam rejects non-finite gradients with the parameter name") {
    ParamMap pm = single_param(0.0, std::nan(""));
    AdamState st = AdamState::init(pm);
    CHECK_THROWS_WITH(adam_step(pm, st, 0.01),
                      Catch::Matchers::ContainsSubstring("non-finite") &&
                          Catch::Matchers::ContainsSubstring("'w'"));
}

TEST_CASE("adam with a zero learning rate records moments but moves nothing") {
    ParamMap pm = single_param(0.3, 0.7);
    AdamState st = AdamState::init(pm);
    adam_step(pm, st, 0.0);
    CHECK(pm[0].second->value.v[0] == 0.3);
    CHECK(st.m[0].v[0] != 0.0);
}

TEST_CASE("gradient clipping rescales only past the limit") {
    Tensor t({2});
    Var w = make_leaf(t, true);
    w->grad.v = {3.0, 4.0};
    ParamMap pm{{"w", w}};
    CHECK(clip_gradients(pm, 10.0) == Catch::Approx(5.0));
    CHECK(w->grad.v[0] == 3.0);
    CHECK(clip_gradients(pm, 2.5) == Catch::Approx(5.0));
    CHECK(w->grad.v[0] == Catch::Approx(1.5));
    CHECK(w->grad.v[1] == Catch::Approx(2.0));
    CHECK(global_grad_norm(pm) == Catch::Approx(2.5));
}

TEST_CASE("training memorizes a single pair and regenerates it free-running") {
    const Dataset ds = single_pair_ds();
    const ModelConfig mc = small_model(5);
    TrainConfig tc = quick_train(500, 21);
    tc.batch_size = 1;
    const TrainResult r = train(ds, mc, tc);
    REQUIRE(r.history.size() == 500);
    double best_loss = r.history.front().train_loss;
    for (const auto& em : r.history) best_loss = std::min(best_loss, em.train_loss);
    CHECK(best_loss < 1e-2);
    const EvalMetrics ev = evaluate(r.best, ds, ds.splits.train, tc);
    CHECK(ev.accuracy == 1.0);
    CHECK(ev.mean_iou == 1.0);
}

TEST_CASE("training loss drops from the first epoch to the tenth") {
    const Dataset ds = clique_ds(24, 3);
    const TrainResult r = train(ds, small_model(8), quick_train(10, 5));
    REQUIRE(r.history.size() == 10);
    CHECK(r.history.back().train_loss < r.history.front().train_loss);
}

TEST_CASE("identical seeds give bit-identical trajectories") {
    const Dataset ds = clique_ds(16, 9);
    const ModelConfig mc = small_model(8);
    const TrainConfig tc = quick_train(3, 17);
    const TrainResult a = train(ds, mc, tc);
    const TrainResult b = train(ds, mc, tc);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].train_loss == b.history[i].train_loss);
        CHECK(a.history[i].val_loss == b.history[i].val_loss);
        CHECK(a.history[i].val_accuracy == b.history[i].val_accuracy);
        CHECK(a.history[i].val_iou == b.history[i].val_iou);
    }
    CHECK(a.best_epoch == b.best_epoch);
    CHECK(same_values(a.best, b.best));
}

TEST_CASE("zero learning rate leaves the model untouched across epochs") {
    const Dataset ds = clique_ds(8, 13);
    TrainConfig tc = quick_train(2, 1);
    tc.learning_rate = 0.0;
    const TrainResult r = train(ds, small_model(8), tc);
    CHECK(r.history[0].train_loss == r.history[1].train_loss);
    CHECK(r.history[0].val_loss == r.history[1].val_loss);
}

TEST_CASE("history covers every epoch and the best epoch is inside it") {
    const Dataset ds = clique_ds(10, 29);
    const TrainResult r = train(ds, small_model(8), quick_train(4, 2));
    REQUIRE(r.history.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r.history[i].epoch == i + 1);
    CHECK(r.best_epoch >= 1);
    CHECK(r.best_epoch <= 4);
    double best = r.history.front().val_loss;
    for (const auto& em : r.history) best = std::min(best, em.val_loss);
    CHECK(r.history[r.best_epoch - 1].val_loss == best);
}

TEST_CASE("a reloaded checkpoint evaluates bit-identically") {
    const Dataset ds = clique_ds(12, 31);
    const TrainConfig tc = quick_train(2, 4);
    const TrainResult r = train(ds, small_model(8), tc);
    const std::string path = "train_ckpt_roundtrip.bin";
    save_checkpoint(r.best, path);
    const ModelParams loaded = load_checkpoint(path);
    std::remove(path.c_str());
    const EvalMetrics a = evaluate(r.best, ds, ds.splits.val, tc);
    const EvalMetrics b = evaluate(loaded, ds, ds.splits.val, tc);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.mean_iou == b.mean_iou);
    CHECK(a.count == b.count);
}

TEST_CASE("training requires a train split and clique targets") {
    Dataset ds = clique_ds(8, 41);
    Dataset no_train = ds;
    no_train.splits.train.clear();
    CHECK_THROWS_WITH(train(no_train, small_model(8), quick_train(1, 0)),
                      Catch::Matchers::ContainsSubstring("empty training split"));
    Dataset no_targets = ds;
    no_targets.targets.clear();
    CHECK_THROWS_WITH(train(no_targets, small_model(8), quick_train(1, 0)),
                      Catch::Matchers::ContainsSubstring("targets"));
}

TEST_CASE("evaluating an untrained model stays within metric bounds") {
    const Dataset ds = clique_ds(10, 53);
    Rng rng(3);
    const ModelParams p(small_model(8), rng);
    const TrainConfig tc = quick_train(1, 0);
    const EvalMetrics a = evaluate(p, ds, ds.splits.train, tc);
    const EvalMetrics b = evaluate(p, ds, ds.splits.train, tc);
    CHECK(a.accuracy >= 0.0);
    CHECK(a.accuracy <= 1.0);
    CHECK(a.mean_iou >= 0.0);
    CHECK(a.mean_iou <= 1.0);
    CHECK(a.count == ds.splits.train.size());
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.mean_iou == b.mean_iou);
}

TEST_CASE("masked evaluation only ever keeps input edges") {
    const Dataset ds = clique_ds(10, 61);
    Rng rng(5);
    const ModelParams p(small_model(8), rng);
    TrainConfig tc = quick_train(1, 0);
    tc.threshold = 0.0;  // force every unmasked bit on
    for (int idx : ds.splits.train) {
        const Graph& g = ds.graphs[static_cast<std::size_t>(idx)];
        Tape t;
        const auto enc = encode(t, to_sequence(g, p.config.width), p);
        const AdjVecSeq own = to_sequence(g, static_cast<std::size_t>(g.n));
        const auto dec = generate(t, enc, static_cast<std::size_t>(g.n), p, 0.0, &own);
        const Graph pred = from_sequence(dec.hard);
        CHECK(pred == g);
    }
    // threshold 0 + mask reproduces the input, so the score against the
    // clique targets is exactly the input/target overlap
    double expected = 0.0;
    for (int idx : ds.splits.train)
        expected += edge_iou(ds.graphs[static_cast<std::size_t>(idx)],
                             ds.targets[static_cast<std::size_t>(idx)]);
    expected /= static_cast<double>(ds.splits.train.size());
    const EvalMetrics ev = evaluate(p, ds, ds.splits.train, tc, true);
    CHECK(ev.mean_iou == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("the reconstruction task trains without paired targets") {
    Dataset ds = gen_two_class(10, 6, 8, 3, 4, 0.15, 71);
    split(ds, 0.8, 0.2, 0.0, 71);
    ModelConfig mc = autoencoder_config(8);
    mc.node_hidden = 10;
    mc.edge_hidden = 6;
    mc.down_hidden = 4;
    mc.emb_dim = 4;
    mc.head_hidden = {8};
    TrainConfig tc = quick_train(3, 19);
    tc.task = TaskKind::autoencoder;
    const TrainResult r = train(ds, mc, tc);
    REQUIRE(r.history.size() == 3);
    const EvalMetrics ev = evaluate(r.best, ds, ds.splits.val, tc);
    CHECK(ev.count == ds.splits.val.size());
    CHECK(ev.mean_iou >= 0.0);
    CHECK(ev.mean_iou <= 1.0);
}

TEST_CASE("train config validation rejects bad values") {
    TrainConfig c;
    c.learning_rate = -0.1;
    CHECK_THROWS(validate(c));
    c = TrainConfig{};
    c.batch_size = 0;
    CHECK_THROWS(validate(c));
    c = TrainConfig{};
    c.epochs = 0;
    CHECK_THROWS(validate(c));
    c = TrainConfig{};
    c.gamma = -1.0;
    CHECK_THROWS(validate(c));
    c = TrainConfig{};
    c.threshold = 1.5;
    CHECK_THROWS(validate(c));
    c = TrainConfig{};
    CHECK_NOTHROW(validate(c));
    CHECK(task_from("max_clique") == TaskKind::max_clique);
    CHECK(task_from("autoencoder") == TaskKind::autoencoder);
    CHECK_THROWS(task_from("regression"));
}
