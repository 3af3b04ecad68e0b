#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "g2g/dataset.hpp"
#include "g2g/loss.hpp"
#include "g2g/model.hpp"

namespace g2g {

enum class TaskKind { max_clique, autoencoder };

inline const char* to_string(TaskKind t) {
    return t == TaskKind::max_clique ? "max_clique" : "autoencoder";
}

inline TaskKind task_from(const std::string& s) {
    if (s == "max_clique") return TaskKind::max_clique;
    if (s == "autoencoder") return TaskKind::autoencoder;
    fail("unknown task '", s, "'");
}

struct TrainConfig {
    double learning_rate = 0.01;  // tuned over {0.01, 0.003}
    std::size_t batch_size = 64;  // tuned over {64, 128}
    std::size_t epochs = 100;
    double gamma = 2.0;
    std::uint64_t seed = 0;
    TaskKind task = TaskKind::max_clique;
    double threshold = 0.5;
    double clip_norm = 5.0;
};

inline void validate(const TrainConfig& c) {
    // zero is allowed so a no-op optimizer stays expressible
    require(c.learning_rate >= 0.0, "train config: learning rate ", c.learning_rate);
    require(c.batch_size >= 1, "train config: batch size ", c.batch_size);
    require(c.epochs >= 1, "train config: epochs ", c.epochs);
    require(c.gamma >= 0.0, "train config: gamma ", c.gamma);
    require(c.threshold >= 0.0 && c.threshold <= 1.0, "train config: threshold ", c.threshold);
    require(c.clip_norm > 0.0, "train config: clip norm ", c.clip_norm);
}

// Adam with bias correction; moment buffers are aligned index-for-index
// with the parameter map they were initialized from.
struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long long step = 0;
    std::vector<Tensor> m, v;

    static AdamState init(const ParamMap& params) {
        AdamState st;
        for (const auto& [name, p] : params) {
            st.m.emplace_back(p->value.shape);
            st.v.emplace_back(p->value.shape);
        }
        return st;
    }
};

inline double global_grad_norm(const ParamMap& params) {
    double sq = 0.0;
    for (const auto& [name, p] : params)
        for (double g : p->grad.v) sq += g * g;
    return std::sqrt(sq);
}

// Scales all gradients down so their global norm is at most max_norm.
inline double clip_gradients(const ParamMap& params, double max_norm) {
    require(max_norm > 0.0, "clip: max norm ", max_norm);
    const double norm = global_grad_norm(params);
    if (norm > max_norm) {
        const double s = max_norm / norm;
        for (const auto& [name, p] : params)
            for (double& g : p->grad.v) g *= s;
    }
    return norm;
}

inline void adam_step(const ParamMap& params, AdamState& st, double lr) {
    require(st.m.size() == params.size(), "adam: state tracks ", st.m.size(),
            " tensors, params have ", params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto& [name, p] = params[k];
        require(st.m[k].numel() == p->value.numel(), "adam: state/param shape drift at '", name,
                "'");
        for (double g : p->grad.v)
            require(std::isfinite(g), "adam: non-finite gradient in '", name,
                    "', aborting the step");
    }
    st.step += 1;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& p = params[k].second;
        for (std::size_t i = 0; i < p->value.numel(); ++i) {
            const double g = p->grad.v[i];
            st.m[k].v[i] = st.beta1 * st.m[k].v[i] + (1.0 - st.beta1) * g;
            st.v[k].v[i] = st.beta2 * st.v[k].v[i] + (1.0 - st.beta2) * g * g;
            const double mhat = st.m[k].v[i] / bc1;
            const double vhat = st.v[k].v[i] / bc2;
            p->value.v[i] -= lr * mhat / (std::sqrt(vhat) + st.eps);
        }
    }
}

// Copies parameter values into a freshly built set with the same config.
inline ModelParams clone_params(const ModelParams& p) {
    Rng scratch(0);
    ModelParams q(p.config, scratch);
    const ParamMap src = p.params();
    const ParamMap dst = q.params();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i].second->value = src[i].second->value;
    return q;
}

struct EpochMetrics {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double val_iou = 0.0;
};

struct TrainResult {
    ModelParams best;
    std::vector<EpochMetrics> history;
    std::size_t best_epoch = 0;  // 1-based epoch the returned params come from
};

struct EvalMetrics {
    double accuracy = 0.0;
    double mean_iou = 0.0;
    std::size_t count = 0;
};

namespace detail {

struct PreparedPair {
    AdjVecSeq input;   // padded to the model width
    AdjVecSeq target;  // same frame
    EdgeMask mask;
};

inline PreparedPair prepare_pair(const Dataset& ds, int idx, const ModelConfig& mcfg,
                                 TaskKind task) {
    PreparedPair pp;
    const Graph& g = ds.graphs[static_cast<std::size_t>(idx)];
    pp.input = to_sequence(g, mcfg.width);
    if (task == TaskKind::max_clique) {
        pp.target = to_sequence(ds.targets[static_cast<std::size_t>(idx)], mcfg.width);
        pp.mask = EdgeMask::input_edges(pp.input);
    } else {
        pp.target = pp.input;
        pp.mask = EdgeMask::all_pairs(mcfg.width);
    }
    return pp;
}

inline double pair_loss(Tape& t, const PreparedPair& pp, const ModelParams& params,
                        const TrainConfig& cfg, bool backprop) {
    const auto enc = encode(t, pp.input, params);
    const auto dec = decode_teacher_forced(t, enc, pp.target, params);
    FocalConfig fc;
    fc.gamma = cfg.gamma;
    const Var loss = focal_loss(t, dec.prob_rows, pp.target, pp.mask, fc);
    const double value = scalar_of(loss);
    if (backprop) t.backward(loss);
    return value;
}

}  // namespace detail

// Free-running evaluation over the given dataset positions: generate each
// graph's own node count, threshold, and score against the task's truth
// (the clique target, or the input itself for reconstruction). Graphs are
// used exactly as stored; the pipeline keeps them canonically ordered.
inline EvalMetrics evaluate(const ModelParams& params, const Dataset& ds,
                            const std::vector<int>& indices, const TrainConfig& cfg,
                            bool mask_to_input = false) {
    require(!indices.empty(), "evaluate: no graphs to score");
    if (cfg.task == TaskKind::max_clique)
        require(ds.has_pairs(), "evaluate: the dataset carries no targets");
    std::vector<Graph> preds, truths;
    double iou_sum = 0.0;
    for (int idx : indices) {
        const Graph& g = ds.graphs[static_cast<std::size_t>(idx)];
        const Graph& truth =
            cfg.task == TaskKind::max_clique ? ds.targets[static_cast<std::size_t>(idx)] : g;
        Tape t;
        const auto enc = encode(t, to_sequence(g, params.config.width), params);
        const std::size_t m = static_cast<std::size_t>(g.n);
        const AdjVecSeq own = to_sequence(g, m);
        const auto dec = generate(t, enc, m, params, cfg.threshold,
                                  mask_to_input ? &own : nullptr);
        preds.push_back(from_sequence(dec.hard));
        truths.push_back(truth);
        iou_sum += edge_iou(preds.back(), truth);
    }
    EvalMetrics out;
    out.count = indices.size();
    out.accuracy = exact_accuracy(preds, truths);
    out.mean_iou = iou_sum / static_cast<double>(indices.size());
    return out;
}

// Teacher-forced focal training with per-epoch validation. Gradients are
// accumulated per batch, clipped at a global norm, and applied with Adam.
// The returned parameters are the snapshot with the best validation loss
// (training loss stands in when the validation split is empty).
inline TrainResult train(const Dataset& ds, const ModelConfig& mcfg, const TrainConfig& cfg) {
    validate(mcfg);
    validate(cfg);
    require(!ds.splits.train.empty(), "train: empty training split");
    if (cfg.task == TaskKind::max_clique)
        require(ds.has_pairs(), "train: the clique task needs paired targets");
    require(ds.width <= mcfg.width, "train: dataset width ", ds.width, " exceeds the model's ",
            mcfg.width);

    std::vector<detail::PreparedPair> prepared(ds.graphs.size());
    std::vector<bool> have(ds.graphs.size(), false);
    const auto get = [&](int idx) -> const detail::PreparedPair& {
        if (!have[static_cast<std::size_t>(idx)]) {
            prepared[static_cast<std::size_t>(idx)] =
                detail::prepare_pair(ds, idx, mcfg, cfg.task);
            have[static_cast<std::size_t>(idx)] = true;
        }
        return prepared[static_cast<std::size_t>(idx)];
    };

    Rng init_rng(mix_seed(cfg.seed, 0x696E6974));
    ModelParams params(mcfg, init_rng);
    const ParamMap pm = params.params();
    AdamState adam = AdamState::init(pm);

    const std::vector<int>& val_ids =
        ds.splits.val.empty() ? ds.splits.train : ds.splits.val;

    TrainResult result;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<int> order = ds.splits.train;
        Rng shuffle_rng(mix_seed(cfg.seed, epoch));
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t in_batch = 0;
        const auto apply = [&] {
            clip_gradients(pm, cfg.clip_norm);
            adam_step(pm, adam, cfg.learning_rate);
            for (const auto& [name, p] : pm) zero_grad(p);
        };
        for (int idx : order) {
            Tape t;
            loss_sum += detail::pair_loss(t, get(idx), params, cfg, true);
            if (++in_batch == cfg.batch_size) {
                apply();
                in_batch = 0;
            }
        }
        if (in_batch > 0) apply();

        EpochMetrics em;
        em.epoch = epoch;
        em.train_loss = loss_sum / static_cast<double>(order.size());
        double val_sum = 0.0;
        for (int idx : val_ids) {
            Tape t;
            val_sum += detail::pair_loss(t, get(idx), params, cfg, false);
        }
        em.val_loss = val_sum / static_cast<double>(val_ids.size());
        const EvalMetrics ev = evaluate(params, ds, val_ids, cfg);
        em.val_accuracy = ev.accuracy;
        em.val_iou = ev.mean_iou;
        result.history.push_back(em);

        if (em.val_loss < best_val) {
            best_val = em.val_loss;
            result.best = clone_params(params);
            result.best_epoch = epoch;
        }
    }
    return result;
}

}  // namespace g2g
