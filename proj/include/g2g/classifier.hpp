#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "g2g/cells.hpp"
#include "g2g/dataset.hpp"
#include "g2g/train.hpp"

namespace g2g {

struct ClassifierConfig {
    std::size_t input_dim = 128;
    std::size_t hidden = 64;
    std::size_t classes = 2;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 0.003;
    std::uint64_t seed = 0;
};

inline void validate(const ClassifierConfig& c) {
    require(c.input_dim >= 1, "classifier config: input dim ", c.input_dim);
    require(c.hidden >= 1, "classifier config: hidden dim ", c.hidden);
    require(c.classes >= 2, "classifier config: ", c.classes, " classes");
    require(c.epochs >= 1, "classifier config: epochs ", c.epochs);
    require(c.batch_size >= 1, "classifier config: batch size ", c.batch_size);
    require(c.learning_rate >= 0.0, "classifier config: learning rate ", c.learning_rate);
}

// Two tanh hidden layers and a softmax class output over latent vectors.
struct ClassifierHead {
    std::size_t input_dim = 0, hidden = 0, classes = 0;
    Var w1, b1, w2, b2, w3, b3;

    ClassifierHead() = default;

    ClassifierHead(const ClassifierConfig& cfg, Rng& rng)
        : input_dim(cfg.input_dim), hidden(cfg.hidden), classes(cfg.classes) {
        w1 = init_weight(rng, {hidden, input_dim}, input_dim);
        b1 = init_weight(rng, {hidden}, input_dim);
        w2 = init_weight(rng, {hidden, hidden}, hidden);
        b2 = init_weight(rng, {hidden}, hidden);
        w3 = init_weight(rng, {classes, hidden}, hidden);
        b3 = init_weight(rng, {classes}, hidden);
    }

    Var forward(Tape& t, const Var& x) const {
        require(x->value.numel() == input_dim, "classifier: input has ", x->value.numel(),
                " features, head expects ", input_dim);
        const Var h1 = t.tanh(t.add(t.mm(w1, x), b1));
        const Var h2 = t.tanh(t.add(t.mm(w2, h1), b2));
        return t.softmax_lastdim(t.add(t.mm(w3, h2), b3));
    }

    // lowest index wins ties, so prediction is deterministic
    std::size_t predict(const std::vector<double>& x) const {
        Tape t;
        Tensor in({input_dim});
        require(x.size() == input_dim, "classifier: input has ", x.size(), " features, expects ",
                input_dim);
        in.v = x;
        const Var probs = forward(t, make_const(in));
        const auto& v = probs->value.v;
        return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    }

    ParamMap params() const {
        return {{"head.w1", w1}, {"head.b1", b1}, {"head.w2", w2},
                {"head.b2", b2}, {"head.w3", w3}, {"head.b3", b3}};
    }
};

struct LabeledVecs {
    std::vector<std::vector<double>> x;
    std::vector<int> y;

    std::size_t size() const { return x.size(); }
};

struct ClassifierRun {
    double best_accuracy = 0.0;
    std::size_t best_epoch = 0;  // 1-based; 0 for degenerate runs
    bool degenerate = false;     // single-class training set, nothing to fit
    std::vector<double> accuracy_history;
};

namespace detail {

inline double head_accuracy(const ClassifierHead& head, const LabeledVecs& eval) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < eval.size(); ++i)
        if (head.predict(eval.x[i]) == static_cast<std::size_t>(eval.y[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(eval.size());
}

}  // namespace detail

// Fits the head with Adam on mean cross-entropy and reports the best
// evaluation accuracy across epochs. A single-class training set is
// recorded as degenerate: the constant prediction it would justify is
// scored directly instead of being resampled or rejected.
inline ClassifierRun train_classifier(const LabeledVecs& train, const LabeledVecs& eval,
                                      const ClassifierConfig& cfg) {
    validate(cfg);
    require(!train.x.empty(), "classifier: empty training set");
    require(!eval.x.empty(), "classifier: empty evaluation set");
    require(train.x.size() == train.y.size(), "classifier: ", train.x.size(), " inputs for ",
            train.y.size(), " labels");
    require(eval.x.size() == eval.y.size(), "classifier: ", eval.x.size(), " inputs for ",
            eval.y.size(), " labels");
    for (int y : train.y)
        require(y >= 0 && static_cast<std::size_t>(y) < cfg.classes, "classifier: label ", y,
                " outside [0,", cfg.classes, ")");
    for (int y : eval.y)
        require(y >= 0 && static_cast<std::size_t>(y) < cfg.classes, "classifier: label ", y,
                " outside [0,", cfg.classes, ")");

    ClassifierRun run;
    const bool single_class =
        std::all_of(train.y.begin(), train.y.end(), [&](int y) { return y == train.y[0]; });
    if (single_class) {
        run.degenerate = true;
        std::size_t hits = 0;
        for (int y : eval.y)
            if (y == train.y[0]) ++hits;
        run.best_accuracy = static_cast<double>(hits) / static_cast<double>(eval.y.size());
        return run;
    }

    Rng rng(mix_seed(cfg.seed, 0x636C7366));
    ClassifierHead head(cfg, rng);
    const ParamMap pm = head.params();
    AdamState adam = AdamState::init(pm);

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(cfg.seed, 0x10000 + epoch));
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            Tape t;
            std::vector<Var> terms;
            for (std::size_t k = start; k < stop; ++k) {
                const std::size_t i = order[k];
                Tensor in({cfg.input_dim});
                require(train.x[i].size() == cfg.input_dim, "classifier: sample ", i, " has ",
                        train.x[i].size(), " features, expects ", cfg.input_dim);
                in.v = train.x[i];
                const Var probs = head.forward(t, make_const(in));
                const Var p_true =
                    t.clamp(t.at(probs, static_cast<std::size_t>(train.y[i])), 1e-12, 1.0);
                terms.push_back(t.scale(t.log(p_true), -1.0));
            }
            const Var loss = t.mean(t.concat(terms));
            t.backward(loss);
            adam_step(pm, adam, cfg.learning_rate);
            for (const auto& [name, p] : pm) zero_grad(p);
        }
        const double acc = detail::head_accuracy(head, eval);
        run.accuracy_history.push_back(acc);
        if (acc > run.best_accuracy || run.best_epoch == 0) {
            run.best_accuracy = acc;
            run.best_epoch = epoch;
        }
    }
    return run;
}

// One graph's exported latent features plus bookkeeping columns.
struct LatentRow {
    int graph_id = 0;
    std::string split;  // train / val / test
    int label = 0;
    std::vector<double> z;
};

struct LimitedRepeat {
    double fraction = 0.0;
    int repeat = 0;
    std::size_t subset_size = 0;
    bool degenerate = false;
    double accuracy = 0.0;
};

struct LimitedSummary {
    double fraction = 0.0;
    double mean_accuracy = 0.0;
    double stddev = 0.0;      // sample standard deviation over repeats
    double majority = 0.0;    // constant majority-class prediction, scored on test
};

struct LimitedStudy {
    std::vector<LimitedRepeat> repeats;
    std::vector<LimitedSummary> summaries;
};

// Limited-label protocol: for each fraction, repeatedly sample that share
// of the training rows, fit the head, and score on the test rows. The
// majority baseline predicts the full training split's most common label.
inline LimitedStudy limited_label_study(const std::vector<LatentRow>& rows,
                                        const std::vector<double>& fractions, int n_repeats,
                                        const ClassifierConfig& cfg) {
    validate(cfg);
    require(n_repeats >= 1, "limited study: ", n_repeats, " repeats");
    require(!fractions.empty(), "limited study: no fractions given");

    std::vector<int> train_ids;
    LabeledVecs test;
    std::vector<int> train_labels;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        require(rows[i].z.size() == cfg.input_dim, "limited study: row ", i, " has ",
                rows[i].z.size(), " features, expects ", cfg.input_dim);
        if (rows[i].split == "train") {
            train_ids.push_back(static_cast<int>(i));
            train_labels.push_back(rows[i].label);
        } else if (rows[i].split == "test") {
            test.x.push_back(rows[i].z);
            test.y.push_back(rows[i].label);
        }
    }
    require(!train_ids.empty(), "limited study: no training rows");
    require(!test.x.empty(), "limited study: no test rows");

    std::vector<std::size_t> counts(cfg.classes, 0);
    for (int y : train_labels) {
        require(y >= 0 && static_cast<std::size_t>(y) < cfg.classes, "limited study: label ", y,
                " outside [0,", cfg.classes, ")");
        counts[static_cast<std::size_t>(y)] += 1;
    }
    const int majority_class = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    std::size_t majority_hits = 0;
    for (int y : test.y)
        if (y == majority_class) ++majority_hits;
    const double majority = static_cast<double>(majority_hits) / static_cast<double>(test.y.size());

    const std::vector<SubsetPick> picks =
        limited_label_subsets(train_ids, fractions, n_repeats, cfg.seed);

    LimitedStudy study;
    std::vector<double> accs;
    double current_fraction = -1.0;
    const auto flush = [&] {
        if (accs.empty()) return;
        double mean = 0.0;
        for (double a : accs) mean += a;
        mean /= static_cast<double>(accs.size());
        double var = 0.0;
        for (double a : accs) var += (a - mean) * (a - mean);
        const double sd = accs.size() > 1
                              ? std::sqrt(var / static_cast<double>(accs.size() - 1))
                              : 0.0;
        study.summaries.push_back({current_fraction, mean, sd, majority});
        accs.clear();
    };
    for (const SubsetPick& pick : picks) {
        if (pick.fraction != current_fraction) {
            flush();
            current_fraction = pick.fraction;
        }
        LabeledVecs sub;
        for (int id : pick.indices) {
            sub.x.push_back(rows[static_cast<std::size_t>(id)].z);
            sub.y.push_back(rows[static_cast<std::size_t>(id)].label);
        }
        ClassifierConfig rep_cfg = cfg;
        rep_cfg.seed = pick.seed;
        const ClassifierRun run = train_classifier(sub, test, rep_cfg);
        study.repeats.push_back(
            {pick.fraction, pick.repeat, sub.size(), run.degenerate, run.best_accuracy});
        accs.push_back(run.best_accuracy);
    }
    flush();
    return study;
}

}  // namespace g2g
