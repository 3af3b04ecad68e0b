#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "g2g/clique.hpp"
#include "g2g/graph.hpp"

namespace g2g {

struct SplitIndices {
    std::vector<int> train, val, test;
};

// A corpus of canonically ordered graphs, optionally paired with aligned
// target graphs (same node frame as their inputs) and split indices.
struct Dataset {
    std::string name;
    std::string task;  // "max_clique", "two_class", "tu_import"
    std::size_t width = 0;
    std::uint64_t seed = 0;
    std::vector<Graph> graphs;
    std::vector<Graph> targets;  // empty unless the task is pair-supervised
    SplitIndices splits;

    bool has_pairs() const { return !targets.empty(); }

    void refresh_width() {
        width = 0;
        for (const auto& g : graphs) width = std::max(width, static_cast<std::size_t>(g.n));
    }
};

inline void validate(const Dataset& ds) {
    require(!ds.targets.empty() ? ds.targets.size() == ds.graphs.size() : true,
            "dataset: ", ds.targets.size(), " targets for ", ds.graphs.size(), " graphs");
    for (const auto& g : ds.graphs) {
        validate(g);
        require(static_cast<std::size_t>(g.n) <= ds.width, "dataset: graph with ", g.n,
                " nodes exceeds width ", ds.width);
    }
    for (const auto& t : ds.targets) validate(t);
    for (const auto* part : {&ds.splits.train, &ds.splits.val, &ds.splits.test})
        for (int idx : *part)
            require(idx >= 0 && static_cast<std::size_t>(idx) < ds.graphs.size(),
                    "dataset: split index ", idx, " outside [0,", ds.graphs.size(), ")");
}

// Planted-clique pairs: input = ER(n, edge_prob) overlaid with a clique on
// random nodes, canonically ordered; target = the exact maximum clique of
// that input (the plant can be superseded by background noise).
inline Dataset gen_planted_clique(int count, int n_min, int n_max, int clique_min,
                                  int clique_max, double edge_prob, std::uint64_t seed) {
    require(count >= 0, "gen: negative count");
    require(3 <= clique_min, "gen: planted cliques below 3 nodes are excluded, got ",
            clique_min);
    require(clique_min <= clique_max, "gen: clique range [", clique_min, ",", clique_max, "]");
    require(clique_max <= n_min, "gen: clique size ", clique_max,
            " cannot exceed the smallest graph ", n_min);
    require(n_min <= n_max, "gen: node range [", n_min, ",", n_max, "]");
    require(edge_prob >= 0.0 && edge_prob <= 1.0, "gen: edge_prob ", edge_prob);
    Dataset ds;
    ds.name = "planted-clique";
    ds.task = "max_clique";
    ds.seed = seed;
    Rng rng(mix_seed(seed, 0x67656E31));
    for (int i = 0; i < count; ++i) {
        const int n = static_cast<int>(rng.uniform_int(n_min, n_max));
        const int k = static_cast<int>(rng.uniform_int(clique_min, clique_max));
        Graph raw;
        raw.n = n;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < a; ++b)
                if (rng.bernoulli(edge_prob)) raw.add_edge(a, b);
        const auto members = rng.sample(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = 0; b < a; ++b)
                raw.add_edge(static_cast<int>(members[a]), static_cast<int>(members[b]));
        const Graph input = canonical_order(raw);
        ds.graphs.push_back(input);
        ds.targets.push_back(max_clique_oracle(input));
    }
    ds.refresh_width();
    return ds;
}

// Two-class corpus: label 1 graphs carry a planted clique, label 0 graphs
// are pure background noise. Intended for unsupervised pretraining plus
// low-label classification.
inline Dataset gen_two_class(int count, int n_min, int n_max, int clique_min, int clique_max,
                             double edge_prob, std::uint64_t seed) {
    require(count >= 0, "gen: negative count");
    require(3 <= clique_min && clique_min <= clique_max && clique_max <= n_min &&
                n_min <= n_max,
            "gen: bad ranges n [", n_min, ",", n_max, "], clique [", clique_min, ",",
            clique_max, "]");
    require(edge_prob >= 0.0 && edge_prob <= 1.0, "gen: edge_prob ", edge_prob);
    Dataset ds;
    ds.name = "two-class";
    ds.task = "two_class";
    ds.seed = seed;
    Rng rng(mix_seed(seed, 0x67656E32));
    for (int i = 0; i < count; ++i) {
        const int n = static_cast<int>(rng.uniform_int(n_min, n_max));
        const bool planted = rng.bernoulli(0.5);
        Graph raw;
        raw.n = n;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < a; ++b)
                if (rng.bernoulli(edge_prob)) raw.add_edge(a, b);
        if (planted) {
            const int k = static_cast<int>(rng.uniform_int(clique_min, clique_max));
            const auto members =
                rng.sample(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = 0; b < a; ++b)
                    raw.add_edge(static_cast<int>(members[a]), static_cast<int>(members[b]));
        }
        Graph input = canonical_order(raw);
        input.label = planted ? 1 : 0;
        ds.graphs.push_back(std::move(input));
    }
    ds.refresh_width();
    return ds;
}

// Drops graphs above the node cap (paired targets go with them).
inline void filter_max_nodes(Dataset& ds, int cap) {
    require(cap >= 1, "filter: node cap ", cap);
    std::vector<Graph> graphs, targets;
    for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
        if (ds.graphs[i].n > cap) continue;
        graphs.push_back(ds.graphs[i]);
        if (ds.has_pairs()) targets.push_back(ds.targets[i]);
    }
    ds.graphs = std::move(graphs);
    ds.targets = std::move(targets);
    ds.refresh_width();
}

// Seeded shuffle, then contiguous assignment with cumulative rounding so
// every split size is within one graph of its exact fraction.
inline void split(Dataset& ds, double f_train, double f_val, double f_test,
                  std::uint64_t seed) {
    require(!ds.graphs.empty(), "split: empty dataset");
    const double sum = f_train + f_val + f_test;
    require(std::fabs(sum - 1.0) < 1e-9, "split: fractions sum to ", sum);
    require(f_train >= 0.0 && f_val >= 0.0 && f_test >= 0.0, "split: negative fraction");
    std::vector<int> idx(ds.graphs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    Rng rng(mix_seed(seed, 0x73706C69));
    rng.shuffle(idx);
    const double n = static_cast<double>(idx.size());
    const auto b1 = static_cast<std::size_t>(std::llround(f_train * n));
    const auto b2 = static_cast<std::size_t>(std::llround((f_train + f_val) * n));
    ds.splits.train.assign(idx.begin(), idx.begin() + static_cast<long>(b1));
    ds.splits.val.assign(idx.begin() + static_cast<long>(b1), idx.begin() + static_cast<long>(b2));
    ds.splits.test.assign(idx.begin() + static_cast<long>(b2), idx.end());
}

// One labeled subset draw: which training positions may keep their labels.
struct SubsetPick {
    double fraction = 1.0;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::vector<int> indices;
};

// For each fraction and repeat, a seeded subset of the training indices of
// size max(1, round(fraction * |train|)); fraction 1 is the identity.
inline std::vector<SubsetPick> limited_label_subsets(const std::vector<int>& train,
                                                     const std::vector<double>& fractions,
                                                     int repeats, std::uint64_t seed) {
    require(repeats >= 1, "subsets: repeats ", repeats);
    std::vector<SubsetPick> out;
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
        const double f = fractions[fi];
        require(f > 0.0 && f <= 1.0, "subsets: fraction ", f, " outside (0,1]");
        for (int rep = 0; rep < repeats; ++rep) {
            SubsetPick pick;
            pick.fraction = f;
            pick.repeat = rep;
            pick.seed = mix_seed(seed, 1000 * fi + static_cast<std::uint64_t>(rep));
            if (f == 1.0) {
                pick.indices = train;
            } else {
                const auto want = static_cast<std::size_t>(std::max<long long>(
                    1, std::llround(f * static_cast<double>(train.size()))));
                Rng rng(pick.seed);
                const auto pos = rng.sample(train.size(), std::min(want, train.size()));
                for (std::size_t p : pos) pick.indices.push_back(train[p]);
            }
            out.push_back(std::move(pick));
        }
    }
    return out;
}

// ---- serialization ----

namespace detail {

inline nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["n"] = g.n;
    auto edges = nlohmann::json::array();
    for (const auto& [a, b] : g.edges) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    if (g.label)
        j["label"] = *g.label;
    else
        j["label"] = nullptr;
    return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
    Graph g;
    g.n = j.at("n").get<int>();
    for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    if (j.contains("label") && !j.at("label").is_null()) g.label = j.at("label").get<int>();
    return g;
}

}  // namespace detail

// Writes <dir>/dataset.json plus pairs.jsonl (pair-supervised) or
// graphs.jsonl (plain), one JSON object per line.
inline void write_dataset(const Dataset& ds, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string file = ds.has_pairs() ? "pairs.jsonl" : "graphs.jsonl";
    std::ofstream out(fs::path(dir) / file);
    require(out.good(), "dataset: cannot write into ", dir);
    for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
        nlohmann::json j;
        if (ds.has_pairs()) {
            j["input"] = detail::graph_to_json(ds.graphs[i]);
            j["target"] = detail::graph_to_json(ds.targets[i]);
        } else {
            j = detail::graph_to_json(ds.graphs[i]);
        }
        out << j.dump() << "\n";
    }
    nlohmann::json meta;
    meta["name"] = ds.name;
    meta["task"] = ds.task;
    meta["width"] = ds.width;
    meta["seed"] = ds.seed;
    meta["count"] = ds.graphs.size();
    meta["file"] = file;
    meta["splits"]["train"] = ds.splits.train;
    meta["splits"]["val"] = ds.splits.val;
    meta["splits"]["test"] = ds.splits.test;
    std::ofstream mf(fs::path(dir) / "dataset.json");
    mf << meta.dump(2) << "\n";
}

inline Dataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream mf(fs::path(dir) / "dataset.json");
    require(mf.good(), "dataset: missing ", (fs::path(dir) / "dataset.json").string());
    nlohmann::json meta = nlohmann::json::parse(mf);
    Dataset ds;
    ds.name = meta.at("name").get<std::string>();
    ds.task = meta.at("task").get<std::string>();
    ds.width = meta.at("width").get<std::size_t>();
    ds.seed = meta.at("seed").get<std::uint64_t>();
    const std::string file = meta.at("file").get<std::string>();
    std::ifstream in(fs::path(dir) / file);
    require(in.good(), "dataset: missing ", (fs::path(dir) / file).string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("input")) {
            ds.graphs.push_back(detail::graph_from_json(j.at("input")));
            ds.targets.push_back(detail::graph_from_json(j.at("target")));
        } else {
            ds.graphs.push_back(detail::graph_from_json(j));
        }
    }
    require(ds.graphs.size() == meta.at("count").get<std::size_t>(), "dataset: manifest counts ",
            meta.at("count").get<std::size_t>(), " graphs, file holds ", ds.graphs.size());
    if (meta.contains("splits")) {
        ds.splits.train = meta.at("splits").at("train").get<std::vector<int>>();
        ds.splits.val = meta.at("splits").at("val").get<std::vector<int>>();
        ds.splits.test = meta.at("splits").at("test").get<std::vector<int>>();
    }
    validate(ds);
    return ds;
}

}  // namespace g2g
