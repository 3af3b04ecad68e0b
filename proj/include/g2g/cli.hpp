#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "g2g/checkpoint.hpp"
#include "g2g/classifier.hpp"
#include "g2g/dataset.hpp"
#include "g2g/train.hpp"
#include "g2g/tu.hpp"

#include <json.hpp>

namespace g2g::cli {

namespace fs = std::filesystem;

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot read ", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path().empty()
                               ? fs::path(".")
                               : fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot write ", path);
    out << content;
    require(out.good(), "write failed for ", path);
}

inline std::string file_hash(const std::string& path) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(read_text(path))));
    return std::string(buf);
}

inline void write_manifest(const std::string& out_dir, const nlohmann::json& j) {
    write_text((fs::path(out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

// ---------------------------------------------------------------- gen-data

struct GenDataOpts {
    std::string out_dir = "data";
    std::string task = "max-clique";  // max-clique | two-class
    int count = 1000;
    int n_min = 8, n_max = 14;
    int clique_min = 4, clique_max = 6;
    double edge_prob = 0.15;
    double f_train = 0.6, f_val = 0.2, f_test = 0.2;
    std::uint64_t seed = 0;
    std::string from_tu;  // import a TU-format corpus instead of generating
    int node_cap = 0;     // with from_tu: drop graphs above this node count
};

namespace detail_cli {

inline Dataset import_tu(const GenDataOpts& o) {
    std::vector<Graph> graphs = parse_tu(o.from_tu);
    Dataset ds;
    ds.name = fs::path(o.from_tu).filename().string();
    ds.task = o.task == "max-clique" ? "max_clique" : "two_class";
    ds.seed = o.seed;
    for (Graph& g : graphs) ds.graphs.push_back(canonical_order(g));
    ds.refresh_width();
    if (o.node_cap > 0) filter_max_nodes(ds, o.node_cap);
    if (o.task == "max-clique") {
        for (const Graph& g : ds.graphs) ds.targets.push_back(max_clique_oracle(g));
    } else {
        for (const Graph& g : ds.graphs)
            require(g.label.has_value(), "gen-data: the imported corpus has unlabeled graphs");
    }
    return ds;
}

}  // namespace detail_cli

inline void cmd_gen_data(const GenDataOpts& o) {
    require(o.task == "max-clique" || o.task == "two-class", "gen-data: unknown task '", o.task,
            "'");
    Dataset ds;
    if (!o.from_tu.empty()) {
        ds = detail_cli::import_tu(o);
    } else if (o.task == "max-clique") {
        ds = gen_planted_clique(o.count, o.n_min, o.n_max, o.clique_min, o.clique_max,
                                o.edge_prob, o.seed);
    } else {
        ds = gen_two_class(o.count, o.n_min, o.n_max, o.clique_min, o.clique_max, o.edge_prob,
                           o.seed);
    }
    split(ds, o.f_train, o.f_val, o.f_test, o.seed);
    write_dataset(ds, o.out_dir);

    nlohmann::json m;
    m["command"] = "gen-data";
    m["task"] = o.task;
    m["count"] = o.count;
    m["n_min"] = o.n_min;
    m["n_max"] = o.n_max;
    m["clique_min"] = o.clique_min;
    m["clique_max"] = o.clique_max;
    m["edge_prob"] = o.edge_prob;
    m["f_train"] = o.f_train;
    m["f_val"] = o.f_val;
    m["f_test"] = o.f_test;
    m["seed"] = o.seed;
    m["from_tu"] = o.from_tu;
    m["node_cap"] = o.node_cap;
    m["outputs"] = {{"dataset", ds.has_pairs() ? "pairs.jsonl" : "graphs.jsonl"},
                    {"descriptor", "dataset.json"}};
    write_manifest(o.out_dir, m);
}

// ------------------------------------------------------------------- train

struct TrainOpts {
    std::string data_dir;
    std::string out_dir = "run";
    std::string task = "max-clique";  // max-clique | autoencoder
    std::string attn = "learned";     // learned | fixed
    std::string ablate = "none";      // none | node-attn | edge-attn
    std::size_t epochs = 100;
    double learning_rate = 0.01;
    std::size_t batch_size = 64;
    double gamma = 2.0;
    double threshold = 0.5;
    std::uint64_t seed = 0;
    std::size_t node_hidden = 128;
    std::size_t edge_hidden = 32;
    std::size_t down_hidden = 32;
    std::size_t emb_dim = 16;
    std::size_t attn_hidden = 64;
    std::vector<std::size_t> head_hidden = {64};
};

inline nlohmann::json train_config_to_json(const TrainConfig& c) {
    nlohmann::json j;
    j["learning_rate"] = c.learning_rate;
    j["batch_size"] = c.batch_size;
    j["epochs"] = c.epochs;
    j["gamma"] = c.gamma;
    j["seed"] = c.seed;
    j["task"] = to_string(c.task);
    j["threshold"] = c.threshold;
    j["clip_norm"] = c.clip_norm;
    return j;
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.gamma = j.at("gamma").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.task = task_from(j.at("task").get<std::string>());
    c.threshold = j.at("threshold").get<double>();
    c.clip_norm = j.at("clip_norm").get<double>();
    return c;
}

inline ModelConfig model_config_for(const TrainOpts& o, std::size_t width) {
    ModelConfig c;
    c.width = width;
    c.edge_hidden = o.edge_hidden;
    c.node_hidden = o.node_hidden;
    c.down_hidden = o.down_hidden;
    c.emb_dim = o.emb_dim;
    c.attn_hidden = o.attn_hidden;
    c.head_hidden = o.head_hidden;
    c.threshold = o.threshold;
    if (o.task == "autoencoder") {
        require(o.ablate == "none", "train: attention ablations apply to the clique task");
        c.encode_mode = EncodeMode::forward_only;
        c.node_context = ContextMode::final_state;
        c.edge_context = ContextMode::zeros;
    } else {
        require(o.attn == "learned" || o.attn == "fixed", "train: unknown attention mode '",
                o.attn, "'");
        c.encode_mode = EncodeMode::bidirectional;
        const ContextMode attn =
            o.attn == "learned" ? ContextMode::learned : ContextMode::fixed;
        c.node_context = attn;
        c.edge_context = attn;
        if (o.ablate == "node-attn") c.node_context = ContextMode::zeros;
        else if (o.ablate == "edge-attn") c.edge_context = ContextMode::zeros;
        else require(o.ablate == "none", "train: unknown ablation '", o.ablate, "'");
    }
    return c;
}

inline std::string metrics_csv(const std::vector<EpochMetrics>& history) {
    std::ostringstream ss;
    ss << "epoch,split,loss,accuracy,edge_iou\n";
    for (const EpochMetrics& em : history) {
        ss << em.epoch << ",train," << fmt_double(em.train_loss) << ",,\n";
        ss << em.epoch << ",val," << fmt_double(em.val_loss) << "," << fmt_double(em.val_accuracy)
           << "," << fmt_double(em.val_iou) << "\n";
    }
    return ss.str();
}

inline TrainResult run_train(const std::string& data_dir, const ModelConfig& mc,
                             const TrainConfig& tc, const std::string& ablate,
                             const std::string& out_dir) {
    const Dataset ds = load_dataset(data_dir);
    require(!ds.splits.train.empty(),
            "train: the dataset carries no train split; regenerate it with gen-data");
    const TrainResult r = train(ds, mc, tc);
    fs::create_directories(out_dir);
    save_checkpoint(r.best, (fs::path(out_dir) / "model.bin").string());
    write_text((fs::path(out_dir) / "metrics.csv").string(), metrics_csv(r.history));

    nlohmann::json m;
    m["command"] = "train";
    m["dataset"] = {{"path", data_dir},
                    {"hash", file_hash((fs::path(data_dir) / "dataset.json").string())}};
    m["model"] = config_to_json(mc);
    m["train"] = train_config_to_json(tc);
    m["ablate"] = ablate;
    m["best_epoch"] = r.best_epoch;
    m["outputs"] = {{"checkpoint", "model.bin"}, {"metrics", "metrics.csv"}};
    write_manifest(out_dir, m);
    return r;
}

inline void cmd_train(const TrainOpts& o) {
    require(o.task == "max-clique" || o.task == "autoencoder", "train: unknown task '", o.task,
            "'");
    const Dataset probe = load_dataset(o.data_dir);
    const ModelConfig mc = model_config_for(o, probe.width);
    TrainConfig tc;
    tc.learning_rate = o.learning_rate;
    tc.batch_size = o.batch_size;
    tc.epochs = o.epochs;
    tc.gamma = o.gamma;
    tc.seed = o.seed;
    tc.task = o.task == "autoencoder" ? TaskKind::autoencoder : TaskKind::max_clique;
    tc.threshold = o.threshold;
    run_train(o.data_dir, mc, tc, o.ablate, o.out_dir);
}

// Runs the attention ablation grid with identical seeds and reports each
// variant's best-epoch validation plus held-out metrics as CSV.
inline std::string ablation_csv(const Dataset& ds, const ModelConfig& base,
                                const TrainConfig& tc) {
    std::ostringstream ss;
    ss << "variant,best_epoch,val_loss,val_accuracy,val_iou,test_accuracy,test_iou\n";
    const std::vector<std::pair<std::string, ModelConfig>> variants = [&] {
        std::vector<std::pair<std::string, ModelConfig>> v;
        v.emplace_back("full", base);
        ModelConfig no_node = base;
        no_node.node_context = ContextMode::zeros;
        v.emplace_back("no_node_attn", no_node);
        ModelConfig no_edge = base;
        no_edge.edge_context = ContextMode::zeros;
        v.emplace_back("no_edge_attn", no_edge);
        return v;
    }();
    const std::vector<int>& held =
        ds.splits.test.empty() ? ds.splits.val : ds.splits.test;
    for (const auto& [name, mc] : variants) {
        const TrainResult r = train(ds, mc, tc);
        const EpochMetrics& best = r.history[r.best_epoch - 1];
        const EvalMetrics ev = evaluate(r.best, ds, held, tc);
        ss << name << "," << r.best_epoch << "," << fmt_double(best.val_loss) << ","
           << fmt_double(best.val_accuracy) << "," << fmt_double(best.val_iou) << ","
           << fmt_double(ev.accuracy) << "," << fmt_double(ev.mean_iou) << "\n";
    }
    return ss.str();
}

// ------------------------------------------------------------------ encode

struct EncodeOpts {
    std::string checkpoint;
    std::string data_dir;
    std::string out_dir = "latents";
};

inline std::string split_of(const Dataset& ds, int idx) {
    for (int i : ds.splits.train)
        if (i == idx) return "train";
    for (int i : ds.splits.val)
        if (i == idx) return "val";
    for (int i : ds.splits.test)
        if (i == idx) return "test";
    return "all";
}

inline std::string latents_csv(const ModelParams& params, const Dataset& ds) {
    require(params.config.encode_mode == EncodeMode::forward_only,
            "encode: this checkpoint was not trained for reconstruction; its encoder is "
            "bidirectional and has no single latent state");
    std::ostringstream ss;
    ss << "graph_id,split,label";
    for (std::size_t k = 0; k < params.config.node_hidden; ++k) ss << ",z" << k;
    ss << "\n";
    for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
        const Graph& g = ds.graphs[i];
        ss << i << "," << split_of(ds, static_cast<int>(i)) << ",";
        if (g.label.has_value()) ss << *g.label;
        for (double z : encode_latent(g, params)) ss << "," << fmt_double(z);
        ss << "\n";
    }
    return ss.str();
}

inline void cmd_encode(const EncodeOpts& o) {
    const ModelParams params = load_checkpoint(o.checkpoint);
    const Dataset ds = load_dataset(o.data_dir);
    fs::create_directories(o.out_dir);
    write_text((fs::path(o.out_dir) / "latents.csv").string(), latents_csv(params, ds));

    nlohmann::json m;
    m["command"] = "encode";
    m["checkpoint"] = {{"path", o.checkpoint}, {"hash", file_hash(o.checkpoint)}};
    m["dataset"] = {{"path", o.data_dir},
                    {"hash", file_hash((fs::path(o.data_dir) / "dataset.json").string())}};
    m["outputs"] = {{"latents", "latents.csv"}};
    write_manifest(o.out_dir, m);
}

// --------------------------------------------------------- classify-limited

struct ClassifyOpts {
    std::string latents;  // latents.csv path
    std::string out_dir = "classify";
    std::vector<double> fractions = {0.001, 0.0025, 0.005, 0.01, 0.05, 0.1, 1.0};
    int repeats = 10;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 0.003;
    std::size_t hidden = 64;
    std::uint64_t seed = 0;
};

inline std::vector<LatentRow> parse_latents_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "classify: cannot read ", path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "classify: ", path, " is empty");
    std::size_t dim = 0;
    {
        std::istringstream hs(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        require(cols.size() > 3 && cols[0] == "graph_id" && cols[1] == "split" &&
                    cols[2] == "label",
                "classify: ", path, " is not a latents table");
        dim = cols.size() - 3;
    }
    std::vector<LatentRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        LatentRow row;
        require(static_cast<bool>(std::getline(ls, field, ',')), "classify: ", path, ":",
                line_no, ": missing graph id");
        row.graph_id = std::stoi(field);
        require(static_cast<bool>(std::getline(ls, row.split, ',')), "classify: ", path, ":",
                line_no, ": missing split");
        require(static_cast<bool>(std::getline(ls, field, ',')), "classify: ", path, ":",
                line_no, ": missing label");
        require(!field.empty(), "classify: ", path, ":", line_no,
                ": unlabeled row; the study needs labels");
        row.label = std::stoi(field);
        while (std::getline(ls, field, ',')) row.z.push_back(std::stod(field));
        require(row.z.size() == dim, "classify: ", path, ":", line_no, ": ", row.z.size(),
                " features, header promises ", dim);
        rows.push_back(std::move(row));
    }
    require(!rows.empty(), "classify: ", path, " holds no rows");
    return rows;
}

inline std::string study_csv(const LimitedStudy& study) {
    std::ostringstream ss;
    ss << "fraction,repeat,subset_size,degenerate,accuracy,mean,stddev,majority\n";
    for (const LimitedRepeat& r : study.repeats)
        ss << fmt_double(r.fraction) << "," << r.repeat << "," << r.subset_size << ","
           << (r.degenerate ? 1 : 0) << "," << fmt_double(r.accuracy) << ",,,\n";
    for (const LimitedSummary& s : study.summaries)
        ss << fmt_double(s.fraction) << ",,,,," << fmt_double(s.mean_accuracy) << ","
           << fmt_double(s.stddev) << "," << fmt_double(s.majority) << "\n";
    return ss.str();
}

inline void cmd_classify_limited(const ClassifyOpts& o) {
    const std::vector<LatentRow> rows = parse_latents_csv(o.latents);
    int max_label = 0;
    for (const LatentRow& r : rows) {
        require(r.label >= 0, "classify: negative label ", r.label);
        max_label = std::max(max_label, r.label);
    }
    ClassifierConfig cfg;
    cfg.input_dim = rows.front().z.size();
    cfg.hidden = o.hidden;
    cfg.classes = static_cast<std::size_t>(max_label) + 1;
    require(cfg.classes >= 2, "classify: the rows carry a single class");
    cfg.epochs = o.epochs;
    cfg.batch_size = o.batch_size;
    cfg.learning_rate = o.learning_rate;
    cfg.seed = o.seed;
    const LimitedStudy study = limited_label_study(rows, o.fractions, o.repeats, cfg);
    fs::create_directories(o.out_dir);
    write_text((fs::path(o.out_dir) / "results.csv").string(), study_csv(study));

    nlohmann::json m;
    m["command"] = "classify-limited";
    m["latents"] = {{"path", o.latents}, {"hash", file_hash(o.latents)}};
    m["fractions"] = o.fractions;
    m["repeats"] = o.repeats;
    m["classifier"] = {{"hidden", o.hidden},     {"epochs", o.epochs},
                       {"batch_size", o.batch_size}, {"learning_rate", o.learning_rate},
                       {"seed", o.seed}};
    m["outputs"] = {{"results", "results.csv"}};
    write_manifest(o.out_dir, m);
}

// ----------------------------------------------------------------- predict

struct PredictOpts {
    std::string checkpoint;
    std::string graph;  // JSON graph file: {"n":…, "edges":[[a,b],…]}
    std::string out_dir = "prediction";
    double threshold = 0.5;
    bool mask_input = false;
};

// The model works in its canonical node order; results are mapped back to
// the caller's node ids so the output graph aligns with the input file.
inline std::string prediction_json(const ModelParams& params, const Graph& g, double threshold,
                                   bool mask_input) {
    const std::vector<int> perm = canonical_permutation(g);
    std::vector<int> inv(perm.size());
    for (std::size_t o = 0; o < perm.size(); ++o) inv[static_cast<std::size_t>(perm[o])] =
        static_cast<int>(o);
    const PredictResult pr = run_model(g, params, threshold, mask_input);
    const Graph back = apply_permutation(pr.graph, inv);
    nlohmann::json j;
    j["n"] = back.n;
    j["threshold"] = threshold;
    j["masked_to_input"] = mask_input;
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : back.edges) j["edges"].push_back({a, b});
    j["probabilities"] = nlohmann::json::array();
    for (std::size_t r = 0; r < pr.probs.size(); ++r)
        for (std::size_t e = 0; e <= r; ++e)
            j["probabilities"].push_back({{"a", inv.at(r + 1)},
                                          {"b", inv.at(r - e)},
                                          {"p", pr.probs.at(r).at(e)}});
    return j.dump(2) + "\n";
}

inline void cmd_predict(const PredictOpts& o) {
    const ModelParams params = load_checkpoint(o.checkpoint);
    const nlohmann::json gj = nlohmann::json::parse(read_text(o.graph));
    const Graph g = g2g::detail::graph_from_json(gj);
    fs::create_directories(o.out_dir);
    write_text((fs::path(o.out_dir) / "prediction.json").string(),
               prediction_json(params, g, o.threshold, o.mask_input));

    nlohmann::json m;
    m["command"] = "predict";
    m["checkpoint"] = {{"path", o.checkpoint}, {"hash", file_hash(o.checkpoint)}};
    m["graph"] = {{"path", o.graph}, {"hash", file_hash(o.graph)}};
    m["threshold"] = o.threshold;
    m["mask_input"] = o.mask_input;
    m["outputs"] = {{"prediction", "prediction.json"}};
    write_manifest(o.out_dir, m);
}

// -------------------------------------------------------------------- eval

struct EvalOpts {
    std::string checkpoint;
    std::string data_dir;
    std::string out_dir = "eval";
    std::string split = "test";  // train | val | test
    std::string task = "max-clique";
    double threshold = 0.5;
    bool mask_input = false;
};

inline void cmd_eval(const EvalOpts& o) {
    const ModelParams params = load_checkpoint(o.checkpoint);
    const Dataset ds = load_dataset(o.data_dir);
    const std::vector<int>* ids = nullptr;
    if (o.split == "train") ids = &ds.splits.train;
    else if (o.split == "val") ids = &ds.splits.val;
    else if (o.split == "test") ids = &ds.splits.test;
    else fail("eval: unknown split '", o.split, "'");
    TrainConfig tc;
    tc.task = o.task == "autoencoder" ? TaskKind::autoencoder : TaskKind::max_clique;
    tc.threshold = o.threshold;
    const EvalMetrics ev = evaluate(params, ds, *ids, tc, o.mask_input);
    std::ostringstream ss;
    ss << "split,count,accuracy,edge_iou\n";
    ss << o.split << "," << ev.count << "," << fmt_double(ev.accuracy) << ","
       << fmt_double(ev.mean_iou) << "\n";
    fs::create_directories(o.out_dir);
    write_text((fs::path(o.out_dir) / "eval.csv").string(), ss.str());

    nlohmann::json m;
    m["command"] = "eval";
    m["checkpoint"] = {{"path", o.checkpoint}, {"hash", file_hash(o.checkpoint)}};
    m["dataset"] = {{"path", o.data_dir},
                    {"hash", file_hash((fs::path(o.data_dir) / "dataset.json").string())}};
    m["split"] = o.split;
    m["task"] = o.task;
    m["threshold"] = o.threshold;
    m["mask_input"] = o.mask_input;
    m["outputs"] = {{"metrics", "eval.csv"}};
    write_manifest(o.out_dir, m);
}

// ------------------------------------------------------------------- rerun

// Re-executes the command recorded in a manifest, writing into out_dir.
// Inputs are re-read from their recorded paths and verified against the
// recorded content hashes, so a drifted input fails instead of silently
// producing different bytes.
inline void rerun_manifest(const std::string& manifest_path, const std::string& out_dir) {
    const nlohmann::json m = nlohmann::json::parse(read_text(manifest_path));
    const std::string command = m.at("command").get<std::string>();
    const auto check_hash = [&](const nlohmann::json& entry, const std::string& what) {
        const std::string path = entry.at("path").get<std::string>();
        const std::string stored = entry.at("hash").get<std::string>();
        const std::string now = file_hash(what.empty() ? path : what);
        require(now == stored, "rerun: ", path, " changed since the manifest was written");
    };
    if (command == "gen-data") {
        GenDataOpts o;
        o.out_dir = out_dir;
        o.task = m.at("task").get<std::string>();
        o.count = m.at("count").get<int>();
        o.n_min = m.at("n_min").get<int>();
        o.n_max = m.at("n_max").get<int>();
        o.clique_min = m.at("clique_min").get<int>();
        o.clique_max = m.at("clique_max").get<int>();
        o.edge_prob = m.at("edge_prob").get<double>();
        o.f_train = m.at("f_train").get<double>();
        o.f_val = m.at("f_val").get<double>();
        o.f_test = m.at("f_test").get<double>();
        o.seed = m.at("seed").get<std::uint64_t>();
        o.from_tu = m.at("from_tu").get<std::string>();
        o.node_cap = m.at("node_cap").get<int>();
        cmd_gen_data(o);
    } else if (command == "train") {
        const std::string data_dir = m.at("dataset").at("path").get<std::string>();
        check_hash(m.at("dataset"), (fs::path(data_dir) / "dataset.json").string());
        run_train(data_dir, config_from_json(m.at("model")),
                  train_config_from_json(m.at("train")), m.at("ablate").get<std::string>(),
                  out_dir);
    } else if (command == "encode") {
        EncodeOpts o;
        o.checkpoint = m.at("checkpoint").at("path").get<std::string>();
        o.data_dir = m.at("dataset").at("path").get<std::string>();
        o.out_dir = out_dir;
        check_hash(m.at("checkpoint"), "");
        check_hash(m.at("dataset"), (fs::path(o.data_dir) / "dataset.json").string());
        cmd_encode(o);
    } else if (command == "classify-limited") {
        ClassifyOpts o;
        o.latents = m.at("latents").at("path").get<std::string>();
        o.out_dir = out_dir;
        check_hash(m.at("latents"), "");
        o.fractions = m.at("fractions").get<std::vector<double>>();
        o.repeats = m.at("repeats").get<int>();
        o.hidden = m.at("classifier").at("hidden").get<std::size_t>();
        o.epochs = m.at("classifier").at("epochs").get<std::size_t>();
        o.batch_size = m.at("classifier").at("batch_size").get<std::size_t>();
        o.learning_rate = m.at("classifier").at("learning_rate").get<double>();
        o.seed = m.at("classifier").at("seed").get<std::uint64_t>();
        cmd_classify_limited(o);
    } else if (command == "predict") {
        PredictOpts o;
        o.checkpoint = m.at("checkpoint").at("path").get<std::string>();
        o.graph = m.at("graph").at("path").get<std::string>();
        o.out_dir = out_dir;
        o.threshold = m.at("threshold").get<double>();
        o.mask_input = m.at("mask_input").get<bool>();
        check_hash(m.at("checkpoint"), "");
        check_hash(m.at("graph"), "");
        cmd_predict(o);
    } else if (command == "eval") {
        EvalOpts o;
        o.checkpoint = m.at("checkpoint").at("path").get<std::string>();
        o.data_dir = m.at("dataset").at("path").get<std::string>();
        o.out_dir = out_dir;
        o.split = m.at("split").get<std::string>();
        o.task = m.at("task").get<std::string>();
        o.threshold = m.at("threshold").get<double>();
        o.mask_input = m.at("mask_input").get<bool>();
        check_hash(m.at("checkpoint"), "");
        check_hash(m.at("dataset"), (fs::path(o.data_dir) / "dataset.json").string());
        cmd_eval(o);
    } else {
        fail("rerun: unknown command '", command, "' in ", manifest_path);
    }
}

}  // namespace g2g::cli
