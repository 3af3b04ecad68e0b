#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "g2g/cli.hpp"

namespace {

// --config JSON supplies defaults; flags given on the command line win.
nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    const nlohmann::json j = nlohmann::json::parse(g2g::cli::read_text(path));
    g2g::require(j.is_object(), "config: ", path, " must hold a JSON object");
    return j;
}

template <class T>
void cfg_override(const nlohmann::json& j, std::vector<std::string>& known, const char* key,
                  const CLI::Option* opt, T& field) {
    known.push_back(key);
    if (j.contains(key) && opt->count() == 0) field = j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json& j, const std::vector<std::string>& known,
                    const std::string& path) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const std::string& k : known) ok = ok || k == key;
        g2g::require(ok, "config: unknown key '", key, "' in ", path);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-to-graph sequence learning toolkit"};
    app.require_subcommand(1);

    std::string config_path;

    // ---- gen-data
    g2g::cli::GenDataOpts gen;
    CLI::App* sub_gen = app.add_subcommand("gen-data", "generate or import a graph dataset");
    sub_gen->add_option("--config", config_path, "JSON file with defaults for this command");
    auto* g_task = sub_gen->add_option("--task", gen.task, "max-clique | two-class");
    auto* g_count = sub_gen->add_option("--count", gen.count, "number of graphs");
    auto* g_nmin = sub_gen->add_option("--n-min", gen.n_min, "smallest graph");
    auto* g_nmax = sub_gen->add_option("--n-max", gen.n_max, "largest graph");
    auto* g_cmin = sub_gen->add_option("--clique-min", gen.clique_min, "smallest planted clique");
    auto* g_cmax = sub_gen->add_option("--clique-max", gen.clique_max, "largest planted clique");
    auto* g_p = sub_gen->add_option("--edge-prob", gen.edge_prob, "background edge probability");
    auto* g_ftr = sub_gen->add_option("--train-frac", gen.f_train, "train share");
    auto* g_fva = sub_gen->add_option("--val-frac", gen.f_val, "validation share");
    auto* g_fte = sub_gen->add_option("--test-frac", gen.f_test, "test share");
    auto* g_seed = sub_gen->add_option("--seed", gen.seed, "generator seed");
    auto* g_tu = sub_gen->add_option("--from-tu", gen.from_tu, "import a TU-format directory");
    auto* g_cap = sub_gen->add_option("--node-cap", gen.node_cap, "drop imported graphs above this size");
    auto* g_out = sub_gen->add_option("--out-dir", gen.out_dir, "output directory");

    // ---- train
    g2g::cli::TrainOpts tr;
    CLI::App* sub_tr = app.add_subcommand("train", "fit a model on a dataset");
    sub_tr->add_option("--config", config_path, "JSON file with defaults for this command");
    auto* t_data = sub_tr->add_option("--data", tr.data_dir, "dataset directory")->required();
    auto* t_task = sub_tr->add_option("--task", tr.task, "max-clique | autoencoder");
    auto* t_attn = sub_tr->add_option("--attn", tr.attn, "learned | fixed");
    auto* t_abl = sub_tr->add_option("--ablate", tr.ablate, "none | node-attn | edge-attn");
    auto* t_ep = sub_tr->add_option("--epochs", tr.epochs, "training epochs");
    auto* t_lr = sub_tr->add_option("--lr", tr.learning_rate, "Adam learning rate");
    auto* t_bs = sub_tr->add_option("--batch", tr.batch_size, "graphs per optimizer step");
    auto* t_gm = sub_tr->add_option("--gamma", tr.gamma, "focal loss focusing exponent");
    auto* t_th = sub_tr->add_option("--threshold", tr.threshold, "edge decision threshold");
    auto* t_seed = sub_tr->add_option("--seed", tr.seed, "training seed");
    auto* t_nh = sub_tr->add_option("--node-hidden", tr.node_hidden, "node GRU width");
    auto* t_eh = sub_tr->add_option("--edge-hidden", tr.edge_hidden, "edge GRU width");
    auto* t_dh = sub_tr->add_option("--down-hidden", tr.down_hidden, "output re-encoder width");
    auto* t_em = sub_tr->add_option("--emb-dim", tr.emb_dim, "previous-bit embedding width");
    auto* t_ah = sub_tr->add_option("--attn-hidden", tr.attn_hidden, "attention MLP width");
    auto* t_hh = sub_tr->add_option("--head-hidden", tr.head_hidden, "edge head hidden dims")
                     ->delimiter(',');
    auto* t_out = sub_tr->add_option("--out-dir", tr.out_dir, "output directory");

    // ---- encode
    g2g::cli::EncodeOpts en;
    CLI::App* sub_en = app.add_subcommand("encode", "export latent features from a reconstruction model");
    sub_en->add_option("--config", config_path, "JSON file with defaults for this command");
    auto* e_ck = sub_en->add_option("--checkpoint", en.checkpoint, "model checkpoint")->required();
    auto* e_data = sub_en->add_option("--data", en.data_dir, "dataset directory")->required();
    auto* e_out = sub_en->add_option("--out-dir", en.out_dir, "output directory");

    // ---- classify-limited
    g2g::cli::ClassifyOpts cl;
    CLI::App* sub_cl = app.add_subcommand("classify-limited",
                                          "limited-label classification study on latents");
    sub_cl->add_option("--config", config_path, "JSON file with defaults for this command");
    auto* c_lat = sub_cl->add_option("--latents", cl.latents, "latents.csv path")->required();
    auto* c_fr = sub_cl->add_option("--fractions", cl.fractions, "label fractions")->delimiter(',');
    auto* c_rep = sub_cl->add_option("--repeats", cl.repeats, "repeats per fraction");
    auto* c_ep = sub_cl->add_option("--epochs", cl.epochs, "classifier epochs");
    auto* c_bs = sub_cl->add_option("--batch", cl.batch_size, "classifier batch size");
    auto* c_lr = sub_cl->add_option("--lr", cl.learning_rate, "classifier learning rate");
    auto* c_hd = sub_cl->add_option("--hidden", cl.hidden, "classifier hidden width");
    auto* c_seed = sub_cl->add_option("--seed", cl.seed, "study seed");
    auto* c_out = sub_cl->add_option("--out-dir", cl.out_dir, "output directory");

    // ---- predict
    g2g::cli::PredictOpts pr;
    CLI::App* sub_pr = app.add_subcommand("predict", "run one graph through a trained model");
    sub_pr->add_option("--config", config_path, "JSON file with defaults for this command");
    auto* p_ck = sub_pr->add_option("--checkpoint", pr.checkpoint, "model checkpoint")->required();
    auto* p_g = sub_pr->add_option("--graph", pr.graph, "input graph JSON file")->required();
    auto* p_th = sub_pr->add_option("--threshold", pr.threshold, "edge decision threshold");
    auto* p_mask = sub_pr->add_flag("--mask-input", pr.mask_input, "restrict output to input edges");
    auto* p_out = sub_pr->add_option("--out-dir", pr.out_dir, "output directory");

    // ---- eval
    g2g::cli::EvalOpts ev;
    CLI::App* sub_ev = app.add_subcommand("eval", "score a checkpoint on a dataset split");
    sub_ev->add_option("--config", config_path, "JSON file with defaults for this command");
    auto* v_ck = sub_ev->add_option("--checkpoint", ev.checkpoint, "model checkpoint")->required();
    auto* v_data = sub_ev->add_option("--data", ev.data_dir, "dataset directory")->required();
    auto* v_sp = sub_ev->add_option("--split", ev.split, "train | val | test");
    auto* v_task = sub_ev->add_option("--task", ev.task, "max-clique | autoencoder");
    auto* v_th = sub_ev->add_option("--threshold", ev.threshold, "edge decision threshold");
    auto* v_mask = sub_ev->add_flag("--mask-input", ev.mask_input, "restrict output to input edges");
    auto* v_out = sub_ev->add_option("--out-dir", ev.out_dir, "output directory");

    // ---- rerun
    std::string manifest_path, rerun_out = "rerun";
    CLI::App* sub_re = app.add_subcommand("rerun", "re-execute a command from its manifest");
    sub_re->add_option("--manifest", manifest_path, "manifest.json path")->required();
    sub_re->add_option("--out-dir", rerun_out, "output directory");

    try {
        app.parse(argc, argv);
        const nlohmann::json cfg = load_config(config_path);
        std::vector<std::string> known;
        if (sub_gen->parsed()) {
            cfg_override(cfg, known, "task", g_task, gen.task);
            cfg_override(cfg, known, "count", g_count, gen.count);
            cfg_override(cfg, known, "n_min", g_nmin, gen.n_min);
            cfg_override(cfg, known, "n_max", g_nmax, gen.n_max);
            cfg_override(cfg, known, "clique_min", g_cmin, gen.clique_min);
            cfg_override(cfg, known, "clique_max", g_cmax, gen.clique_max);
            cfg_override(cfg, known, "edge_prob", g_p, gen.edge_prob);
            cfg_override(cfg, known, "f_train", g_ftr, gen.f_train);
            cfg_override(cfg, known, "f_val", g_fva, gen.f_val);
            cfg_override(cfg, known, "f_test", g_fte, gen.f_test);
            cfg_override(cfg, known, "seed", g_seed, gen.seed);
            cfg_override(cfg, known, "from_tu", g_tu, gen.from_tu);
            cfg_override(cfg, known, "node_cap", g_cap, gen.node_cap);
            cfg_override(cfg, known, "out_dir", g_out, gen.out_dir);
            reject_unknown(cfg, known, config_path);
            g2g::cli::cmd_gen_data(gen);
        } else if (sub_tr->parsed()) {
            cfg_override(cfg, known, "data", t_data, tr.data_dir);
            cfg_override(cfg, known, "task", t_task, tr.task);
            cfg_override(cfg, known, "attn", t_attn, tr.attn);
            cfg_override(cfg, known, "ablate", t_abl, tr.ablate);
            cfg_override(cfg, known, "epochs", t_ep, tr.epochs);
            cfg_override(cfg, known, "learning_rate", t_lr, tr.learning_rate);
            cfg_override(cfg, known, "batch_size", t_bs, tr.batch_size);
            cfg_override(cfg, known, "gamma", t_gm, tr.gamma);
            cfg_override(cfg, known, "threshold", t_th, tr.threshold);
            cfg_override(cfg, known, "seed", t_seed, tr.seed);
            cfg_override(cfg, known, "node_hidden", t_nh, tr.node_hidden);
            cfg_override(cfg, known, "edge_hidden", t_eh, tr.edge_hidden);
            cfg_override(cfg, known, "down_hidden", t_dh, tr.down_hidden);
            cfg_override(cfg, known, "emb_dim", t_em, tr.emb_dim);
            cfg_override(cfg, known, "attn_hidden", t_ah, tr.attn_hidden);
            cfg_override(cfg, known, "head_hidden", t_hh, tr.head_hidden);
            cfg_override(cfg, known, "out_dir", t_out, tr.out_dir);
            reject_unknown(cfg, known, config_path);
            g2g::cli::cmd_train(tr);
        } else if (sub_en->parsed()) {
            cfg_override(cfg, known, "checkpoint", e_ck, en.checkpoint);
            cfg_override(cfg, known, "data", e_data, en.data_dir);
            cfg_override(cfg, known, "out_dir", e_out, en.out_dir);
            reject_unknown(cfg, known, config_path);
            g2g::cli::cmd_encode(en);
        } else if (sub_cl->parsed()) {
            cfg_override(cfg, known, "latents", c_lat, cl.latents);
            cfg_override(cfg, known, "fractions", c_fr, cl.fractions);
            cfg_override(cfg, known, "repeats", c_rep, cl.repeats);
            cfg_override(cfg, known, "epochs", c_ep, cl.epochs);
            cfg_override(cfg, known, "batch_size", c_bs, cl.batch_size);
            cfg_override(cfg, known, "learning_rate", c_lr, cl.learning_rate);
            cfg_override(cfg, known, "hidden", c_hd, cl.hidden);
            cfg_override(cfg, known, "seed", c_seed, cl.seed);
            cfg_override(cfg, known, "out_dir", c_out, cl.out_dir);
            reject_unknown(cfg, known, config_path);
            g2g::cli::cmd_classify_limited(cl);
        } else if (sub_pr->parsed()) {
            cfg_override(cfg, known, "checkpoint", p_ck, pr.checkpoint);
            cfg_override(cfg, known, "graph", p_g, pr.graph);
            cfg_override(cfg, known, "threshold", p_th, pr.threshold);
            cfg_override(cfg, known, "mask_input", p_mask, pr.mask_input);
            cfg_override(cfg, known, "out_dir", p_out, pr.out_dir);
            reject_unknown(cfg, known, config_path);
            g2g::cli::cmd_predict(pr);
        } else if (sub_ev->parsed()) {
            cfg_override(cfg, known, "checkpoint", v_ck, ev.checkpoint);
            cfg_override(cfg, known, "data", v_data, ev.data_dir);
            cfg_override(cfg, known, "split", v_sp, ev.split);
            cfg_override(cfg, known, "task", v_task, ev.task);
            cfg_override(cfg, known, "threshold", v_th, ev.threshold);
            cfg_override(cfg, known, "mask_input", v_mask, ev.mask_input);
            cfg_override(cfg, known, "out_dir", v_out, ev.out_dir);
            reject_unknown(cfg, known, config_path);
            g2g::cli::cmd_eval(ev);
        } else if (sub_re->parsed()) {
            g2g::cli::rerun_manifest(manifest_path, rerun_out);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "g2g: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
