#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "g2g/graph.hpp"

namespace g2g {

namespace detail {

inline std::vector<long> read_int_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    require(in.good(), "tu: cannot open ", file.string());
    std::vector<long> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(std::stol(line));
    }
    return out;
}

}  // namespace detail

// Reads a dataset in the public TU benchmark layout: <name>_A.txt holds
// 1-indexed "u, v" edge rows, <name>_graph_indicator.txt maps each global
// node to its graph, and <name>_graph_labels.txt (optional) holds one class
// per graph. Node ids are remapped to 0-indexed local ids per graph.
inline std::vector<Graph> parse_tu(const std::string& dir) {
    namespace fs = std::filesystem;
    require(fs::is_directory(dir), "tu: ", dir, " is not a directory");
    fs::path a_file;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 6 && name.substr(name.size() - 6) == "_A.txt") {
            require(a_file.empty(), "tu: multiple *_A.txt files in ", dir);
            a_file = entry.path();
        }
    }
    require(!a_file.empty(), "tu: no *_A.txt in ", dir);
    const std::string stem = a_file.filename().string();
    const std::string prefix = stem.substr(0, stem.size() - 6);
    const fs::path base = a_file.parent_path();
    const fs::path ind_file = base / (prefix + "_graph_indicator.txt");
    require(fs::exists(ind_file), "tu: missing ", ind_file.string());

    const auto indicator = detail::read_int_lines(ind_file);
    std::map<long, std::vector<long>> graph_nodes;  // graph id -> global node ids (ascending)
    for (std::size_t i = 0; i < indicator.size(); ++i)
        graph_nodes[indicator[i]].push_back(static_cast<long>(i + 1));

    std::map<long, int> node_graph;   // global node -> graph id
    std::map<long, int> node_local;   // global node -> local id
    std::map<long, std::size_t> graph_pos;  // graph id -> output position
    std::vector<Graph> graphs;
    for (const auto& [gid, nodes] : graph_nodes) {
        graph_pos[gid] = graphs.size();
        Graph g;
        g.n = static_cast<int>(nodes.size());
        graphs.push_back(g);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            node_graph[nodes[k]] = static_cast<int>(gid);
            node_local[nodes[k]] = static_cast<int>(k);
        }
    }

    std::ifstream in(a_file);
    require(in.good(), "tu: cannot open ", a_file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        require(comma != std::string::npos, "tu: ", a_file.string(), ":", lineno,
                ": expected 'u, v'");
        const long u = std::stol(line.substr(0, comma));
        const long v = std::stol(line.substr(comma + 1));
        const auto gu = node_graph.find(u), gv = node_graph.find(v);
        require(gu != node_graph.end() && gv != node_graph.end(), "tu: ", a_file.string(), ":",
                lineno, ": node outside the indicator range");
        require(gu->second == gv->second, "tu: ", a_file.string(), ":", lineno, ": edge (", u,
                ",", v, ") crosses graphs ", gu->second, " and ", gv->second);
        graphs[graph_pos[gu->second]].add_edge(node_local[u], node_local[v]);
    }

    const fs::path label_file = base / (prefix + "_graph_labels.txt");
    if (fs::exists(label_file)) {
        const auto labels = detail::read_int_lines(label_file);
        require(labels.size() == graphs.size(), "tu: ", labels.size(), " labels for ",
                graphs.size(), " graphs");
        std::size_t k = 0;
        for (const auto& [gid, pos] : graph_pos) graphs[pos].label = static_cast<int>(labels[k++]);
    }
    return graphs;
}

// Writes graphs back out in the TU layout (each undirected edge appears as
// both directed rows, grouped by source node). Labels are written only when
// every graph carries one.
inline void write_tu(const std::vector<Graph>& graphs, const std::string& dir,
                     const std::string& name) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream a(fs::path(dir) / (name + "_A.txt"));
    std::ofstream ind(fs::path(dir) / (name + "_graph_indicator.txt"));
    require(a.good() && ind.good(), "tu: cannot write into ", dir);
    long offset = 0, gid = 0;
    bool all_labeled = !graphs.empty();
    for (const auto& g : graphs)
        if (!g.label) all_labeled = false;
    for (const auto& g : graphs) {
        ++gid;
        const auto adj = g.adjacency();
        for (int v = 0; v < g.n; ++v) {
            ind << gid << "\n";
            auto nbs = adj[static_cast<std::size_t>(v)];
            std::sort(nbs.begin(), nbs.end());
            for (int u : nbs) a << (offset + v + 1) << ", " << (offset + u + 1) << "\n";
        }
        offset += g.n;
    }
    if (all_labeled) {
        std::ofstream lab(fs::path(dir) / (name + "_graph_labels.txt"));
        for (const auto& g : graphs) lab << *g.label << "\n";
    }
}

}  // namespace g2g
