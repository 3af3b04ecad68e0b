#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "g2g/dataset.hpp"

using namespace g2g;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("g2g_ds_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool complete_on_support(const Graph& g) {
    std::vector<int> members;
    const auto deg = g.degrees();
    for (int v = 0; v < g.n; ++v)
        if (deg[static_cast<std::size_t>(v)] > 0) members.push_back(v);
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (!g.has_edge(members[i], members[j])) return false;
    return true;
}

}  // namespace

TEST_CASE("noise-free generation plants exactly the clique") {
    const auto ds = gen_planted_clique(20, 5, 5, 3, 3, 0.0, 7);
    REQUIRE(ds.graphs.size() == 20);
    REQUIRE(ds.targets.size() == 20);
    REQUIRE(ds.width == 5);
    for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
        REQUIRE(ds.graphs[i].n == 5);
        REQUIRE(ds.graphs[i].edges.size() == 3);  // nothing but the plant
        REQUIRE(ds.graphs[i].edges == ds.targets[i].edges);
    }
}

TEST_CASE("generation is reproducible and seed-sensitive") {
    const auto a = gen_planted_clique(30, 8, 12, 4, 5, 0.2, 11);
    const auto b = gen_planted_clique(30, 8, 12, 4, 5, 0.2, 11);
    const auto c = gen_planted_clique(30, 8, 12, 4, 5, 0.2, 12);
    REQUIRE(a.graphs == b.graphs);
    REQUIRE(a.targets == b.targets);
    REQUIRE(a.graphs != c.graphs);
}

TEST_CASE("pairs satisfy the generation contract") {
    const auto ds = gen_planted_clique(1000, 8, 14, 4, 6, 0.15, 3);
    REQUIRE(ds.graphs.size() == 1000);
    for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
        const Graph& in = ds.graphs[i];
        const Graph& tg = ds.targets[i];
        INFO("pair " << i);
        REQUIRE(in.n >= 8);
        REQUIRE(in.n <= 14);
        REQUIRE(tg.n == in.n);
        // the target's support is one clique of the input
        REQUIRE(complete_on_support(tg));
        for (const auto& [a, b] : tg.edges) REQUIRE(in.has_edge(a, b));
        // a plant of at least 4 nodes guarantees at least 6 target edges
        REQUIRE(tg.edges.size() >= 6);
    }
    // inputs come out canonically ordered: reordering changes nothing
    for (std::size_t i = 0; i < 100; ++i) {
        REQUIRE(canonical_order(ds.graphs[i]) == ds.graphs[i]);
    }
}

TEST_CASE("generator rejects bad ranges") {
    REQUIRE_THROWS_WITH(gen_planted_clique(5, 8, 12, 2, 4, 0.1, 1),
                        Catch::Matchers::ContainsSubstring("below 3"));
    REQUIRE_THROWS(gen_planted_clique(5, 8, 12, 5, 4, 0.1, 1));
    REQUIRE_THROWS(gen_planted_clique(5, 8, 12, 4, 9, 0.1, 1));   // clique > smallest n
    REQUIRE_THROWS(gen_planted_clique(5, 12, 8, 4, 5, 0.1, 1));   // n range inverted
    REQUIRE_THROWS(gen_planted_clique(5, 8, 12, 4, 5, 1.5, 1));   // probability
    REQUIRE_THROWS(gen_planted_clique(-1, 8, 12, 4, 5, 0.1, 1));  // count
}

TEST_CASE("two-class corpora carry both labels") {
    const auto ds = gen_two_class(200, 8, 12, 4, 5, 0.15, 5);
    REQUIRE(ds.graphs.size() == 200);
    REQUIRE(ds.targets.empty());
    int ones = 0, zeros = 0;
    for (const auto& g : ds.graphs) {
        REQUIRE(g.label.has_value());
        if (*g.label == 1)
            ++ones;
        else if (*g.label == 0)
            ++zeros;
        else
            FAIL("unexpected label " << *g.label);
    }
    REQUIRE(ones > 50);
    REQUIRE(zeros > 50);
    for (int i = 0; i < 50; ++i) REQUIRE(canonical_order(ds.graphs[i]) == ds.graphs[i]);
}

TEST_CASE("splits land within one graph of the requested fractions") {
    auto ds = gen_planted_clique(10, 5, 8, 3, 4, 0.1, 2);
    split(ds, 0.6, 0.2, 0.2, 9);
    REQUIRE(ds.splits.train.size() == 6);
    REQUIRE(ds.splits.val.size() == 2);
    REQUIRE(ds.splits.test.size() == 2);

    std::set<int> seen;
    for (int i : ds.splits.train) seen.insert(i);
    for (int i : ds.splits.val) seen.insert(i);
    for (int i : ds.splits.test) seen.insert(i);
    REQUIRE(seen.size() == 10);
    REQUIRE(*seen.begin() == 0);
    REQUIRE(*seen.rbegin() == 9);
}

TEST_CASE("degenerate split fractions are allowed") {
    auto ds = gen_planted_clique(7, 5, 8, 3, 4, 0.1, 2);
    split(ds, 1.0, 0.0, 0.0, 1);
    REQUIRE(ds.splits.train.size() == 7);
    REQUIRE(ds.splits.val.empty());
    REQUIRE(ds.splits.test.empty());
}

TEST_CASE("splitting is deterministic in the seed") {
    auto a = gen_planted_clique(50, 5, 8, 3, 4, 0.1, 2);
    auto b = a;
    split(a, 0.6, 0.2, 0.2, 77);
    split(b, 0.6, 0.2, 0.2, 77);
    REQUIRE(a.splits.train == b.splits.train);
    REQUIRE(a.splits.val == b.splits.val);
    REQUIRE(a.splits.test == b.splits.test);
    auto c = a;
    split(c, 0.6, 0.2, 0.2, 78);
    REQUIRE(a.splits.train != c.splits.train);
}

TEST_CASE("split validates its inputs") {
    auto ds = gen_planted_clique(5, 5, 8, 3, 4, 0.1, 2);
    REQUIRE_THROWS_WITH(split(ds, 0.5, 0.2, 0.2, 1),
                        Catch::Matchers::ContainsSubstring("sum"));
    Dataset empty;
    REQUIRE_THROWS_WITH(split(empty, 0.6, 0.2, 0.2, 1),
                        Catch::Matchers::ContainsSubstring("empty"));
}

TEST_CASE("full-fraction subsets are the identity") {
    std::vector<int> train;
    for (int i = 0; i < 800; ++i) train.push_back(i * 3);
    const auto picks = limited_label_subsets(train, {1.0}, 2, 5);
    REQUIRE(picks.size() == 2);
    for (const auto& p : picks) REQUIRE(p.indices == train);
}

TEST_CASE("tiny fractions keep at least one example") {
    std::vector<int> train;
    for (int i = 0; i < 800; ++i) train.push_back(i);
    const auto picks = limited_label_subsets(train, {0.001}, 3, 5);
    for (const auto& p : picks) REQUIRE(p.indices.size() == 1);
}

TEST_CASE("repeats draw different subsets") {
    std::vector<int> train;
    for (int i = 0; i < 800; ++i) train.push_back(i);
    const auto picks = limited_label_subsets(train, {0.05}, 10, 5);
    REQUIRE(picks.size() == 10);
    std::set<std::vector<int>> distinct;
    for (const auto& p : picks) {
        REQUIRE(p.indices.size() == 40);
        for (int idx : p.indices) REQUIRE((idx >= 0 && idx < 800));
        distinct.insert(p.indices);
    }
    REQUIRE(distinct.size() == 10);

    // and the draws themselves replay exactly
    const auto again = limited_label_subsets(train, {0.05}, 10, 5);
    for (std::size_t i = 0; i < picks.size(); ++i)
        REQUIRE(picks[i].indices == again[i].indices);
}

TEST_CASE("subset parameters are validated") {
    std::vector<int> train{1, 2, 3};
    REQUIRE_THROWS(limited_label_subsets(train, {0.0}, 1, 5));
    REQUIRE_THROWS(limited_label_subsets(train, {1.5}, 1, 5));
    REQUIRE_THROWS(limited_label_subsets(train, {0.5}, 0, 5));
}

TEST_CASE("paired datasets survive the disk round trip byte-for-byte") {
    const auto ds = gen_planted_clique(40, 6, 10, 3, 4, 0.2, 21);
    const auto dir = fresh_dir("pairs");
    write_dataset(ds, dir.string());
    REQUIRE(fs::exists(dir / "pairs.jsonl"));
    REQUIRE(fs::exists(dir / "dataset.json"));

    const auto back = load_dataset(dir.string());
    REQUIRE(back.graphs == ds.graphs);
    REQUIRE(back.targets == ds.targets);
    REQUIRE(back.width == ds.width);
    REQUIRE(back.task == ds.task);

    const std::string first = slurp(dir / "pairs.jsonl");
    const std::string meta_first = slurp(dir / "dataset.json");
    write_dataset(back, dir.string());
    REQUIRE(slurp(dir / "pairs.jsonl") == first);
    REQUIRE(slurp(dir / "dataset.json") == meta_first);
}

TEST_CASE("plain corpora use the single-graph format") {
    const auto ds = gen_two_class(25, 6, 9, 3, 4, 0.2, 31);
    const auto dir = fresh_dir("plain");
    write_dataset(ds, dir.string());
    REQUIRE(fs::exists(dir / "graphs.jsonl"));
    REQUIRE_FALSE(fs::exists(dir / "pairs.jsonl"));
    const auto back = load_dataset(dir.string());
    REQUIRE(back.graphs == ds.graphs);
    REQUIRE(back.targets.empty());
    REQUIRE(back.graphs[0].label.has_value());
}

TEST_CASE("loading rejects a count mismatch") {
    const auto ds = gen_two_class(5, 6, 9, 3, 4, 0.2, 31);
    const auto dir = fresh_dir("mismatch");
    write_dataset(ds, dir.string());
    std::ofstream app(dir / "graphs.jsonl", std::ios::app);
    app << R"({"n":2,"edges":[[1,0]],"label":null})" << "\n";
    app.close();
    REQUIRE_THROWS_WITH(load_dataset(dir.string()),
                        Catch::Matchers::ContainsSubstring("manifest"));
}

TEST_CASE("node caps drop oversized graphs with their targets") {
    auto ds = gen_planted_clique(200, 6, 12, 3, 4, 0.2, 41);
    const auto before = ds.graphs.size();
    filter_max_nodes(ds, 8);
    REQUIRE(ds.graphs.size() < before);
    REQUIRE(ds.graphs.size() == ds.targets.size());
    REQUIRE(ds.width <= 8);
    for (const auto& g : ds.graphs) REQUIRE(g.n <= 8);
    for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
        for (const auto& [a, b] : ds.targets[i].edges) REQUIRE(ds.graphs[i].has_edge(a, b));
    }
}

TEST_CASE("splits survive the disk round trip") {
    Dataset ds = gen_planted_clique(20, 6, 8, 3, 4, 0.2, 77);
    split(ds, 0.6, 0.2, 0.2, 77);
    const fs::path dir = fresh_dir("splits");
    write_dataset(ds, dir.string());
    const Dataset back = load_dataset(dir.string());
    CHECK(back.splits.train == ds.splits.train);
    CHECK(back.splits.val == ds.splits.val);
    CHECK(back.splits.test == ds.splits.test);
    fs::remove_all(dir);
}

TEST_CASE("out-of-range split indices are rejected") {
    Dataset ds = gen_planted_clique(5, 6, 8, 3, 4, 0.2, 78);
    ds.splits.train = {0, 1, 7};
    CHECK_THROWS_WITH(validate(ds), Catch::Matchers::ContainsSubstring("split index"));
}
