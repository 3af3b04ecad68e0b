#pragma once

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "g2g/model.hpp"

namespace g2g {

inline nlohmann::json config_to_json(const ModelConfig& c) {
    nlohmann::json j;
    j["width"] = c.width;
    j["edge_hidden"] = c.edge_hidden;
    j["node_hidden"] = c.node_hidden;
    j["down_hidden"] = c.down_hidden;
    j["emb_dim"] = c.emb_dim;
    j["head_hidden"] = c.head_hidden;
    j["attn_hidden"] = c.attn_hidden;
    j["encode_mode"] = to_string(c.encode_mode);
    j["node_context"] = to_string(c.node_context);
    j["edge_context"] = to_string(c.edge_context);
    j["full_edge_keys"] = c.full_edge_keys;
    j["threshold"] = c.threshold;
    return j;
}

inline EncodeMode encode_mode_from(const std::string& s) {
    if (s == "bidirectional") return EncodeMode::bidirectional;
    if (s == "forward_only") return EncodeMode::forward_only;
    fail("unknown encode mode '", s, "'");
}

inline ContextMode context_mode_from(const std::string& s) {
    if (s == "learned") return ContextMode::learned;
    if (s == "fixed") return ContextMode::fixed;
    if (s == "final_state") return ContextMode::final_state;
    if (s == "zeros") return ContextMode::zeros;
    fail("unknown context mode '", s, "'");
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.width = j.at("width").get<std::size_t>();
    c.edge_hidden = j.at("edge_hidden").get<std::size_t>();
    c.node_hidden = j.at("node_hidden").get<std::size_t>();
    c.down_hidden = j.at("down_hidden").get<std::size_t>();
    c.emb_dim = j.at("emb_dim").get<std::size_t>();
    c.head_hidden = j.at("head_hidden").get<std::vector<std::size_t>>();
    c.attn_hidden = j.at("attn_hidden").get<std::size_t>();
    c.encode_mode = encode_mode_from(j.at("encode_mode").get<std::string>());
    c.node_context = context_mode_from(j.at("node_context").get<std::string>());
    c.edge_context = context_mode_from(j.at("edge_context").get<std::string>());
    c.full_edge_keys = j.at("full_edge_keys").get<bool>();
    c.threshold = j.at("threshold").get<double>();
    validate(c);
    return c;
}

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline void put_u64(std::ostream& out, std::uint64_t x) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xff);
    out.write(b, 8);
}

inline std::uint64_t take_u64(std::istream& in) {
    char b[8];
    in.read(b, 8);
    require(in.good(), "checkpoint: truncated file");
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i]))
                                     << (8 * i);
    return x;
}

constexpr char kMagic[8] = {'G', '2', 'G', 'M', '0', '0', '0', '1'};

}  // namespace detail

// Binary checkpoint: magic, config JSON with its digest, then each named
// parameter tensor as name, shape, and raw little-endian doubles.
inline void save_checkpoint(const ModelParams& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "checkpoint: cannot write ", path);
    out.write(detail::kMagic, 8);
    const std::string cfg = config_to_json(p.config).dump();
    detail::put_u64(out, cfg.size());
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    detail::put_u64(out, detail::fnv1a64(cfg));
    const ParamMap params = p.params();
    detail::put_u64(out, params.size());
    for (const auto& [name, v] : params) {
        detail::put_u64(out, name.size());
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        detail::put_u64(out, v->value.shape.size());
        for (std::size_t d : v->value.shape) detail::put_u64(out, d);
        for (double x : v->value.v) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, 8);
            detail::put_u64(out, bits);
        }
    }
    require(out.good(), "checkpoint: write to ", path, " failed");
}

inline ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "checkpoint: cannot open ", path);
    char magic[8];
    in.read(magic, 8);
    require(in.good() && std::memcmp(magic, detail::kMagic, 8) == 0,
            "checkpoint: ", path, " is not a model checkpoint (bad magic)");
    const std::uint64_t cfg_len = detail::take_u64(in);
    require(cfg_len < (1u << 20), "checkpoint: config block of ", cfg_len, " bytes");
    std::string cfg(cfg_len, '\0');
    in.read(cfg.data(), static_cast<std::streamsize>(cfg_len));
    require(in.good(), "checkpoint: truncated config");
    const std::uint64_t digest = detail::take_u64(in);
    require(digest == detail::fnv1a64(cfg),
            "checkpoint: config digest mismatch, the file is corrupt or edited");
    ModelConfig config = config_from_json(nlohmann::json::parse(cfg));
    Rng rng(0);
    ModelParams p(config, rng);
    ParamMap params = p.params();
    const std::uint64_t count = detail::take_u64(in);
    require(count == params.size(), "checkpoint: holds ", count, " tensors, these params need ",
            params.size());
    for (auto& [name, v] : params) {
        const std::uint64_t name_len = detail::take_u64(in);
        require(name_len < 4096, "checkpoint: tensor name of ", name_len, " bytes");
        std::string got(name_len, '\0');
        in.read(got.data(), static_cast<std::streamsize>(name_len));
        require(in.good() && got == name, "checkpoint: expected tensor '", name, "', found '",
                got, "'");
        const std::uint64_t ndim = detail::take_u64(in);
        require(ndim == v->value.shape.size(), "checkpoint: tensor '", name, "' has ", ndim,
                " dimensions, expected ", v->value.shape.size());
        for (std::size_t d : v->value.shape) {
            const std::uint64_t got_d = detail::take_u64(in);
            require(got_d == d, "checkpoint: tensor '", name, "' dimension ", got_d,
                    " does not match ", d);
        }
        for (double& x : v->value.v) {
            const std::uint64_t bits = detail::take_u64(in);
            std::memcpy(&x, &bits, 8);
        }
    }
    return p;
}

}  // namespace g2g
