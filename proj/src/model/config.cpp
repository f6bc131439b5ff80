// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/model/config.hpp"

#include "mfmgcn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mfmgcn::model {

bool ModelConfig::uses(const std::string& slot) const
{
    return std::find(graphs.begin(), graphs.end(), slot) != graphs.end();
}

std::size_t ModelConfig::output_time() const
{
    std::size_t t = input_len;
    for (const auto& b : blocks) {
        const std::size_t k = *std::max_element(b.kernels.begin(), b.kernels.end());
        t = t >= k ? t - (k - 1) : 0;
    }
    return t;
}

void validate(const ModelConfig& cfg)
{
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (cfg.n_nodes == 0 || cfg.input_len == 0 || cfg.horizon == 0 || cfg.n_features == 0) {
        fail("model sizes (nodes, input length, horizon, features) must be positive");
    }
    if (cfg.blocks.empty()) fail("model needs at least one ST-block");
    if (cfg.graphs.empty()) fail("model needs at least one fusion graph");
    for (std::size_t s = 0; s < cfg.graphs.size(); ++s)
        for (std::size_t r = s + 1; r < cfg.graphs.size(); ++r)
            if (cfg.graphs[s] == cfg.graphs[r]) fail("fusion slot '" + cfg.graphs[s] + "' listed twice");
    if (cfg.embed_dim == 0) fail("embed_dim must be positive");
    if (!(cfg.alpha > 0.0) || !(cfg.beta > 0.0)) fail("alpha and beta must be positive");

    std::size_t t = cfg.input_len;
    std::size_t prev_k = 0, prev_field = 0;
    for (std::size_t b = 0; b < cfg.blocks.size(); ++b) {
        const auto& blk = cfg.blocks[b];
        const std::string where = "block " + std::to_string(b) + ": ";
        if (blk.cheb_order < 1) fail(where + "Chebyshev order must be at least 1");
        if (blk.kernels.empty()) fail(where + "needs at least one temporal branch");
        if (blk.channels_in == 0 || blk.channels_out == 0) fail(where + "channel counts must be positive");
        const std::size_t expected_in = b == 0 ? cfg.n_features : cfg.blocks[b - 1].channels_out;
        if (blk.channels_in != expected_in) {
            fail(where + "channels_in " + std::to_string(blk.channels_in) + " does not match the incoming " +
                 std::to_string(expected_in));
        }
        for (std::size_t k : blk.kernels)
            if (k == 0 || k % 2 == 0) fail(where + "temporal kernel " + std::to_string(k) + " must be odd");
        const std::size_t field = *std::max_element(blk.kernels.begin(), blk.kernels.end());
        if (field > t) {
            fail(where + "temporal kernel " + std::to_string(field) + " exceeds the remaining time length " +
                 std::to_string(t));
        }
        if (blk.cheb_order < prev_k) fail(where + "Chebyshev order decreases across blocks");
        if (field < prev_field) fail(where + "temporal receptive field decreases across blocks");
        prev_k = blk.cheb_order;
        prev_field = field;
        t -= field - 1;
    }
}

double lr_at_epoch(const TrainConfig& cfg, std::size_t epoch)
{
    if (epoch == 0) throw ConfigError("epochs are 1-based");
    if (cfg.lr_decay_every == 0) return cfg.lr0;
    const std::size_t decays = std::min((epoch - 1) / cfg.lr_decay_every, cfg.decay_window / cfg.lr_decay_every);
    const double g = cfg.decay_mode == LrDecayMode::retain ? 1.0 - cfg.lr_decay_factor : cfg.lr_decay_factor;
    return cfg.lr0 * std::pow(g, static_cast<double>(decays));
}

nlohmann::json to_json(const StBlockConfig& c)
{
    return {{"cheb_order", c.cheb_order},
            {"temporal_branch_kernels", c.kernels},
            {"channels_in", c.channels_in},
            {"channels_out", c.channels_out}};
}

nlohmann::json to_json(const ModelConfig& c)
{
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : c.blocks) blocks.push_back(to_json(b));
    return {{"n_nodes", c.n_nodes}, {"input_len", c.input_len}, {"horizon", c.horizon},
            {"n_features", c.n_features}, {"blocks", blocks},       {"graphs", c.graphs},
            {"embed_dim", c.embed_dim}, {"alpha", c.alpha},         {"beta", c.beta},
            {"seed", c.seed}};
}

nlohmann::json to_json(const TrainConfig& c)
{
    return {{"epochs", c.epochs},
            {"early_stop_patience", c.early_stop_patience},
            {"batch_size", c.batch_size},
            {"lr0", c.lr0},
            {"lr_decay_factor", c.lr_decay_factor},
            {"lr_decay_every", c.lr_decay_every},
            {"decay_window", c.decay_window},
            {"decay_mode", c.decay_mode == LrDecayMode::retain ? "retain" : "multiply"},
            {"seed", c.seed}};
}

namespace {

template <typename T>
void field(const nlohmann::json& j, const char* key, T& out, bool strict)
{
    if (!j.contains(key)) {
        if (strict) throw VersionError(std::string("configuration field '") + key + "' is missing");
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("configuration field '") + key + "' has the wrong type");
    }
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys, const char* what)
{
    if (!j.is_object()) throw ConfigError(std::string(what) + " configuration must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; })) {
            throw ConfigError(std::string("unknown ") + what + " configuration field '" + k + "'");
        }
    }
}

} // namespace

void from_json(const nlohmann::json& j, StBlockConfig& out, bool strict)
{
    reject_unknown(j, {"cheb_order", "temporal_branch_kernels", "channels_in", "channels_out"}, "block");
    field(j, "cheb_order", out.cheb_order, strict);
    field(j, "temporal_branch_kernels", out.kernels, strict);
    field(j, "channels_in", out.channels_in, strict);
    field(j, "channels_out", out.channels_out, strict);
}

void from_json(const nlohmann::json& j, ModelConfig& out, bool strict)
{
    reject_unknown(j,
                   {"n_nodes", "input_len", "horizon", "n_features", "blocks", "graphs", "embed_dim", "alpha", "beta",
                    "seed"},
                   "model");
    field(j, "n_nodes", out.n_nodes, strict);
    field(j, "input_len", out.input_len, strict);
    field(j, "horizon", out.horizon, strict);
    field(j, "n_features", out.n_features, strict);
    if (j.contains("blocks")) {
        out.blocks.clear();
        for (const auto& b : j.at("blocks")) {
            StBlockConfig blk;
            from_json(b, blk, strict);
            out.blocks.push_back(blk);
        }
    } else if (strict) {
        throw VersionError("configuration field 'blocks' is missing");
    }
    field(j, "graphs", out.graphs, strict);
    field(j, "embed_dim", out.embed_dim, strict);
    field(j, "alpha", out.alpha, strict);
    field(j, "beta", out.beta, strict);
    field(j, "seed", out.seed, strict);
}

void from_json(const nlohmann::json& j, TrainConfig& out, bool strict)
{
    reject_unknown(j,
                   {"epochs", "early_stop_patience", "batch_size", "lr0", "lr_decay_factor", "lr_decay_every",
                    "decay_window", "decay_mode", "seed"},
                   "training");
    field(j, "epochs", out.epochs, strict);
    field(j, "early_stop_patience", out.early_stop_patience, strict);
    field(j, "batch_size", out.batch_size, strict);
    field(j, "lr0", out.lr0, strict);
    field(j, "lr_decay_factor", out.lr_decay_factor, strict);
    field(j, "lr_decay_every", out.lr_decay_every, strict);
    field(j, "decay_window", out.decay_window, strict);
    std::string mode = out.decay_mode == LrDecayMode::retain ? "retain" : "multiply";
    field(j, "decay_mode", mode, strict);
    if (mode == "retain") {
        out.decay_mode = LrDecayMode::retain;
    } else if (mode == "multiply") {
        out.decay_mode = LrDecayMode::multiply;
    } else {
        throw ConfigError("decay_mode must be 'retain' or 'multiply'");
    }
    field(j, "seed", out.seed, strict);
}

} // namespace mfmgcn::model
