// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfmgcn::model {

struct StBlockConfig {
    std::size_t cheb_order = 2;                  // K
    std::vector<std::size_t> kernels{3};         // temporal branches, odd lengths
    std::size_t channels_in = 1;
    std::size_t channels_out = 32;

    bool operator==(const StBlockConfig&) const = default;
};

struct ModelConfig {
    std::size_t n_nodes = 20;
    std::size_t input_len = 12;  // W'
    std::size_t horizon = 12;    // W
    std::size_t n_features = 1;  // D, input channels; channel 0 is the target
    std::vector<StBlockConfig> blocks{{2, {3}, 1, 32}, {3, {3, 5}, 32, 32}};
    std::vector<std::string> graphs{"D", "N", "P", "L", "K"};  // fusion slots
    std::size_t embed_dim = 16;
    double alpha = 3.0;
    double beta = 3.0;
    std::uint64_t seed = 7;

    bool uses(const std::string& slot) const;
    std::size_t output_time() const;  // time steps left after all blocks
    bool operator==(const ModelConfig&) const = default;
};

/// Throws ConfigError for non-monotone K or receptive fields, even or
/// oversized kernels, and channel mismatches, naming the block.
void validate(const ModelConfig& cfg);

enum class LrDecayMode { retain, multiply };

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t early_stop_patience = 50;
    std::size_t batch_size = 32;
    double lr0 = 1e-2;
    double lr_decay_factor = 0.05;
    std::size_t lr_decay_every = 10;
    std::size_t decay_window = 50;
    LrDecayMode decay_mode = LrDecayMode::retain;  // lr *= (1 - f) or lr *= f
    std::uint64_t seed = 7;

    bool operator==(const TrainConfig&) const = default;
};

/// Learning rate in effect during a 1-based epoch.
double lr_at_epoch(const TrainConfig& cfg, std::size_t epoch);

nlohmann::json to_json(const StBlockConfig& c);
nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const TrainConfig& c);

/// strict: every field must be present (checkpoint loading; a missing field
/// is a VersionError). Otherwise absent fields keep the values already in `out`.
void from_json(const nlohmann::json& j, StBlockConfig& out, bool strict);
void from_json(const nlohmann::json& j, ModelConfig& out, bool strict);
void from_json(const nlohmann::json& j, TrainConfig& out, bool strict);

} // namespace mfmgcn::model
