// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/graphs/adjacency.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfmgcn::graphs {

/// Static graphs keyed by fusion slot: "D" (distance), "N" (neighbor),
/// "P" (pattern mean) or "P:<factor>" when each pattern factor gets its own slot.
struct StaticGraphs {
    std::vector<std::string> station_ids;
    std::vector<std::string> slots;
    std::vector<Adjacency> graphs;
    std::vector<std::string> pattern_factors;
    std::vector<Adjacency> pattern_components;  // per-factor Pearson matrices, for inspection

    const Adjacency* find(const std::string& slot) const;
    std::size_t n() const { return station_ids.size(); }
};

struct StaticGraphConfig {
    DistanceGraphConfig distance;
    NeighborGraphConfig neighbor;
    std::vector<std::string> pattern_factors = default_pattern_factors();
    bool pattern_per_factor_slots = false;
    bool skip_absent_pattern_factors = true;
};

/// Distance and neighbor graphs from station metadata; pattern graph from
/// the training split only.
StaticGraphs build_static_graphs(const data::WeatherSeriesDataset& train, const StaticGraphConfig& cfg);

/// Reorders nodes: out[i] = in[perm[i]].
StaticGraphs permute_nodes(const StaticGraphs& g, const std::vector<std::size_t>& perm);

inline constexpr std::size_t kJsonGraphLimit = 64;
inline constexpr std::uint32_t kGraphVersion = 1;

nlohmann::json to_json(const StaticGraphs& g, const nlohmann::json& build_meta = {});
StaticGraphs static_graphs_from_json(const nlohmann::json& j);

/// JSON when N <= 64, otherwise the packed "W2KG" layout: magic, u32 version,
/// u32 N, u32 graph count, N station ids, then per graph its slot, kind,
/// parameter table and f64 [N x N] weights. force_binary overrides the size rule.
void write_static_graphs(const StaticGraphs& g, const std::filesystem::path& path, const nlohmann::json& build_meta = {},
                         bool force_binary = false);

/// Detects JSON or W2KG by content.
StaticGraphs read_static_graphs(const std::filesystem::path& path);

} // namespace mfmgcn::graphs
