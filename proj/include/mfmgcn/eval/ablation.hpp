// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/eval/metrics.hpp"
#include "mfmgcn/model/train.hpp"

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfmgcn::eval {

inline const std::vector<std::string>& all_graph_slots()
{
    static const std::vector<std::string> slots{"D", "N", "P", "L", "K"};
    return slots;
}

struct AblationSpec {
    std::string name;
    std::vector<std::string> graphs;  // subset of D, N, P, L, K
    std::vector<std::uint64_t> seeds{7};
};

/// The thirteen fusion selections of the ablation table, in its row order:
/// five single graphs, DN, DNP, the five leave-one-out sets, all five.
std::vector<AblationSpec> table4_specs(const std::vector<std::uint64_t>& seeds);
/// Each graph alone plus the full fusion.
std::vector<AblationSpec> single_graph_specs(const std::vector<std::uint64_t>& seeds);
std::string spec_name(const std::vector<std::string>& graphs);

struct AblationRun {
    std::uint64_t seed = 0;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    double best_val_mae = 0.0;
    MetricsReport normalized;
    MetricsReport physical;
};

struct AblationRow {
    AblationSpec spec;
    std::vector<AblationRun> runs;
    double mean_mae = 0.0;   // normalized test MAE averaged over seeds
    double mean_rmse = 0.0;
    double mean_physical_mae = 0.0;
    double mean_physical_rmse = 0.0;
};

struct AblationTable {
    std::string target;
    std::vector<AblationRow> rows;
    const AblationRow* find(const std::string& name) const;
};

using AblationProgress = std::function<void(const AblationSpec&, const AblationRun&)>;

/// One training per (spec, seed): the base model config with its fusion set
/// replaced by spec.graphs and model and training seeds set to the run seed.
AblationRow run_spec(const AblationSpec& spec, const model::ForecastData& data, const graphs::StaticGraphs& statics,
                     const model::ModelConfig& base, const model::TrainConfig& train_cfg);
AblationTable run_ablation(const std::vector<AblationSpec>& specs, const model::ForecastData& data,
                           const graphs::StaticGraphs& statics, const model::ModelConfig& base,
                           const model::TrainConfig& train_cfg, const AblationProgress& progress = {});

struct NeighborSweepPoint {
    std::size_t n_adjacent = 0;
    AblationRow row;
};

/// Neighbor graph alone, rebuilt for each N_A.
std::vector<NeighborSweepPoint> neighbor_sweep(const std::vector<std::size_t>& values, const model::ForecastData& data,
                                               const graphs::StaticGraphConfig& graph_cfg,
                                               const model::ModelConfig& base, const model::TrainConfig& train_cfg,
                                               const std::vector<std::uint64_t>& seeds,
                                               const AblationProgress& progress = {});

/// Full-scale temperature results published for the thirteen fusion
/// selections, physical units. Desk-scale runs are not expected to match.
struct PublishedRow {
    std::string name;
    double mae = 0.0;
    double rmse = 0.0;
};
const std::vector<PublishedRow>& published_temperature_rows();
nlohmann::json published_reference_json();

nlohmann::json to_json(const AblationRow& row);
nlohmann::json to_json(const AblationTable& table);
nlohmann::json to_json(const std::vector<NeighborSweepPoint>& sweep);

} // namespace mfmgcn::eval
