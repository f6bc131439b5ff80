// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/eval/ablation.hpp"

#include "mfmgcn/errors.hpp"
#include "mfmgcn/eval/forecast.hpp"

#include <algorithm>

namespace mfmgcn::eval {

std::string spec_name(const std::vector<std::string>& graphs)
{
    std::string name;
    for (const auto& g : graphs) name += g;
    return name;
}

namespace {

AblationSpec make_spec(std::vector<std::string> graphs, const std::vector<std::uint64_t>& seeds)
{
    return {spec_name(graphs), std::move(graphs), seeds};
}

} // namespace

std::vector<AblationSpec> table4_specs(const std::vector<std::uint64_t>& seeds)
{
    std::vector<AblationSpec> specs;
    for (const auto& g : all_graph_slots()) specs.push_back(make_spec({g}, seeds));
    specs.push_back(make_spec({"D", "N"}, seeds));
    specs.push_back(make_spec({"D", "N", "P"}, seeds));
    for (const auto& left_out : all_graph_slots()) {
        std::vector<std::string> g;
        for (const auto& s : all_graph_slots())
            if (s != left_out) g.push_back(s);
        specs.push_back(make_spec(g, seeds));
    }
    specs.push_back(make_spec(all_graph_slots(), seeds));
    return specs;
}

std::vector<AblationSpec> single_graph_specs(const std::vector<std::uint64_t>& seeds)
{
    std::vector<AblationSpec> specs;
    for (const auto& g : all_graph_slots()) specs.push_back(make_spec({g}, seeds));
    specs.push_back(make_spec(all_graph_slots(), seeds));
    return specs;
}

const AblationRow* AblationTable::find(const std::string& name) const
{
    for (const auto& r : rows)
        if (r.spec.name == name) return &r;
    return nullptr;
}

namespace {

AblationRow run_spec_impl(const AblationSpec& spec, const model::ForecastData& data,
                          const graphs::StaticGraphs& statics, const model::ModelConfig& base,
                          const model::TrainConfig& train_cfg, const AblationProgress& progress)
{
    if (spec.graphs.empty()) throw ConfigError("ablation spec '" + spec.name + "' selects no graphs");
    if (spec.seeds.empty()) throw ConfigError("ablation spec '" + spec.name + "' has no seeds");
    for (const auto& g : spec.graphs) {
        if (std::find(all_graph_slots().begin(), all_graph_slots().end(), g) == all_graph_slots().end()) {
            throw ConfigError("ablation spec '" + spec.name + "' names unknown graph '" + g + "'");
        }
    }
    AblationRow row;
    row.spec = spec;
    for (std::uint64_t seed : spec.seeds) {
        model::ModelConfig mc = base;
        mc.graphs = spec.graphs;
        mc.seed = seed;
        model::TrainConfig tc = train_cfg;
        tc.seed = seed;
        const auto result = model::train(model::build_model(mc), data, statics, tc);
        const Forecast f = forecast_model(result.best, data.splits.test, data.windows, statics);
        AblationRun run;
        run.seed = seed;
        run.epochs_run = result.history.epochs.size();
        run.best_epoch = result.history.best_epoch;
        run.best_val_mae = result.history.best_val_mae;
        run.normalized = score_forecast(f, data.target, data.stats, MetricSpace::normalized);
        run.physical = score_forecast(f, data.target, data.stats, MetricSpace::physical);
        if (progress) progress(spec, run);
        row.runs.push_back(std::move(run));
    }
    const double k = static_cast<double>(row.runs.size());
    for (const auto& r : row.runs) {
        row.mean_mae += r.normalized.mae / k;
        row.mean_rmse += r.normalized.rmse / k;
        row.mean_physical_mae += r.physical.mae / k;
        row.mean_physical_rmse += r.physical.rmse / k;
    }
    return row;
}

} // namespace

AblationRow run_spec(const AblationSpec& spec, const model::ForecastData& data, const graphs::StaticGraphs& statics,
                     const model::ModelConfig& base, const model::TrainConfig& train_cfg)
{
    return run_spec_impl(spec, data, statics, base, train_cfg, {});
}

AblationTable run_ablation(const std::vector<AblationSpec>& specs, const model::ForecastData& data,
                           const graphs::StaticGraphs& statics, const model::ModelConfig& base,
                           const model::TrainConfig& train_cfg, const AblationProgress& progress)
{
    AblationTable table;
    table.target = data.target;
    for (const auto& spec : specs) table.rows.push_back(run_spec_impl(spec, data, statics, base, train_cfg, progress));
    return table;
}

std::vector<NeighborSweepPoint> neighbor_sweep(const std::vector<std::size_t>& values, const model::ForecastData& data,
                                               const graphs::StaticGraphConfig& graph_cfg,
                                               const model::ModelConfig& base, const model::TrainConfig& train_cfg,
                                               const std::vector<std::uint64_t>& seeds,
                                               const AblationProgress& progress)
{
    std::vector<NeighborSweepPoint> out;
    for (std::size_t na : values) {
        graphs::StaticGraphConfig gc = graph_cfg;
        gc.neighbor.n_adjacent = na;
        const auto statics = graphs::build_static_graphs(data.splits.train, gc);
        AblationSpec spec{"N@" + std::to_string(na), {"N"}, seeds};
        out.push_back({na, run_spec_impl(spec, data, statics, base, train_cfg, progress)});
    }
    return out;
}

const std::vector<PublishedRow>& published_temperature_rows()
{
    static const std::vector<PublishedRow> rows{
        {"D", 1.7190, 2.5056},    {"N", 1.7420, 2.5211},    {"P", 2.3651, 3.1726},    {"L", 1.5842, 2.2753},
        {"K", 1.8267, 2.5691},    {"DN", 1.7430, 2.5342},   {"DNP", 1.6559, 2.3834},  {"NPLK", 1.5540, 2.2448},
        {"DPLK", 1.5266, 2.1925}, {"DNLK", 1.5046, 2.1769}, {"DNPK", 1.5893, 2.2887}, {"DNPL", 1.5053, 2.1677},
        {"DNPLK", 1.4418, 2.0574},
    };
    return rows;
}

nlohmann::json published_reference_json()
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : published_temperature_rows()) rows.push_back({{"name", r.name}, {"mae", r.mae}, {"rmse", r.rmse}});
    return {{"factor", "t"}, {"space", "physical"}, {"scale", "full dataset, published"}, {"rows", rows}};
}

nlohmann::json to_json(const AblationRow& row)
{
    nlohmann::json graphs = nlohmann::json::object();
    for (const auto& s : all_graph_slots())
        graphs[s] = std::find(row.spec.graphs.begin(), row.spec.graphs.end(), s) != row.spec.graphs.end();
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : row.runs) {
        runs.push_back({{"seed", r.seed},
                        {"epochs_run", r.epochs_run},
                        {"best_epoch", r.best_epoch},
                        {"best_val_mae", r.best_val_mae},
                        {"normalized", to_json(r.normalized)},
                        {"physical", to_json(r.physical)}});
    }
    return {{"name", row.spec.name},
            {"graphs", graphs},
            {"seeds", row.spec.seeds},
            {"mean_mae", row.mean_mae},
            {"mean_rmse", row.mean_rmse},
            {"mean_physical_mae", row.mean_physical_mae},
            {"mean_physical_rmse", row.mean_physical_rmse},
            {"runs", runs}};
}

nlohmann::json to_json(const AblationTable& table)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) rows.push_back(to_json(r));
    return {{"target", table.target}, {"rows", rows}};
}

nlohmann::json to_json(const std::vector<NeighborSweepPoint>& sweep)
{
    nlohmann::json points = nlohmann::json::array(), curve_mae = nlohmann::json::array(),
                   curve_rmse = nlohmann::json::array(), na = nlohmann::json::array();
    for (const auto& p : sweep) {
        nlohmann::json j = to_json(p.row);
        j["n_adjacent"] = p.n_adjacent;
        points.push_back(std::move(j));
        na.push_back(p.n_adjacent);
        curve_mae.push_back(p.row.mean_mae);
        curve_rmse.push_back(p.row.mean_rmse);
    }
    return {{"n_adjacent", na}, {"mae", curve_mae}, {"rmse", curve_rmse}, {"points", points}};
}

} // namespace mfmgcn::eval
