// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/eval/forecast.hpp"

#include "mfmgcn/data/binary.hpp"
#include "mfmgcn/errors.hpp"
#include "mfmgcn/model/train.hpp"

#include <fstream>

namespace mfmgcn::eval {

using tape::Tensor;

Forecast forecast_model(const model::MfmgcnModel& m, const data::WeatherSeriesDataset& split,
                        const data::WindowSpec& windows, const graphs::StaticGraphs& statics)
{
    auto p = model::predict_split(m, split, windows, statics);
    return {std::move(p.pred), std::move(p.truth), std::move(p.origin_times)};
}

namespace {

template <typename Predict>
Forecast forecast_batches(const data::WeatherSeriesDataset& split, const data::WindowSpec& windows, Predict predict)
{
    const auto origins = data::window_origins(split.steps, windows);
    if (origins.empty()) throw EmptyDatasetError("split is too short for one forecast window");
    const auto batch = data::make_batch(split, origins, windows);
    return {predict(batch.inputs), model::target_channel(batch.targets), batch.origin_times};
}

} // namespace

Forecast forecast_persistence(const data::WeatherSeriesDataset& split, const data::WindowSpec& windows)
{
    return forecast_batches(split, windows, [&](const Tensor& in) {
        return model::target_channel(baselines::persistence_forecast(in, windows.horizon));
    });
}

Forecast forecast_regression(const baselines::RegressionModel& m, const data::WeatherSeriesDataset& split,
                             const data::WindowSpec& windows)
{
    return forecast_batches(split, windows, [&](const Tensor& in) { return baselines::predict_regression(m, in); });
}

MetricsReport score_forecast(const Forecast& f, const std::string& target, const data::NormStats& stats,
                             MetricSpace space)
{
    if (space == MetricSpace::normalized) return compute_metrics(f.pred, f.truth, {target}, space);
    return compute_metrics(denormalize_forecast(f.pred, stats, {target}), denormalize_forecast(f.truth, stats, {target}),
                           {target}, space);
}

void write_predictions(const PredictionFile& p, const std::filesystem::path& path)
{
    const Tensor& v = p.values;
    if (v.rank() != 4 || v.shape[0] != p.origin_times.size() || v.shape[1] != p.station_ids.size() ||
        v.shape[3] != p.factors.size()) {
        throw ShapeError("write_predictions: values " + tape::shape_str(v.shape) + " disagree with " +
                         std::to_string(p.origin_times.size()) + " origins, " + std::to_string(p.station_ids.size()) +
                         " stations and " + std::to_string(p.factors.size()) + " factors");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    data::BinaryWriter w(out);
    w.magic("W2KP");
    w.u32(kPredictionVersion);
    const nlohmann::json header{{"factors", p.factors},
                                {"station_ids", p.station_ids},
                                {"space", to_string(p.space)},
                                {"time_step", p.time_step}};
    w.str(header.dump());
    for (std::size_t d : v.shape) w.u32(static_cast<std::uint32_t>(d));
    for (std::int64_t t : p.origin_times) w.i64(t);
    w.f64_array(v.data);
    if (!out) throw IoError("failed writing " + path.string());
}

PredictionFile read_predictions(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    data::BinaryReader r(in, path.string());
    r.expect_magic("W2KP");
    const auto version = r.u32();
    if (version != kPredictionVersion) {
        throw VersionError(path.string() + ": unsupported prediction file version " + std::to_string(version));
    }
    PredictionFile p;
    try {
        const auto header = nlohmann::json::parse(r.str());
        p.factors = header.at("factors").get<std::vector<std::string>>();
        p.station_ids = header.at("station_ids").get<std::vector<std::string>>();
        p.space = parse_metric_space(header.at("space").get<std::string>());
        p.time_step = header.at("time_step").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": bad prediction header (" + e.what() + ")");
    }
    tape::Shape shape(4);
    for (auto& d : shape) d = r.u32();
    if (shape[0] > (std::size_t{1} << 28)) throw FormatError(path.string() + ": implausible origin count");
    for (std::size_t b = 0; b < shape[0]; ++b) p.origin_times.push_back(r.i64());
    p.values = Tensor(shape, r.f64_array(tape::numel(shape)));
    if (!r.at_end()) throw FormatError(path.string() + ": trailing bytes after the prediction values");
    if (shape[1] != p.station_ids.size() || shape[3] != p.factors.size()) {
        throw FormatError(path.string() + ": value shape " + tape::shape_str(shape) + " disagrees with the header");
    }
    return p;
}

MetricsReport score_external(const PredictionFile& p, const data::WeatherSeriesDataset& truth)
{
    const Tensor& v = p.values;
    const std::size_t B = v.shape.at(0), N = v.shape.at(1), W = v.shape.at(2), D = v.shape.at(3);
    if (N != truth.n()) {
        throw ShapeError("score_external: predictions " + tape::shape_str(v.shape) + " cover " + std::to_string(N) +
                         " stations, truth has " + std::to_string(truth.n()));
    }
    for (std::size_t i = 0; i < N; ++i) {
        if (p.station_ids[i] != truth.stations[i].station_id) {
            throw ShapeError("score_external: station " + std::to_string(i) + " is '" + p.station_ids[i] +
                             "' in the predictions but '" + truth.stations[i].station_id + "' in the truth data");
        }
    }
    if (p.time_step != truth.time_step) throw ShapeError("score_external: prediction and truth time steps differ");
    const bool truth_normalized = truth.norm.has_value();
    if (truth_normalized != (p.space == MetricSpace::normalized)) {
        throw ConfigError(std::string("score_external: predictions are in ") + std::string(to_string(p.space)) +
                          " space but the truth data is " + (truth_normalized ? "normalized" : "physical"));
    }
    std::vector<std::size_t> cols;
    for (const auto& f : p.factors) {
        const auto k = truth.find_factor(f);
        if (!k) throw SchemaError("score_external: truth data has no factor '" + f + "'");
        cols.push_back(*k);
    }
    Tensor y({B, N, W, D});
    for (std::size_t b = 0; b < B; ++b) {
        const std::int64_t offset = p.origin_times[b] - truth.time_start;
        if (offset < 0 || offset % truth.time_step != 0) {
            throw ShapeError("score_external: origin " + data::format_timestamp(p.origin_times[b]) + " is not a time step of the truth data");
        }
        const auto t = static_cast<std::size_t>(offset / truth.time_step);
        if (t + W >= truth.steps) {
            throw ShapeError("score_external: origin " + data::format_timestamp(p.origin_times[b]) + " lacks " +
                             std::to_string(W) + " future steps in the truth data " + std::to_string(truth.steps) + " steps long");
        }
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t h = 0; h < W; ++h)
                for (std::size_t f = 0; f < D; ++f) y.data[((b * N + i) * W + h) * D + f] = truth.value(i, t + 1 + h, cols[f]);
    }
    return compute_metrics(v, y, p.factors, p.space);
}

} // namespace mfmgcn::eval
