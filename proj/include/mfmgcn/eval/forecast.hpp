// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/baselines/baselines.hpp"
#include "mfmgcn/eval/metrics.hpp"
#include "mfmgcn/model/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mfmgcn::eval {

/// Target-channel forecasts over every window of one split.
struct Forecast {
    tape::Tensor pred;   // [B x N x W x 1]
    tape::Tensor truth;  // [B x N x W x 1]
    std::vector<std::int64_t> origin_times;
};

Forecast forecast_model(const model::MfmgcnModel& m, const data::WeatherSeriesDataset& split,
                        const data::WindowSpec& windows, const graphs::StaticGraphs& statics);
Forecast forecast_persistence(const data::WeatherSeriesDataset& split, const data::WindowSpec& windows);
Forecast forecast_regression(const baselines::RegressionModel& m, const data::WeatherSeriesDataset& split,
                             const data::WindowSpec& windows);

/// Metrics of a target forecast; physical space rescales with the split's
/// normalization statistics.
MetricsReport score_forecast(const Forecast& f, const std::string& target, const data::NormStats& stats,
                             MetricSpace space);

inline constexpr std::uint32_t kPredictionVersion = 1;

/// Packed prediction file "W2KP": magic, u32 version, JSON header string
/// {"factors", "station_ids", "space", "time_step"}, u32 B, N, W, D,
/// B i64 origin times, then f64 values [B x N x W x D].
struct PredictionFile {
    std::vector<std::string> factors;
    std::vector<std::string> station_ids;
    MetricSpace space = MetricSpace::normalized;
    std::int64_t time_step = 3600;
    std::vector<std::int64_t> origin_times;
    tape::Tensor values;
};

void write_predictions(const PredictionFile& p, const std::filesystem::path& path);
PredictionFile read_predictions(const std::filesystem::path& path);

/// Scores a prediction file against a dataset in the same space. Each
/// origin time must be a time step of `truth` with a full horizon after it.
MetricsReport score_external(const PredictionFile& p, const data::WeatherSeriesDataset& truth);

} // namespace mfmgcn::eval
