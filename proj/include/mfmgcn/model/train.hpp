// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/split.hpp"
#include "mfmgcn/model/model.hpp"

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfmgcn::model {

/// Normalized splits whose factor 0 is the forecast target.
struct ForecastData {
    data::Splits splits;
    data::NormStats stats;
    std::string target;
    std::vector<std::string> inputs;  // target first
    data::WindowSpec windows;
};

/// Selects [target, extra inputs...], splits in time, and z-scores every
/// split with statistics of the training split.
ForecastData prepare_forecast_data(const data::WeatherSeriesDataset& ds, const std::string& target,
                                   const std::vector<std::string>& extra_inputs, const data::SplitScheme& scheme,
                                   const data::WindowSpec& windows);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;  // mean MAE over the epoch's training windows
    double val_mae = 0.0;
    double lr = 0.0;
    double wall_seconds = 0.0;
    bool improved = false;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_mae = 0.0;
    bool stopped_early = false;
    double total_wall_seconds = 0.0;
};

/// One JSON object per line. Wall-clock fields are left out unless requested
/// so that equal runs produce equal files.
std::string history_jsonl(const TrainHistory& h, bool include_wall_time = false);

struct TrainResult {
    MfmgcnModel best;
    TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// MAE on normalized targets, Adam, stepwise learning-rate decay, best model
/// by strictly lower validation MAE, early stop after `patience` epochs
/// without improvement. Throws NumericError on a non-finite loss.
TrainResult train(const MfmgcnModel& init, const ForecastData& data, const graphs::StaticGraphs& statics,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

struct SplitPredictions {
    tape::Tensor pred;   // [B x N x W x 1]
    tape::Tensor truth;  // [B x N x W x 1]
    std::vector<std::int64_t> origin_times;
};

SplitPredictions predict_split(const MfmgcnModel& m, const data::WeatherSeriesDataset& split,
                               const data::WindowSpec& windows, const graphs::StaticGraphs& statics,
                               std::size_t batch_size = 64);

double mean_abs_error(const tape::Tensor& pred, const tape::Tensor& truth);

} // namespace mfmgcn::model
