// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/split.hpp"
#include "mfmgcn/tape/tensor.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace mfmgcn::baselines {

/// Repeats the last input step: [N x W' x D] -> [N x W x D], or
/// [B x N x W' x D] -> [B x N x W x D].
tape::Tensor persistence_forecast(const tape::Tensor& window_inputs, std::size_t horizon);

enum class RegressionKind { linear, ridge, kernel_ridge };
enum class KernelKind { rbf, linear };

RegressionKind parse_regression_kind(std::string_view name);  // linear | ridge | krr | kernel_ridge
std::string_view to_string(RegressionKind kind);

struct RegressionConfig {
    RegressionKind kind = RegressionKind::ridge;
    double lambda = 1.0;           // forced to 0 for linear
    std::optional<double> gamma;   // RBF width; unset: 1 / (W' * var(train inputs))
    KernelKind kernel = KernelKind::rbf;
};

/// Direct multi-step regressor for one station: one output per horizon step.
/// Inputs and targets are centered with training means; the intercept is
/// not penalized.
struct StationRegressor {
    std::vector<double> x_mean;  // [W']
    std::vector<double> y_mean;  // [W]
    std::vector<double> coef;    // [W' x W] for linear/ridge
    std::vector<double> dual;    // [M x W] for kernel ridge
    std::vector<double> train_x; // [M x W'] centered, kernel ridge only
    std::size_t samples = 0;
};

struct RegressionModel {
    RegressionConfig cfg;
    std::size_t input_len = 0;
    std::size_t horizon = 0;
    double gamma = 0.0;
    std::vector<StationRegressor> stations;
    bool fitted = false;
};

/// x: [M x W'] rows of features, y: [M x W] targets.
StationRegressor fit_station(const std::vector<double>& x, const std::vector<double>& y, std::size_t m,
                             std::size_t input_len, std::size_t horizon, const RegressionConfig& cfg, double gamma);

/// Fits one regressor per station on every training window of factor 0.
RegressionModel fit_regression(const data::WeatherSeriesDataset& train, const data::WindowSpec& windows,
                               const RegressionConfig& cfg);

/// window_inputs [B x N x W' x D] (factor 0 used) -> [B x N x W x 1].
tape::Tensor predict_regression(const RegressionModel& model, const tape::Tensor& window_inputs);

/// Prediction for one station from a single W'-step feature row.
std::vector<double> predict_station(const RegressionModel& model, std::size_t station, const std::vector<double>& x);

} // namespace mfmgcn::baselines
