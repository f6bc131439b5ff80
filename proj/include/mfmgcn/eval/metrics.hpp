// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/dataset.hpp"
#include "mfmgcn/tape/tensor.hpp"

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mfmgcn::eval {

enum class MetricSpace { normalized, physical };

std::string_view to_string(MetricSpace space);
MetricSpace parse_metric_space(std::string_view name);

struct FactorMetrics {
    std::string factor;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    std::vector<double> horizon_mae;   // [W]
    std::vector<double> horizon_rmse;  // [W]
};

struct MetricsReport {
    std::size_t batch = 0, nodes = 0, horizon = 0, features = 0;
    MetricSpace space = MetricSpace::normalized;
    std::vector<FactorMetrics> factors;
    // Pooled over every factor.
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
};

/// pred and truth are [B x N x W x D]. Factor names default to f0, f1, ...
MetricsReport compute_metrics(const tape::Tensor& pred, const tape::Tensor& truth,
                              std::vector<std::string> factor_names = {},
                              MetricSpace space = MetricSpace::normalized);

/// x * std + mean per factor on the last axis.
tape::Tensor denormalize_forecast(const tape::Tensor& x, const data::NormStats& stats,
                                  const std::vector<std::string>& factors);

/// Sorted keys, so dumps are stable across runs.
nlohmann::json to_json(const MetricsReport& r);

struct HorizonCurve {
    std::string label;
    std::string factor;
    std::vector<double> mae;
    std::vector<double> rmse;
};

HorizonCurve horizon_curve(const MetricsReport& r, std::string label, std::size_t factor = 0);
nlohmann::json to_json(const std::vector<HorizonCurve>& curves);
/// Columns: label,factor,step,mae,rmse with 1-based steps.
std::string to_csv(const std::vector<HorizonCurve>& curves);

} // namespace mfmgcn::eval
