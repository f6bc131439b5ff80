// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/dataset.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace mfmgcn::data {

/// Box-plot summary. Quartiles use linear interpolation between order
/// statistics (h = (n-1)p). Whiskers sit at q1 - 1.5 IQR and q3 + 1.5 IQR;
/// points strictly outside them are flagged, never removed.
struct BoxStats {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double mean = 0.0;
    double lower_whisker = 0.0;
    double upper_whisker = 0.0;
    std::vector<std::size_t> outlier_indices;
};

double quantile_linear(std::span<const double> sorted, double p);

BoxStats boxplot_stats(std::span<const double> series);

/// Per-factor statistics over the observed cells of `train`.
/// Throws ConfigError naming a factor whose spread is zero.
NormStats fit_norm_stats(const WeatherSeriesDataset& train);

WeatherSeriesDataset apply_normalization(const WeatherSeriesDataset& ds, const NormStats& stats);

/// z-score every factor with statistics fitted on `train`.
std::pair<WeatherSeriesDataset, NormStats> normalize(const WeatherSeriesDataset& ds, const WeatherSeriesDataset& train);

/// Inverse of normalize; uses ds.norm and clears it.
WeatherSeriesDataset denormalize(const WeatherSeriesDataset& ds);

nlohmann::json to_json(const NormStats& s);
NormStats norm_stats_from_json(const nlohmann::json& j);

} // namespace mfmgcn::data
