// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/dataset.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

// Station screening and gap filling. Ratios strictly above the threshold
// drop a station; a ratio equal to the threshold is retained.
namespace mfmgcn::data {

/// Sentinel values that encode "no reading" per factor.
struct DefaultCodes {
    std::map<std::string, std::vector<double>> codes;

    // 999999 for the visibility factors.
    static DefaultCodes builtin();

    bool is_default(const std::string& factor, double value) const;
    bool has(const std::string& factor) const { return codes.count(factor) != 0; }
};

struct StationScreen {
    std::string station_id;
    double ratio = 0.0;        // missing-record ratio, or worst per-factor default ratio
    std::string worst_factor;  // default screening only
    bool dropped = false;
};

struct ScreenReport {
    std::string stage;  // "missing" or "defaults"
    double max_ratio = 0.0;
    std::vector<StationScreen> stations;
    std::vector<std::string> dropped;
    std::string note;
};

nlohmann::json to_json(const ScreenReport& r);

/// Drops stations whose fraction of incomplete records (time steps with any
/// factor missing) exceeds max_ratio. Default-coded cells are not counted here.
std::pair<WeatherSeriesDataset, ScreenReport> screen_missing(const WeatherSeriesDataset& ds, double max_ratio = 0.01);

/// Drops stations where any factor's default-code fraction exceeds max_ratio;
/// surviving default cells become unobserved (mask 0, value NaN).
/// With require_all_factors, every factor must have a registered code.
std::pair<WeatherSeriesDataset, ScreenReport> screen_defaults(const WeatherSeriesDataset& ds, const DefaultCodes& codes,
                                                              double max_ratio = 0.01, bool require_all_factors = false);

/// Fills every unobserved cell by linear interpolation in time per
/// station-factor; leading/trailing gaps take the nearest observed value.
WeatherSeriesDataset interpolate_linear(const WeatherSeriesDataset& ds);

struct PipelineResult {
    WeatherSeriesDataset dataset;
    ScreenReport missing;
    ScreenReport defaults;
};

/// screen_missing -> screen_defaults -> interpolate_linear.
PipelineResult run_pipeline(const WeatherSeriesDataset& ds, const DefaultCodes& codes, double max_missing = 0.01,
                            double max_default = 0.01);

} // namespace mfmgcn::data
