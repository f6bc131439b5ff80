// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfmgcn::data {

/// Short names of the twenty meteorological factors a station file may carry.
inline constexpr std::array<std::string_view, 20> kFactorNames = {
    "ap", "wvp", "t", "mxt", "mnt", "dt", "st", "rh", "ws", "mws",
    "wd", "mwd", "vv", "hv1", "hv2", "p1", "p2", "p3", "p4", "p5"};

bool is_known_factor(std::string_view name);

struct StationMeta {
    std::string station_id;
    double lat = 0.0;  // degrees
    double lon = 0.0;  // degrees
    double alt = 0.0;  // meters

    bool operator==(const StationMeta&) const = default;
};

/// Per-factor z-score parameters, fitted on the training split.
struct NormStats {
    std::vector<std::string> factors;
    std::vector<double> mean;
    std::vector<double> std;

    bool operator==(const NormStats&) const = default;
};

/// Multi-station hourly series. values and mask are [N][T][D] row-major.
/// Cells that were never observed hold NaN; cells that carried a sentinel
/// default code keep the raw code until screening. Both have mask == 0.
struct WeatherSeriesDataset {
    std::vector<StationMeta> stations;
    std::vector<std::string> factors;
    std::size_t steps = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;
    std::int64_t time_start = 0;  // seconds since epoch, UTC
    std::int64_t time_step = 3600;
    std::optional<NormStats> norm;

    std::size_t n() const { return stations.size(); }
    std::size_t t() const { return steps; }
    std::size_t d() const { return factors.size(); }

    std::size_t index(std::size_t station, std::size_t step, std::size_t factor) const
    {
        return (station * steps + step) * factors.size() + factor;
    }
    double value(std::size_t i, std::size_t t, std::size_t f) const { return values[index(i, t, f)]; }
    double& value(std::size_t i, std::size_t t, std::size_t f) { return values[index(i, t, f)]; }
    bool observed(std::size_t i, std::size_t t, std::size_t f) const { return mask[index(i, t, f)] != 0; }

    // Throws SchemaError for an absent factor.
    std::size_t factor_index(std::string_view name) const;
    std::optional<std::size_t> find_factor(std::string_view name) const;

    bool fully_observed() const;

    // Structural checks: sizes, coordinate ranges, unique ids, finite observed values.
    void validate() const;

    bool operator==(const WeatherSeriesDataset&) const;
};

/// Copy restricted to the given factors, in the given order.
WeatherSeriesDataset select_factors(const WeatherSeriesDataset& ds, const std::vector<std::string>& names);

/// Copy restricted to time steps [begin, end).
WeatherSeriesDataset slice_time(const WeatherSeriesDataset& ds, std::size_t begin, std::size_t end);

/// Copy restricted to the listed station indices, in the given order.
WeatherSeriesDataset select_stations(const WeatherSeriesDataset& ds, const std::vector<std::size_t>& keep);

// "YYYY-MM-DD[T| ]HH:MM[:SS]" interpreted as UTC, no timezone conversion.
std::int64_t parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t seconds);

/// Great-circle distance on a sphere of radius 6371 km.
double haversine_km(const StationMeta& a, const StationMeta& b);

inline constexpr double kEarthRadiusKm = 6371.0;

} // namespace mfmgcn::data
