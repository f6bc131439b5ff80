// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/data/pipeline.hpp"

#include "mfmgcn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfmgcn::data {

DefaultCodes DefaultCodes::builtin()
{
    DefaultCodes c;
    for (const char* f : {"vv", "hv1", "hv2"}) c.codes[f] = {999999.0};
    return c;
}

bool DefaultCodes::is_default(const std::string& factor, double value) const
{
    auto it = codes.find(factor);
    if (it == codes.end()) return false;
    return std::find(it->second.begin(), it->second.end(), value) != it->second.end();
}

nlohmann::json to_json(const ScreenReport& r)
{
    nlohmann::json stations = nlohmann::json::array();
    for (const auto& s : r.stations) {
        nlohmann::json j{{"station_id", s.station_id}, {"ratio", s.ratio}, {"dropped", s.dropped}};
        if (!s.worst_factor.empty()) j["worst_factor"] = s.worst_factor;
        stations.push_back(std::move(j));
    }
    return {{"stage", r.stage}, {"max_ratio", r.max_ratio}, {"stations", stations}, {"dropped", r.dropped},
            {"note", r.note}};
}

namespace {

WeatherSeriesDataset keep_surviving(const WeatherSeriesDataset& ds, const ScreenReport& report)
{
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < report.stations.size(); ++i)
        if (!report.stations[i].dropped) keep.push_back(i);
    if (keep.empty()) {
        throw EmptyDatasetError("all " + std::to_string(ds.n()) + " stations were dropped by " + report.stage +
                                " screening (max ratio " + std::to_string(report.max_ratio) + ")");
    }
    return select_stations(ds, keep);
}

} // namespace

std::pair<WeatherSeriesDataset, ScreenReport> screen_missing(const WeatherSeriesDataset& ds, double max_ratio)
{
    ScreenReport report;
    report.stage = "missing";
    report.max_ratio = max_ratio;
    report.note = "ratio = time steps with any factor missing / total time steps";
    for (std::size_t i = 0; i < ds.n(); ++i) {
        std::size_t incomplete = 0;
        for (std::size_t t = 0; t < ds.steps; ++t) {
            for (std::size_t f = 0; f < ds.d(); ++f) {
                if (!ds.observed(i, t, f) && std::isnan(ds.value(i, t, f))) {
                    ++incomplete;
                    break;
                }
            }
        }
        StationScreen s;
        s.station_id = ds.stations[i].station_id;
        s.ratio = static_cast<double>(incomplete) / static_cast<double>(ds.steps);
        s.dropped = s.ratio > max_ratio;
        if (s.dropped) report.dropped.push_back(s.station_id);
        report.stations.push_back(std::move(s));
    }
    return {keep_surviving(ds, report), std::move(report)};
}

std::pair<WeatherSeriesDataset, ScreenReport> screen_defaults(const WeatherSeriesDataset& ds, const DefaultCodes& codes,
                                                              double max_ratio, bool require_all_factors)
{
    if (require_all_factors) {
        for (const auto& f : ds.factors)
            if (!codes.has(f)) throw ConfigError("no default code registered for factor '" + f + "'");
    }
    ScreenReport report;
    report.stage = "defaults";
    report.max_ratio = max_ratio;
    report.note = "ratio = worst per-factor fraction of cells equal to a default code";
    for (std::size_t i = 0; i < ds.n(); ++i) {
        StationScreen s;
        s.station_id = ds.stations[i].station_id;
        for (std::size_t f = 0; f < ds.d(); ++f) {
            std::size_t hits = 0;
            for (std::size_t t = 0; t < ds.steps; ++t)
                if (codes.is_default(ds.factors[f], ds.value(i, t, f))) ++hits;
            const double ratio = static_cast<double>(hits) / static_cast<double>(ds.steps);
            if (ratio > s.ratio) {
                s.ratio = ratio;
                s.worst_factor = ds.factors[f];
            }
        }
        s.dropped = s.ratio > max_ratio;
        if (s.dropped) report.dropped.push_back(s.station_id);
        report.stations.push_back(std::move(s));
    }
    WeatherSeriesDataset out = keep_surviving(ds, report);
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        if (codes.is_default(out.factors[c % out.d()], out.values[c])) {
            out.values[c] = std::numeric_limits<double>::quiet_NaN();
            out.mask[c] = 0;
        }
    }
    return {std::move(out), std::move(report)};
}

WeatherSeriesDataset interpolate_linear(const WeatherSeriesDataset& ds)
{
    WeatherSeriesDataset out = ds;
    const std::size_t T = ds.steps;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t f = 0; f < ds.d(); ++f) {
            std::size_t prev = T;  // last observed index, T = none yet
            for (std::size_t t = 0; t <= T; ++t) {
                if (t < T && !ds.observed(i, t, f)) continue;
                // t is observed (or the end sentinel); fill (prev, t)
                if (t == T && prev == T) {
                    throw UnfillableError("station " + ds.stations[i].station_id + " has no observed values for '" +
                                          ds.factors[f] + "'");
                }
                const std::size_t gap_begin = prev == T ? 0 : prev + 1;
                for (std::size_t g = gap_begin; g < t; ++g) {
                    double v;
                    if (prev == T) {
                        v = ds.value(i, t, f);
                    } else if (t == T) {
                        v = ds.value(i, prev, f);
                    } else {
                        const double w = static_cast<double>(g - prev) / static_cast<double>(t - prev);
                        v = ds.value(i, prev, f) + w * (ds.value(i, t, f) - ds.value(i, prev, f));
                    }
                    out.value(i, g, f) = v;
                }
                prev = t;
            }
        }
    }
    std::fill(out.mask.begin(), out.mask.end(), std::uint8_t{1});
    return out;
}

PipelineResult run_pipeline(const WeatherSeriesDataset& ds, const DefaultCodes& codes, double max_missing,
                            double max_default)
{
    auto [after_missing, missing_report] = screen_missing(ds, max_missing);
    auto [after_defaults, default_report] = screen_defaults(after_missing, codes, max_default);
    return {interpolate_linear(after_defaults), std::move(missing_report), std::move(default_report)};
}

} // namespace mfmgcn::data
