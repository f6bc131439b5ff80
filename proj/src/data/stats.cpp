// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/data/stats.hpp"

#include "mfmgcn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mfmgcn::data {

double quantile_linear(std::span<const double> sorted, double p)
{
    if (sorted.empty()) throw ConfigError("quantile of an empty series");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats boxplot_stats(std::span<const double> series)
{
    if (series.empty()) throw ConfigError("boxplot_stats: empty series");
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());

    BoxStats b;
    b.q1 = quantile_linear(sorted, 0.25);
    b.median = quantile_linear(sorted, 0.5);
    b.q3 = quantile_linear(sorted, 0.75);
    b.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
    const double iqr = b.q3 - b.q1;
    b.lower_whisker = b.q1 - 1.5 * iqr;
    b.upper_whisker = b.q3 + 1.5 * iqr;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i] < b.lower_whisker || series[i] > b.upper_whisker) b.outlier_indices.push_back(i);
    return b;
}

NormStats fit_norm_stats(const WeatherSeriesDataset& train)
{
    NormStats s;
    s.factors = train.factors;
    for (std::size_t f = 0; f < train.d(); ++f) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < train.n(); ++i)
            for (std::size_t t = 0; t < train.steps; ++t)
                if (train.observed(i, t, f)) {
                    sum += train.value(i, t, f);
                    ++count;
                }
        if (count == 0) throw ConfigError("factor '" + train.factors[f] + "' has no observed training values");
        const double mean = sum / static_cast<double>(count);
        double ss = 0.0;
        for (std::size_t i = 0; i < train.n(); ++i)
            for (std::size_t t = 0; t < train.steps; ++t)
                if (train.observed(i, t, f)) {
                    const double d = train.value(i, t, f) - mean;
                    ss += d * d;
                }
        const double sd = std::sqrt(ss / static_cast<double>(count));
        if (!(sd > 0.0)) throw ConfigError("factor '" + train.factors[f] + "' has zero variance on the training split");
        s.mean.push_back(mean);
        s.std.push_back(sd);
    }
    return s;
}

WeatherSeriesDataset apply_normalization(const WeatherSeriesDataset& ds, const NormStats& stats)
{
    if (ds.norm) throw ConfigError("dataset is already normalized");
    if (stats.factors != ds.factors) throw SchemaError("normalization statistics cover different factors");
    WeatherSeriesDataset out = ds;
    const std::size_t D = ds.d();
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        const std::size_t f = c % D;
        out.values[c] = (out.values[c] - stats.mean[f]) / stats.std[f];
    }
    out.norm = stats;
    return out;
}

std::pair<WeatherSeriesDataset, NormStats> normalize(const WeatherSeriesDataset& ds, const WeatherSeriesDataset& train)
{
    NormStats stats = fit_norm_stats(train);
    return {apply_normalization(ds, stats), stats};
}

WeatherSeriesDataset denormalize(const WeatherSeriesDataset& ds)
{
    if (!ds.norm) throw ConfigError("dataset is not normalized");
    WeatherSeriesDataset out = ds;
    const NormStats& s = *ds.norm;
    const std::size_t D = ds.d();
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        const std::size_t f = c % D;
        out.values[c] = out.values[c] * s.std[f] + s.mean[f];
    }
    out.norm.reset();
    return out;
}

nlohmann::json to_json(const NormStats& s)
{
    return {{"factors", s.factors}, {"mean", s.mean}, {"std", s.std}};
}

NormStats norm_stats_from_json(const nlohmann::json& j)
{
    NormStats s;
    try {
        s.factors = j.at("factors").get<std::vector<std::string>>();
        s.mean = j.at("mean").get<std::vector<double>>();
        s.std = j.at("std").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("normalization statistics: ") + e.what());
    }
    if (s.mean.size() != s.factors.size() || s.std.size() != s.factors.size()) {
        throw SchemaError("normalization statistics: factor, mean and std lengths differ");
    }
    return s;
}

} // namespace mfmgcn::data
