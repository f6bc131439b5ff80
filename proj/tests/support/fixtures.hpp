// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/dataset.hpp"

#include <limits>
#include <random>
#include <string>

namespace mfmgcn::testing {

/// N stations on a small grid, T hourly steps, the given factors; values
/// uniform in [lo, hi), fully observed.
inline data::WeatherSeriesDataset random_dataset(std::size_t n, std::size_t t, std::vector<std::string> factors,
                                                 std::mt19937_64& rng, double lo = 0.0, double hi = 10.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    data::WeatherSeriesDataset ds;
    ds.factors = std::move(factors);
    ds.steps = t;
    ds.time_start = 1577836800;
    for (std::size_t i = 0; i < n; ++i) {
        ds.stations.push_back({"st" + std::to_string(i), 30.0 + 0.5 * static_cast<double>(i % 7),
                               110.0 + 0.7 * static_cast<double>(i / 7), 10.0 * static_cast<double>(i)});
    }
    ds.values.resize(n * t * ds.factors.size());
    for (double& v : ds.values) v = u(rng);
    ds.mask.assign(ds.values.size(), 1);
    return ds;
}

inline void mark_missing(data::WeatherSeriesDataset& ds, std::size_t i, std::size_t t, std::size_t f)
{
    ds.value(i, t, f) = std::numeric_limits<double>::quiet_NaN();
    ds.mask[ds.index(i, t, f)] = 0;
}

inline void mark_default(data::WeatherSeriesDataset& ds, std::size_t i, std::size_t t, std::size_t f, double code)
{
    ds.value(i, t, f) = code;
    ds.mask[ds.index(i, t, f)] = 0;
}

} // namespace mfmgcn::testing
