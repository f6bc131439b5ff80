// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/dataset.hpp"
#include "mfmgcn/tape/tensor.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace mfmgcn::data {

/// Contiguous train:val:test proportions, e.g. 3:1:2.
struct RatioSplit {
    double train = 3.0;
    double val = 1.0;
    double test = 2.0;
};

/// Explicit boundaries b0 < b1 < b2 < b3: train [b0,b1), val [b1,b2), test [b2,b3).
struct ExplicitSplit {
    std::array<std::size_t, 4> bounds{};
};

using SplitScheme = std::variant<RatioSplit, ExplicitSplit>;

// "3:1:2" or "a,b,c,d".
SplitScheme parse_split(std::string_view text);

struct Splits {
    WeatherSeriesDataset train;
    WeatherSeriesDataset val;
    WeatherSeriesDataset test;
    std::array<std::size_t, 4> bounds{};  // in time steps of the source dataset
};

/// Ratio splits floor the train and val lengths; test takes the remainder.
std::array<std::size_t, 4> split_bounds(std::size_t steps, const SplitScheme& scheme);
Splits split_temporal(const WeatherSeriesDataset& ds, const SplitScheme& scheme);

struct WindowSpec {
    std::size_t input_len = 12;  // W'
    std::size_t horizon = 12;    // W
    std::size_t stride = 1;
};

/// Origins t (index of the last input step) with t - W' + 1 >= 0 and
/// t + W <= steps - 1. Too-short series yield no origins.
std::vector<std::size_t> window_origins(std::size_t steps, const WindowSpec& spec);

struct WindowBatch {
    tape::Tensor inputs;   // [B x N x W' x D]
    tape::Tensor targets;  // [B x N x W x D]
    std::vector<std::size_t> origins;
    std::vector<std::int64_t> origin_times;

    std::size_t size() const { return origins.size(); }
};

WindowBatch make_batch(const WeatherSeriesDataset& ds, std::span<const std::size_t> origins, const WindowSpec& spec);

/// Walks the origins of one split in the given order, batch_size at a time.
class WindowIterator {
public:
    WindowIterator(const WeatherSeriesDataset& ds, WindowSpec spec, std::size_t batch_size,
                   std::optional<std::vector<std::size_t>> order = std::nullopt);

    std::optional<WindowBatch> next();
    std::size_t total() const { return origins_.size(); }

private:
    const WeatherSeriesDataset& ds_;
    WindowSpec spec_;
    std::size_t batch_size_;
    std::vector<std::size_t> origins_;
    std::size_t pos_ = 0;
};

inline WindowIterator make_windows(const WeatherSeriesDataset& split, std::size_t input_len, std::size_t horizon,
                                   std::size_t stride = 1, std::size_t batch_size = 32)
{
    return WindowIterator(split, WindowSpec{input_len, horizon, stride}, batch_size);
}

} // namespace mfmgcn::data
