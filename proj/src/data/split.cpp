// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/data/split.hpp"

#include "mfmgcn/errors.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace mfmgcn::data {

namespace {

template <typename T>
T parse_number(std::string_view s, std::string_view text)
{
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("cannot parse split scheme '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> tokens(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto p = text.find(sep, start);
        out.push_back(text.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

} // namespace

SplitScheme parse_split(std::string_view text)
{
    if (text.find(':') != std::string_view::npos) {
        const auto t = tokens(text, ':');
        if (t.size() != 3) throw ConfigError("ratio split needs three parts: '" + std::string(text) + "'");
        return RatioSplit{parse_number<double>(t[0], text), parse_number<double>(t[1], text),
                          parse_number<double>(t[2], text)};
    }
    const auto t = tokens(text, ',');
    if (t.size() != 4) throw ConfigError("explicit split needs four boundaries: '" + std::string(text) + "'");
    ExplicitSplit e;
    for (std::size_t i = 0; i < 4; ++i) e.bounds[i] = parse_number<std::size_t>(t[i], text);
    return e;
}

std::array<std::size_t, 4> split_bounds(std::size_t steps, const SplitScheme& scheme)
{
    std::array<std::size_t, 4> b{};
    if (const auto* r = std::get_if<RatioSplit>(&scheme)) {
        if (!(r->train > 0 && r->val >= 0 && r->test >= 0)) throw ConfigError("split ratios must be non-negative");
        const double total = r->train + r->val + r->test;
        const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(steps) * r->train / total));
        const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(steps) * r->val / total));
        b = {0, n_train, n_train + n_val, steps};
    } else {
        b = std::get<ExplicitSplit>(scheme).bounds;
        if (b[3] > steps) {
            throw ConfigError("split end " + std::to_string(b[3]) + " exceeds series length " + std::to_string(steps));
        }
    }
    if (!(b[0] < b[1] && b[1] <= b[2] && b[2] <= b[3])) throw ConfigError("split boundaries must be ordered");
    return b;
}

Splits split_temporal(const WeatherSeriesDataset& ds, const SplitScheme& scheme)
{
    const auto b = split_bounds(ds.steps, scheme);
    return {slice_time(ds, b[0], b[1]), slice_time(ds, b[1], b[2]), slice_time(ds, b[2], b[3]), b};
}

std::vector<std::size_t> window_origins(std::size_t steps, const WindowSpec& spec)
{
    if (spec.input_len == 0 || spec.horizon == 0 || spec.stride == 0) {
        throw ConfigError("window lengths and stride must be positive");
    }
    std::vector<std::size_t> out;
    if (spec.input_len + spec.horizon > steps) return out;
    for (std::size_t t = spec.input_len - 1; t + spec.horizon <= steps - 1; t += spec.stride) out.push_back(t);
    return out;
}

WindowBatch make_batch(const WeatherSeriesDataset& ds, std::span<const std::size_t> origins, const WindowSpec& spec)
{
    const std::size_t B = origins.size(), N = ds.n(), D = ds.d();
    const std::size_t Wi = spec.input_len, Wo = spec.horizon;
    WindowBatch batch;
    batch.inputs = tape::Tensor({B, N, Wi, D});
    batch.targets = tape::Tensor({B, N, Wo, D});
    for (std::size_t b = 0; b < B; ++b) {
        const std::size_t t = origins[b];
        if (t + 1 < Wi || t + Wo >= ds.steps) throw ConfigError("window origin " + std::to_string(t) + " out of range");
        batch.origins.push_back(t);
        batch.origin_times.push_back(ds.time_start + static_cast<std::int64_t>(t) * ds.time_step);
        for (std::size_t i = 0; i < N; ++i) {
            const double* src = &ds.values[ds.index(i, t + 1 - Wi, 0)];
            std::copy(src, src + Wi * D, &batch.inputs.data[((b * N + i) * Wi) * D]);
            const double* tgt = &ds.values[ds.index(i, t + 1, 0)];
            std::copy(tgt, tgt + Wo * D, &batch.targets.data[((b * N + i) * Wo) * D]);
        }
    }
    return batch;
}

WindowIterator::WindowIterator(const WeatherSeriesDataset& ds, WindowSpec spec, std::size_t batch_size,
                               std::optional<std::vector<std::size_t>> order)
    : ds_(ds), spec_(spec), batch_size_(batch_size)
{
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    origins_ = order ? std::move(*order) : window_origins(ds.steps, spec);
}

std::optional<WindowBatch> WindowIterator::next()
{
    if (pos_ >= origins_.size()) return std::nullopt;
    const std::size_t end = std::min(pos_ + batch_size_, origins_.size());
    auto batch = make_batch(ds_, std::span(origins_).subspan(pos_, end - pos_), spec_);
    pos_ = end;
    return batch;
}

} // namespace mfmgcn::data
