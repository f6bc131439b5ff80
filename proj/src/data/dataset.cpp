// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/data/dataset.hpp"

#include "mfmgcn/errors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <unordered_set>

namespace mfmgcn::data {

bool is_known_factor(std::string_view name)
{
    return std::find(kFactorNames.begin(), kFactorNames.end(), name) != kFactorNames.end();
}

std::optional<std::size_t> WeatherSeriesDataset::find_factor(std::string_view name) const
{
    for (std::size_t f = 0; f < factors.size(); ++f)
        if (factors[f] == name) return f;
    return std::nullopt;
}

std::size_t WeatherSeriesDataset::factor_index(std::string_view name) const
{
    if (auto f = find_factor(name)) return *f;
    throw SchemaError("factor '" + std::string(name) + "' is not present in the dataset");
}

bool WeatherSeriesDataset::fully_observed() const
{
    return std::all_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; });
}

void WeatherSeriesDataset::validate() const
{
    if (stations.empty()) throw EmptyDatasetError("dataset has no stations");
    if (steps == 0) throw StructuralError("dataset has zero time steps");
    const std::size_t cells = n() * steps * d();
    if (values.size() != cells || mask.size() != cells) {
        throw StructuralError("dataset buffers hold " + std::to_string(values.size()) + " values / " +
                              std::to_string(mask.size()) + " mask cells, expected " + std::to_string(cells));
    }
    std::unordered_set<std::string> ids;
    for (const auto& s : stations) {
        if (!ids.insert(s.station_id).second) throw StructuralError("duplicate station id: " + s.station_id);
        if (!(s.lat >= -90.0 && s.lat <= 90.0)) throw StructuralError("latitude out of range for " + s.station_id);
        if (!(s.lon >= -180.0 && s.lon <= 180.0)) throw StructuralError("longitude out of range for " + s.station_id);
    }
    for (std::size_t c = 0; c < cells; ++c) {
        if (mask[c] && !std::isfinite(values[c])) throw StructuralError("non-finite value in an observed cell");
    }
}

bool WeatherSeriesDataset::operator==(const WeatherSeriesDataset& o) const
{
    if (stations != o.stations || factors != o.factors || steps != o.steps || mask != o.mask ||
        time_start != o.time_start || time_step != o.time_step || norm != o.norm || values.size() != o.values.size())
        return false;
    // bitwise, so NaN cells compare equal to themselves
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double a = values[i], b = o.values[i];
        if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
    }
    return true;
}

WeatherSeriesDataset select_factors(const WeatherSeriesDataset& ds, const std::vector<std::string>& names)
{
    std::vector<std::size_t> cols;
    for (const auto& name : names) cols.push_back(ds.factor_index(name));
    WeatherSeriesDataset out;
    out.stations = ds.stations;
    out.factors = names;
    out.steps = ds.steps;
    out.time_start = ds.time_start;
    out.time_step = ds.time_step;
    out.values.resize(ds.n() * ds.steps * cols.size());
    out.mask.resize(out.values.size());
    for (std::size_t i = 0; i < ds.n(); ++i)
        for (std::size_t t = 0; t < ds.steps; ++t)
            for (std::size_t k = 0; k < cols.size(); ++k) {
                out.values[out.index(i, t, k)] = ds.value(i, t, cols[k]);
                out.mask[out.index(i, t, k)] = ds.mask[ds.index(i, t, cols[k])];
            }
    if (ds.norm) {
        NormStats ns;
        for (const auto& name : names) {
            auto it = std::find(ds.norm->factors.begin(), ds.norm->factors.end(), name);
            const auto f = static_cast<std::size_t>(it - ds.norm->factors.begin());
            ns.factors.push_back(name);
            ns.mean.push_back(ds.norm->mean.at(f));
            ns.std.push_back(ds.norm->std.at(f));
        }
        out.norm = std::move(ns);
    }
    return out;
}

WeatherSeriesDataset slice_time(const WeatherSeriesDataset& ds, std::size_t begin, std::size_t end)
{
    if (begin > end || end > ds.steps) {
        throw ConfigError("time range [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") outside dataset of length " + std::to_string(ds.steps));
    }
    WeatherSeriesDataset out;
    out.stations = ds.stations;
    out.factors = ds.factors;
    out.steps = end - begin;
    out.time_start = ds.time_start + static_cast<std::int64_t>(begin) * ds.time_step;
    out.time_step = ds.time_step;
    out.norm = ds.norm;
    const std::size_t D = ds.d();
    out.values.reserve(ds.n() * out.steps * D);
    out.mask.reserve(ds.n() * out.steps * D);
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const auto from = ds.index(i, begin, 0);
        const auto to = ds.index(i, begin, 0) + out.steps * D;
        out.values.insert(out.values.end(), ds.values.begin() + from, ds.values.begin() + to);
        out.mask.insert(out.mask.end(), ds.mask.begin() + from, ds.mask.begin() + to);
    }
    return out;
}

WeatherSeriesDataset select_stations(const WeatherSeriesDataset& ds, const std::vector<std::size_t>& keep)
{
    WeatherSeriesDataset out;
    out.factors = ds.factors;
    out.steps = ds.steps;
    out.time_start = ds.time_start;
    out.time_step = ds.time_step;
    out.norm = ds.norm;
    const std::size_t block = ds.steps * ds.d();
    for (std::size_t i : keep) {
        out.stations.push_back(ds.stations.at(i));
        out.values.insert(out.values.end(), ds.values.begin() + i * block, ds.values.begin() + (i + 1) * block);
        out.mask.insert(out.mask.end(), ds.mask.begin() + i * block, ds.mask.begin() + (i + 1) * block);
    }
    return out;
}

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len)
{
    int v = 0;
    if (pos + len > text.size()) throw FormatError("truncated timestamp: " + std::string(text));
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
    if (ec != std::errc{} || ptr != text.data() + pos + len) throw FormatError("bad timestamp: " + std::string(text));
    return v;
}

} // namespace

std::int64_t parse_timestamp(std::string_view text)
{
    using namespace std::chrono;
    if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':')
        throw FormatError("timestamp must look like YYYY-MM-DDTHH:MM[:SS], got '" + std::string(text) + "'");
    const year_month_day ymd{year{parse_int(text, 0, 4)}, month{static_cast<unsigned>(parse_int(text, 5, 2))},
                             day{static_cast<unsigned>(parse_int(text, 8, 2))}};
    if (!ymd.ok()) throw FormatError("invalid calendar date: " + std::string(text));
    const int hh = parse_int(text, 11, 2), mm = parse_int(text, 14, 2);
    const int ss = text.size() >= 19 && text[16] == ':' ? parse_int(text, 17, 2) : 0;
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(std::int64_t seconds)
{
    using namespace std::chrono;
    const auto day_count = static_cast<int>(seconds >= 0 ? seconds / 86400 : (seconds - 86399) / 86400);
    const std::int64_t rem = seconds - static_cast<std::int64_t>(day_count) * 86400;
    const year_month_day ymd{sys_days{days{day_count}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
    return buf;
}

double haversine_km(const StationMeta& a, const StationMeta& b)
{
    constexpr double deg = std::numbers::pi / 180.0;
    const double phi1 = a.lat * deg, phi2 = b.lat * deg;
    const double dphi = (b.lat - a.lat) * deg;
    const double dlambda = (b.lon - a.lon) * deg;
    const double s = std::sin(dphi / 2.0);
    const double c = std::sin(dlambda / 2.0);
    const double h = std::min(1.0, s * s + std::cos(phi1) * std::cos(phi2) * c * c);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

} // namespace mfmgcn::data
