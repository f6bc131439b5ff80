// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/data/io.hpp"

#include "mfmgcn/data/binary.hpp"
#include "mfmgcn/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mfmgcn::data {

namespace fs = std::filesystem;

Format parse_format(std::string_view name)
{
    if (name == "csv" || name == "csv_per_station") return Format::csv_per_station;
    if (name == "bin" || name == "packed" || name == "packed_binary" || name == "w2kt") return Format::packed_binary;
    throw ConfigError("unknown dataset format '" + std::string(name) + "' (expected csv or packed)");
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_double(std::string_view cell, const std::string& where)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw FormatError(where + ": cannot parse number '" + std::string(cell) + "'");
    }
    return v;
}

bool is_missing_token(std::string_view cell)
{
    return cell.empty() || cell == "NaN" || cell == "nan" || cell == "NA" || cell == "null";
}

std::ifstream open_in(const fs::path& p, std::ios::openmode mode = std::ios::in)
{
    std::ifstream in(p, mode);
    if (!in) throw IoError("cannot open " + p.string());
    return in;
}

WeatherSeriesDataset load_csv_dir(const fs::path& dir, const DefaultCodes& codes)
{
    const fs::path meta_path = dir / "stations.csv";
    auto meta = open_in(meta_path);
    std::string line;
    if (!std::getline(meta, line)) throw FormatError(meta_path.string() + ": empty metadata file");
    const auto header = split_csv(line);
    const std::vector<std::string_view> expected{"station_id", "lat", "lon", "alt", "time_start"};
    if (header != expected) {
        throw SchemaError(meta_path.string() + ": header must be station_id,lat,lon,alt,time_start");
    }

    WeatherSeriesDataset ds;
    std::vector<std::int64_t> starts;
    std::size_t lineno = 1;
    while (std::getline(meta, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        const std::string where = meta_path.string() + ":" + std::to_string(lineno);
        if (cells.size() != 5) throw FormatError(where + ": expected 5 columns");
        StationMeta s;
        s.station_id = std::string(cells[0]);
        s.lat = parse_double(cells[1], where);
        s.lon = parse_double(cells[2], where);
        s.alt = parse_double(cells[3], where);
        ds.stations.push_back(std::move(s));
        starts.push_back(parse_timestamp(cells[4]));
    }
    if (ds.stations.empty()) throw EmptyDatasetError(meta_path.string() + ": no stations listed");
    for (std::size_t i = 1; i < starts.size(); ++i) {
        if (starts[i] != starts[0]) {
            throw StructuralError("station " + ds.stations[i].station_id + " starts at a different time than " +
                                  ds.stations[0].station_id);
        }
    }
    ds.time_start = starts[0];

    std::vector<std::vector<double>> per_station;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const fs::path file = dir / (ds.stations[i].station_id + ".csv");
        auto in = open_in(file);
        if (!std::getline(in, line)) throw FormatError(file.string() + ": empty file");
        std::vector<std::string> names;
        for (auto c : split_csv(line)) {
            if (!is_known_factor(c)) throw SchemaError(file.string() + ": unknown factor name '" + std::string(c) + "'");
            names.emplace_back(c);
        }
        if (i == 0) {
            ds.factors = names;
        } else if (names != ds.factors) {
            throw SchemaError(file.string() + ": factor columns differ from " + ds.stations[0].station_id + ".csv");
        }
        std::vector<double> rows;
        std::size_t row = 1;
        while (std::getline(in, line)) {
            ++row;
            if (trim(line).empty()) continue;
            const auto cells = split_csv(line);
            const std::string where = file.string() + ":" + std::to_string(row);
            if (cells.size() != names.size()) throw FormatError(where + ": wrong column count");
            for (auto c : cells)
                rows.push_back(is_missing_token(c) ? std::numeric_limits<double>::quiet_NaN() : parse_double(c, where));
        }
        per_station.push_back(std::move(rows));
    }

    const std::size_t D = ds.d();
    ds.steps = per_station[0].size() / D;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        if (per_station[i].size() != ds.steps * D) {
            throw StructuralError("ragged station lengths: " + ds.stations[i].station_id + " has " +
                                  std::to_string(per_station[i].size() / D) + " rows, expected " +
                                  std::to_string(ds.steps));
        }
    }
    if (ds.steps == 0) throw StructuralError("stations have no rows");
    ds.values.reserve(ds.n() * ds.steps * D);
    for (auto& rows : per_station) ds.values.insert(ds.values.end(), rows.begin(), rows.end());
    ds.mask.assign(ds.values.size(), 1);
    for (std::size_t c = 0; c < ds.values.size(); ++c) {
        const double v = ds.values[c];
        if (std::isnan(v) || codes.is_default(ds.factors[c % D], v)) ds.mask[c] = 0;
    }
    ds.validate();
    return ds;
}

} // namespace

void write_packed(const WeatherSeriesDataset& ds, const fs::path& file)
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    BinaryWriter w(out);
    w.magic("W2KT");
    w.u32(kPackedVersion);
    w.u32(static_cast<std::uint32_t>(ds.n()));
    w.u32(static_cast<std::uint32_t>(ds.steps));
    w.u32(static_cast<std::uint32_t>(ds.d()));
    for (const auto& f : ds.factors) w.str(f);
    for (const auto& s : ds.stations) {
        w.str(s.station_id);
        w.f64(s.lat);
        w.f64(s.lon);
        w.f64(s.alt);
    }
    w.i64(ds.time_start);
    w.i64(ds.time_step);
    w.f64_array(ds.values);
    w.bits(ds.mask);
    if (!out) throw IoError("failed writing " + file.string());
}

WeatherSeriesDataset read_packed(const fs::path& file)
{
    auto in = open_in(file, std::ios::binary);
    BinaryReader r(in, file.string());
    r.expect_magic("W2KT");
    const auto version = r.u32();
    if (version != kPackedVersion) {
        throw VersionError(file.string() + ": unsupported W2KT version " + std::to_string(version));
    }
    WeatherSeriesDataset ds;
    const std::size_t n = r.u32(), t = r.u32(), d = r.u32();
    for (std::size_t f = 0; f < d; ++f) {
        ds.factors.push_back(r.str());
        if (!is_known_factor(ds.factors.back())) {
            throw SchemaError(file.string() + ": unknown factor name '" + ds.factors.back() + "'");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        StationMeta s;
        s.station_id = r.str();
        s.lat = r.f64();
        s.lon = r.f64();
        s.alt = r.f64();
        ds.stations.push_back(std::move(s));
    }
    ds.steps = t;
    ds.time_start = r.i64();
    ds.time_step = r.i64();
    ds.values = r.f64_array(n * t * d);
    ds.mask = r.bits(n * t * d);
    ds.validate();
    return ds;
}

WeatherSeriesDataset load_dataset(const fs::path& path, Format format, const DefaultCodes& codes)
{
    switch (format) {
    case Format::csv_per_station:
        return load_csv_dir(path, codes);
    case Format::packed_binary:
        return read_packed(path);
    }
    throw ConfigError("unsupported format");
}

void write_csv_dir(const WeatherSeriesDataset& ds, const fs::path& dir)
{
    fs::create_directories(dir);
    std::ofstream meta(dir / "stations.csv", std::ios::trunc);
    if (!meta) throw IoError("cannot write " + (dir / "stations.csv").string());
    meta << "station_id,lat,lon,alt,time_start\n";
    char buf[64];
    auto num = [&buf](double v) -> const char* {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    };
    for (const auto& s : ds.stations) {
        meta << s.station_id << ',' << num(s.lat);
        meta << ',' << num(s.lon);
        meta << ',' << num(s.alt);
        meta << ',' << format_timestamp(ds.time_start) << '\n';
    }
    for (std::size_t i = 0; i < ds.n(); ++i) {
        std::ofstream out(dir / (ds.stations[i].station_id + ".csv"), std::ios::trunc);
        if (!out) throw IoError("cannot write station file for " + ds.stations[i].station_id);
        for (std::size_t f = 0; f < ds.d(); ++f) out << (f ? "," : "") << ds.factors[f];
        out << '\n';
        for (std::size_t t = 0; t < ds.steps; ++t) {
            for (std::size_t f = 0; f < ds.d(); ++f) {
                if (f) out << ',';
                const double v = ds.value(i, t, f);
                if (!std::isnan(v)) out << num(v);
            }
            out << '\n';
        }
    }
}

} // namespace mfmgcn::data
