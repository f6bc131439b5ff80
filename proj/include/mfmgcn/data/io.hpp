// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/dataset.hpp"
#include "mfmgcn/data/pipeline.hpp"

#include <filesystem>
#include <string_view>

namespace mfmgcn::data {

enum class Format { csv_per_station, packed_binary };

Format parse_format(std::string_view name);

inline constexpr std::uint32_t kPackedVersion = 1;

/// csv_per_station: `path` is a directory holding stations.csv
/// (station_id,lat,lon,alt,time_start) and one <station_id>.csv per station
/// with a header of factor short names and one row per hour. Empty, NaN or
/// NA cells are missing; cells equal to a default code are kept but masked.
///
/// packed_binary: little-endian "W2KT" file, see write_packed.
WeatherSeriesDataset load_dataset(const std::filesystem::path& path, Format format,
                                  const DefaultCodes& codes = DefaultCodes::builtin());

/// Layout: magic "W2KT", u32 version, u32 N, u32 T, u32 D, D factor names,
/// N station records (id, lat, lon, alt as f64), i64 time_start,
/// i64 time_step, f64 values [N][T][D], bit-packed mask (LSB first).
void write_packed(const WeatherSeriesDataset& ds, const std::filesystem::path& file);
WeatherSeriesDataset read_packed(const std::filesystem::path& file);

void write_csv_dir(const WeatherSeriesDataset& ds, const std::filesystem::path& dir);

} // namespace mfmgcn::data
