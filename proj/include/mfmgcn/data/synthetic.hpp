// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mfmgcn::data {

struct SyntheticConfig {
    std::size_t n = 20;
    std::size_t t = 2000;
    std::size_t d = 1;
    std::uint64_t seed = 7;

    double center_lat = 35.0;
    double center_lon = 115.0;
    double patch_deg = 6.0;  // side of the square patch stations are drawn from

    double spatial_corr_scale_km = 250.0;
    double diurnal_amplitude = 1.0;
    double seasonal_amplitude = 0.5;
    double seasonal_period = 24.0 * 60.0;  // steps
    double baseline_spread = 0.5;
    double noise_amplitude = 0.6;
    double noise_persistence = 0.9;  // lag-one coefficient of the noise field
    double drift_km_per_step = 0.0;  // eastward transport of the noise field

    std::int64_t time_start = 1577836800;  // 2020-01-01T00:00Z
};

/// Factor names in generation order: t, rh, hv2, ap, ws, then the rest of
/// the table.
std::vector<std::string> synthetic_factor_order();

/// Each factor = scale * (station baseline + diurnal sinusoid (period 24,
/// phase shifted by longitude) + seasonal sinusoid + noise) + offset.
/// The noise follows e(t) = rho * P e(t-1) + sqrt(1 - rho^2) * amp * C^(1/2) z(t),
/// with C_ij = exp(-d_ij / scale) and P a row-normalized Gaussian transport
/// kernel over haversine distance. Pure function of cfg.
WeatherSeriesDataset generate_synthetic(const SyntheticConfig& cfg);

} // namespace mfmgcn::data
