// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/data/synthetic.hpp"

#include "mfmgcn/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mfmgcn::data {

namespace {

struct FactorShape {
    double offset;
    double scale;
    double phase;  // radians, diurnal
};

FactorShape factor_shape(std::string_view name)
{
    if (name == "t") return {15.0, 8.0, 0.0};
    if (name == "rh") return {60.0, 15.0, std::numbers::pi};
    if (name == "hv2") return {20000.0, 6000.0, 0.5};
    if (name == "ap") return {1000.0, 4.0, 2.0};
    if (name == "ws") return {3.0, 1.0, 1.0};
    return {10.0, 2.0, 0.25};
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& c)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    if (eig.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");
    Eigen::VectorXd s = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().transpose();
}

} // namespace

std::vector<std::string> synthetic_factor_order()
{
    std::vector<std::string> order{"t", "rh", "hv2", "ap", "ws"};
    for (auto f : kFactorNames) {
        if (std::find(order.begin(), order.end(), f) == order.end()) order.emplace_back(f);
    }
    return order;
}

WeatherSeriesDataset generate_synthetic(const SyntheticConfig& cfg)
{
    if (cfg.n == 0 || cfg.t == 0) throw ConfigError("synthetic dataset needs n > 0 and t > 0");
    if (cfg.d == 0 || cfg.d > kFactorNames.size()) throw ConfigError("synthetic d must be in [1, 20]");
    if (!(cfg.spatial_corr_scale_km > 0.0)) throw ConfigError("spatial_corr_scale_km must be positive");
    if (!(cfg.noise_persistence >= 0.0 && cfg.noise_persistence < 1.0)) {
        throw ConfigError("noise_persistence must lie in [0, 1)");
    }
    if (!(cfg.seasonal_period > 0.0)) throw ConfigError("seasonal_period must be positive");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    std::normal_distribution<double> normal(0.0, 1.0);

    const std::size_t N = cfg.n, T = cfg.t, D = cfg.d;
    WeatherSeriesDataset ds;
    const auto order = synthetic_factor_order();
    ds.factors.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(D));
    ds.steps = T;
    ds.time_start = cfg.time_start;
    for (std::size_t i = 0; i < N; ++i) {
        StationMeta s;
        s.station_id = "S" + std::string(i < 10 ? "00" : i < 100 ? "0" : "") + std::to_string(i);
        s.lat = cfg.center_lat + cfg.patch_deg * unit(rng);
        s.lon = cfg.center_lon + cfg.patch_deg * unit(rng);
        s.alt = 50.0 + 1000.0 * (unit(rng) + 0.5);
        ds.stations.push_back(std::move(s));
    }

    const double scale = cfg.spatial_corr_scale_km;
    Eigen::MatrixXd cov(N, N), transport(N, N);
    for (std::size_t i = 0; i < N; ++i) {
        StationMeta upwind = ds.stations[i];
        const double km_per_deg = 111.32 * std::cos(upwind.lat * std::numbers::pi / 180.0);
        upwind.lon -= cfg.drift_km_per_step / km_per_deg;
        for (std::size_t j = 0; j < N; ++j) {
            cov(i, j) = std::exp(-haversine_km(ds.stations[i], ds.stations[j]) / scale);
            const double du = haversine_km(upwind, ds.stations[j]) / scale;
            transport(i, j) = std::exp(-du * du);
        }
        transport.row(i) /= transport.row(i).sum();
    }
    const Eigen::MatrixXd root = symmetric_sqrt(cov);
    const double rho = cfg.noise_persistence;
    const double innov = std::sqrt(1.0 - rho * rho) * cfg.noise_amplitude;

    ds.values.assign(N * T * D, 0.0);
    ds.mask.assign(N * T * D, 1);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t f = 0; f < D; ++f) {
        const FactorShape shape = factor_shape(ds.factors[f]);
        Eigen::VectorXd baseline(N), amp(N);
        for (std::size_t i = 0; i < N; ++i) {
            baseline(i) = cfg.baseline_spread * normal(rng);
            amp(i) = cfg.diurnal_amplitude * (1.0 + 0.4 * unit(rng));
        }
        const double season_phase = two_pi * (unit(rng) + 0.5);
        Eigen::VectorXd z(N), e(N);
        for (std::size_t i = 0; i < N; ++i) z(i) = normal(rng);
        e = cfg.noise_amplitude * (root * z);
        for (std::size_t t = 0; t < T; ++t) {
            if (t > 0) {
                for (std::size_t i = 0; i < N; ++i) z(i) = normal(rng);
                e = rho * (transport * e) + innov * (root * z);
            }
            const double season =
                cfg.seasonal_amplitude * std::sin(two_pi * static_cast<double>(t) / cfg.seasonal_period + season_phase);
            for (std::size_t i = 0; i < N; ++i) {
                const double local_hour = static_cast<double>(t) + (ds.stations[i].lon - cfg.center_lon) / 15.0;
                const double diurnal = amp(i) * std::sin(two_pi * local_hour / 24.0 + shape.phase);
                ds.value(i, t, f) = shape.offset + shape.scale * (baseline(i) + diurnal + season + e(i));
            }
        }
    }
    ds.validate();
    return ds;
}

} // namespace mfmgcn::data
