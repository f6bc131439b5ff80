// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/graphs/adjacency.hpp"

#include "mfmgcn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mfmgcn::graphs {

std::string_view to_string(GraphKind kind)
{
    switch (kind) {
    case GraphKind::distance: return "distance";
    case GraphKind::neighbor: return "neighbor";
    case GraphKind::pattern: return "pattern";
    case GraphKind::learnable: return "learnable";
    case GraphKind::dynamic: return "dynamic";
    case GraphKind::fused: return "fused";
    }
    return "fused";
}

GraphKind parse_graph_kind(std::string_view name)
{
    for (auto k : {GraphKind::distance, GraphKind::neighbor, GraphKind::pattern, GraphKind::learnable,
                   GraphKind::dynamic, GraphKind::fused})
        if (to_string(k) == name) return k;
    throw SchemaError("unknown graph kind '" + std::string(name) + "'");
}

tape::Tensor pairwise_distance_km(const std::vector<data::StationMeta>& stations, DistanceMode mode)
{
    const std::size_t n = stations.size();
    tape::Tensor d({n, n});
    std::vector<std::array<double, 3>> xyz;
    if (mode == DistanceMode::euclidean_3d) {
        for (const auto& s : stations) {
            const double r = data::kEarthRadiusKm + s.alt / 1000.0;
            const double la = s.lat * std::numbers::pi / 180.0, lo = s.lon * std::numbers::pi / 180.0;
            xyz.push_back({r * std::cos(la) * std::cos(lo), r * std::cos(la) * std::sin(lo), r * std::sin(la)});
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double v;
            if (mode == DistanceMode::great_circle) {
                v = data::haversine_km(stations[i], stations[j]);
            } else {
                const double dx = xyz[i][0] - xyz[j][0], dy = xyz[i][1] - xyz[j][1], dz = xyz[i][2] - xyz[j][2];
                v = std::sqrt(dx * dx + dy * dy + dz * dz);
            }
            d.data[i * n + j] = d.data[j * n + i] = v;
        }
    return d;
}

Adjacency build_distance_graph(const std::vector<data::StationMeta>& stations, const DistanceGraphConfig& cfg)
{
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0)) throw ConfigError("distance graph epsilon must lie in [0, 1)");
    const std::size_t n = stations.size();
    const tape::Tensor d = pairwise_distance_km(stations, cfg.mode);
    double sigma = 1.0;
    if (cfg.sigma_km) {
        sigma = *cfg.sigma_km;
    } else if (n > 1) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) sum += d.data[i * n + j];
        sigma = sum / static_cast<double>(n * (n - 1) / 2);
    }
    if (!(sigma > 0.0)) throw ConfigError("distance graph sigma must be positive");

    Adjacency a{GraphKind::distance, tape::Tensor({n, n}), {{"sigma_km", sigma}, {"epsilon", cfg.epsilon}}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double r = d.data[i * n + j] / sigma;
            const double w = std::exp(-r * r);
            a.weights.data[i * n + j] = w >= cfg.epsilon ? w : 0.0;
        }
    return a;
}

Adjacency build_neighbor_graph(const std::vector<data::StationMeta>& stations, const NeighborGraphConfig& cfg)
{
    const std::size_t n = stations.size();
    if (cfg.n_adjacent >= n) {
        throw ConfigError("neighbor count " + std::to_string(cfg.n_adjacent) + " must be below the station count " +
                          std::to_string(n));
    }
    const tape::Tensor d = pairwise_distance_km(stations);
    Adjacency a{GraphKind::neighbor, tape::Tensor({n, n}), {{"n_adjacent", static_cast<double>(cfg.n_adjacent)}}};
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order.resize(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return d.data[i * n + x] < d.data[i * n + y]; });
        for (std::size_t k = 0; k < cfg.n_adjacent; ++k) a.weights.data[i * n + order[k]] = 1.0;
    }
    return a;
}

PatternGraph build_pattern_graph(const data::WeatherSeriesDataset& train, const std::vector<std::string>& factors,
                                 bool skip_absent)
{
    const std::size_t n = train.n(), T = train.steps;
    PatternGraph out;
    for (const auto& name : factors) {
        const auto f = train.find_factor(name);
        if (!f) {
            if (skip_absent) continue;
            throw SchemaError("pattern graph factor '" + name + "' is not in the dataset");
        }
        std::vector<double> centered(n * T);
        std::vector<double> norm(n);
        for (std::size_t i = 0; i < n; ++i) {
            double mean = 0.0;
            for (std::size_t t = 0; t < T; ++t) mean += train.value(i, t, *f);
            mean /= static_cast<double>(T);
            double ss = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                const double c = train.value(i, t, *f) - mean;
                centered[i * T + t] = c;
                ss += c * c;
            }
            if (!(ss > 0.0) || !std::isfinite(ss)) {
                throw NumericError("station " + train.stations[i].station_id + " has a constant '" + name +
                                   "' series; Pearson correlation is undefined");
            }
            norm[i] = std::sqrt(ss);
        }
        Adjacency a{GraphKind::pattern, tape::Tensor({n, n}), {}};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (std::size_t t = 0; t < T; ++t) s += centered[i * T + t] * centered[j * T + t];
                const double r = std::clamp(s / (norm[i] * norm[j]), -1.0, 1.0);
                a.weights.data[i * n + j] = a.weights.data[j * n + i] = r;
            }
        out.factors.push_back(name);
        out.per_factor.push_back(std::move(a));
    }
    if (out.per_factor.empty()) throw SchemaError("none of the requested pattern graph factors are in the dataset");
    out.mean = Adjacency{GraphKind::pattern, tape::Tensor({n, n}), {}};
    for (const auto& a : out.per_factor)
        for (std::size_t c = 0; c < n * n; ++c) out.mean.weights.data[c] += a.weights.data[c];
    for (double& v : out.mean.weights.data) v /= static_cast<double>(out.per_factor.size());
    out.mean.params["factor_count"] = static_cast<double>(out.per_factor.size());
    return out;
}

} // namespace mfmgcn::graphs
