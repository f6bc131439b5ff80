// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/data/dataset.hpp"
#include "mfmgcn/tape/tensor.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfmgcn::graphs {

enum class GraphKind { distance, neighbor, pattern, learnable, dynamic, fused };

std::string_view to_string(GraphKind kind);
GraphKind parse_graph_kind(std::string_view name);

/// Dense [N x N] edge weights.
struct Adjacency {
    GraphKind kind = GraphKind::fused;
    tape::Tensor weights;
    std::map<std::string, double> params;  // build metadata (sigma, epsilon, ...)

    std::size_t n() const { return weights.shape.empty() ? 0 : weights.shape[0]; }
    double at(std::size_t i, std::size_t j) const { return weights.data[i * n() + j]; }
};

enum class DistanceMode { great_circle, euclidean_3d };

struct DistanceGraphConfig {
    std::optional<double> sigma_km;  // unset: mean pairwise distance
    double epsilon = 0.1;
    DistanceMode mode = DistanceMode::great_circle;
};

struct NeighborGraphConfig {
    std::size_t n_adjacent = 10;
};

/// [N x N] pairwise distances in km. euclidean_3d uses chord length between
/// points at radius 6371 km + altitude.
tape::Tensor pairwise_distance_km(const std::vector<data::StationMeta>& stations,
                                  DistanceMode mode = DistanceMode::great_circle);

/// exp(-d^2 / sigma^2) off the diagonal, zeroed below epsilon.
Adjacency build_distance_graph(const std::vector<data::StationMeta>& stations, const DistanceGraphConfig& cfg);

/// Row i holds ones at its n_adjacent nearest stations (ties by index).
Adjacency build_neighbor_graph(const std::vector<data::StationMeta>& stations, const NeighborGraphConfig& cfg);

struct PatternGraph {
    Adjacency mean;                       // average over the factors
    std::vector<std::string> factors;     // factors actually used
    std::vector<Adjacency> per_factor;
};

inline const std::vector<std::string>& default_pattern_factors()
{
    static const std::vector<std::string> f{"t", "hv2", "rh"};
    return f;
}

/// Pearson correlation between station series of each factor over the
/// given (training) dataset, zero diagonal, averaged across factors.
/// A requested factor absent from the dataset is a SchemaError unless
/// skip_absent is set, in which case it is left out (at least one must remain).
PatternGraph build_pattern_graph(const data::WeatherSeriesDataset& train,
                                 const std::vector<std::string>& factors = default_pattern_factors(),
                                 bool skip_absent = false);

} // namespace mfmgcn::graphs
