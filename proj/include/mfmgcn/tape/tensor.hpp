// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mfmgcn::tape {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense row-major float64 tensor. Plain value type; no views.
struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s, double fill = 0.0);
    Tensor(Shape s, std::vector<double> values);

    static Tensor scalar(double v);

    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t dim(std::size_t axis) const { return shape.at(axis); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    // 2-D accessors
    double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

    std::span<double> span() { return data; }
    std::span<const double> span() const { return data; }

    bool operator==(const Tensor&) const = default;
};

} // namespace mfmgcn::tape
