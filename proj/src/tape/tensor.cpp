// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/tape/tensor.hpp"

#include "mfmgcn/errors.hpp"

#include <functional>
#include <numeric>
#include <sstream>

namespace mfmgcn::tape {

std::size_t numel(const Shape& shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& shape)
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << " x ";
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape s, double fill) : shape(std::move(s)), data(numel(shape), fill) {}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values))
{
    if (data.size() != numel(shape)) {
        throw ShapeError("tensor: " + std::to_string(data.size()) + " values do not fill shape " + shape_str(shape));
    }
}

Tensor Tensor::scalar(double v)
{
    return Tensor(Shape{1}, std::vector<double>{v});
}

} // namespace mfmgcn::tape
