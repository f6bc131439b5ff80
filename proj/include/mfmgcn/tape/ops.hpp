// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/tape/tape.hpp"

#include <cstddef>
#include <span>
#include <vector>

// Differentiable primitives. Shapes must match exactly; the only broadcast
// forms are scalar * tensor and the explicit per-channel add_bias.
// relu'(0) is taken as 0, abs'(0) as 0.
namespace mfmgcn::tape {

Var matmul(Var a, Var b);               // [m x k] . [k x n]
Var transpose(Var a);                   // 2-D only
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scalar_mul(Var a, double s);
Var scale(Var a, Var s);                // s holds a single element
Var reciprocal(Var a);
Var rsqrt(Var a);
Var tanh(Var a);
Var relu(Var a);
Var abs(Var a);
Var concat(std::span<const Var> parts, std::size_t axis);
Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end);
Var reshape(Var a, Shape shape);
Var flatten(Var a);
Var add_bias(Var x, Var bias);          // bias [C] added along the last axis of x [..., C]
Var sum_last_axis(Var a);               // [..., C] -> [...]
Var reduce_sum(Var a);                  // -> scalar [1]
Var reduce_mean(Var a);                 // -> scalar [1]

/// Valid 1-D convolution along the middle axis.
/// x: [R x T x C_in], kernel: [k x C_in x C_out] -> [R x (T - dilation*(k-1)) x C_out]
Var conv1d(Var x, Var kernel, std::size_t dilation = 1);

} // namespace mfmgcn::tape
