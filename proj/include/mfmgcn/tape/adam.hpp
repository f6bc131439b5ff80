// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/tape/tape.hpp"

#include <cstddef>
#include <vector>

namespace mfmgcn::tape {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    std::size_t step = 0;
};

/// One bias-corrected Adam update of every parameter in `params`.
void adam_step(ParamStore& params, const GradientStore& grads, AdamState& state, double lr, const AdamConfig& cfg = {});

} // namespace mfmgcn::tape
