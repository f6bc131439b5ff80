// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/tape/adam.hpp"

#include "mfmgcn/errors.hpp"

#include <cmath>

namespace mfmgcn::tape {

void adam_step(ParamStore& params, const GradientStore& grads, AdamState& state, double lr, const AdamConfig& cfg)
{
    if (grads.size() != params.size()) throw ConfigError("adam_step: gradient count does not match parameter count");
    if (state.m.empty()) {
        for (ParamId p = 0; p < params.size(); ++p) {
            state.m.emplace_back(params.value(p).shape, 0.0);
            state.v.emplace_back(params.value(p).shape, 0.0);
        }
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (ParamId p = 0; p < params.size(); ++p) {
        Tensor& w = params.value(p);
        const Tensor& g = grads[p];
        Tensor& m = state.m[p];
        Tensor& v = state.v[p];
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            w[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

} // namespace mfmgcn::tape
