// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/tape/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mfmgcn::tape {

namespace {

double eval_loss(const LossFn& f, const ParamStore& params)
{
    Tape tape(false);
    return f(tape, params).item();
}

} // namespace

GradCheckResult finite_diff_check(const LossFn& f, ParamStore& params, const GradCheckOptions& opts)
{
    GradientStore grads;
    {
        Tape tape;
        Var loss = f(tape, params);
        grads = tape.backward(loss, params);
    }

    GradCheckResult result;
    std::mt19937_64 rng(opts.seed);
    for (ParamId p = 0; p < params.size(); ++p) {
        const std::string& name = params.name(p);
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), name) == opts.only.end()) continue;

        std::vector<std::size_t> coords(params.value(p).size());
        std::iota(coords.begin(), coords.end(), 0);
        if (opts.max_coords_per_param && coords.size() > opts.max_coords_per_param) {
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(opts.max_coords_per_param);
        }
        for (std::size_t i : coords) {
            double& w = params.value(p)[i];
            const double saved = w;
            w = saved + opts.h;
            const double up = eval_loss(f, params);
            w = saved - opts.h;
            const double down = eval_loss(f, params);
            w = saved;

            const double numeric = (up - down) / (2.0 * opts.h);
            const double analytic = grads[p][i];
            const double denom = std::max({std::fabs(numeric), std::fabs(analytic), opts.abs_floor});
            const double rel = std::fabs(numeric - analytic) / denom;
            ++result.coords_checked;
            if (rel > result.max_rel_error || !std::isfinite(rel)) {
                result.max_rel_error = std::isfinite(rel) ? rel : INFINITY;
                result.worst_param = name;
                result.worst_index = i;
                result.worst_analytic = analytic;
                result.worst_numeric = numeric;
            }
        }
    }
    return result;
}

} // namespace mfmgcn::tape
