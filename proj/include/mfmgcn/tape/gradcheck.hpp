// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/tape/tape.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mfmgcn::tape {

using LossFn = std::function<Var(Tape&, const ParamStore&)>;

struct GradCheckOptions {
    double h = 1e-5;
    // 0 checks every coordinate; otherwise a seeded random subsample per parameter.
    std::size_t max_coords_per_param = 0;
    std::uint64_t seed = 0;
    // Denominator floor so near-zero gradients are compared absolutely.
    double abs_floor = 1e-6;
    // Restrict the check to these parameter names (empty = all).
    std::vector<std::string> only;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t coords_checked = 0;
};

/// Central-difference comparison of the tape gradient of `f` against
/// numerical derivatives. `params` is perturbed in place and restored.
GradCheckResult finite_diff_check(const LossFn& f, ParamStore& params, const GradCheckOptions& opts = {});

} // namespace mfmgcn::tape
