// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/graphs/adjacency.hpp"
#include "mfmgcn/tape/ops.hpp"

#include <vector>

namespace mfmgcn::graphs {

struct PowerIterationOptions {
    double tol = 1e-8;  // on the residual |Lv - lambda v| with |v| = 1
    std::size_t polish_steps = 2;  // shifted inverse-iteration steps on the converged vector
    std::size_t max_iter = 1000;
    double fallback = 2.0;
};

struct PowerIterationResult {
    double lambda = 0.0;
    std::vector<double> vector;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Largest eigenvalue of a symmetric positive semi-definite matrix.
PowerIterationResult power_iteration(const tape::Tensor& m, const PowerIterationOptions& opts = {});

struct LaplacianVars {
    tape::Var l_tilde;     // 2 L / lambda_max - I
    tape::Var lambda_max;  // [1]
    bool used_fallback = false;
    std::vector<std::size_t> isolated;  // nodes that received a unit self-loop
};

/// A -> (|A| + |A|^T) / 2 -> L = I - D^-1/2 A D^-1/2 -> scaled. Differentiable
/// through A and through the dominant eigenvalue (gradient v v^T); the
/// fallback eigenvalue is a constant.
LaplacianVars scaled_laplacian(tape::Var a, const PowerIterationOptions& opts = {});

struct ScaledLaplacian {
    tape::Tensor l_tilde;
    double lambda_max = 0.0;
    bool used_fallback = false;
    std::vector<std::size_t> isolated;
};

ScaledLaplacian scaled_laplacian(const Adjacency& a, const PowerIterationOptions& opts = {});

/// y = sum_k T_k(L~) x theta_k with the Chebyshev recurrence.
/// theta: [K x C_in x C_out]; x: [N x C_in] or [N x M x C_in] (M independent
/// signals sharing the graph). Output keeps the leading shape of x.
tape::Var cheb_filter(tape::Var l_tilde, tape::Var theta, tape::Var x);

tape::Tensor cheb_filter(const ScaledLaplacian& lap, const tape::Tensor& theta, const tape::Tensor& x);

} // namespace mfmgcn::graphs
