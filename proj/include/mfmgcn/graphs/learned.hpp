// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/graphs/adjacency.hpp"
#include "mfmgcn/tape/ops.hpp"

#include <span>

namespace mfmgcn::graphs {

struct LearnableGraphParams {
    tape::Tensor e1;      // [N x d_emb]
    tape::Tensor e2;      // [N x d_emb]
    tape::Tensor theta1;  // [d_emb x d_emb]
    tape::Tensor theta2;  // [d_emb x d_emb]
    double alpha = 3.0;
};

struct DynamicGraphParams {
    tape::Tensor w1;  // [F x d_emb], F = flattened window length
    tape::Tensor w2;
    double beta = 3.0;
};

/// relu(tanh(s * (M1 M2^T - M2 M1^T))) with M1 = tanh(s * a W1), M2 = tanh(s * b W2).
/// The argument is antisymmetric, so at most one of (i,j), (j,i) is positive.
tape::Var directed_embedding_graph(tape::Var a, tape::Var b, tape::Var w1, tape::Var w2, double s);

tape::Var learnable_graph(tape::Var e1, tape::Var e2, tape::Var theta1, tape::Var theta2, double alpha);

/// window: [N x ...] flattened per node to Z [N x F].
tape::Var dynamic_graph(tape::Var window, tape::Var w1, tape::Var w2, double beta);

/// sum_s W_s (.) A_s
tape::Var fuse_graphs(std::span<const tape::Var> graphs, std::span<const tape::Var> weights);

Adjacency eval_learnable_graph(const LearnableGraphParams& p);
Adjacency eval_dynamic_graph(const tape::Tensor& window, const DynamicGraphParams& p);
Adjacency fuse_graphs(std::span<const Adjacency> graphs, std::span<const tape::Tensor> weights);

} // namespace mfmgcn::graphs
