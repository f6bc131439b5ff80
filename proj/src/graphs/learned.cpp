// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/graphs/learned.hpp"

#include "mfmgcn/errors.hpp"

namespace mfmgcn::graphs {

using tape::Var;

Var directed_embedding_graph(Var a, Var b, Var w1, Var w2, double s)
{
    if (!(s > 0.0)) throw ConfigError("graph saturation scale must be positive");
    Var m1 = tape::tanh(tape::scalar_mul(tape::matmul(a, w1), s));
    Var m2 = tape::tanh(tape::scalar_mul(tape::matmul(b, w2), s));
    Var diff = tape::sub(tape::matmul(m1, tape::transpose(m2)), tape::matmul(m2, tape::transpose(m1)));
    return tape::relu(tape::tanh(tape::scalar_mul(diff, s)));
}

Var learnable_graph(Var e1, Var e2, Var theta1, Var theta2, double alpha)
{
    return directed_embedding_graph(e1, e2, theta1, theta2, alpha);
}

Var dynamic_graph(Var window, Var w1, Var w2, double beta)
{
    const std::size_t n = window.shape().at(0);
    Var z = tape::reshape(window, {n, window.value().size() / n});
    return directed_embedding_graph(z, z, w1, w2, beta);
}

Var fuse_graphs(std::span<const Var> graphs, std::span<const Var> weights)
{
    if (graphs.empty() || graphs.size() != weights.size()) {
        throw ConfigError("fusion needs one weight matrix per graph (" + std::to_string(graphs.size()) + " graphs, " +
                          std::to_string(weights.size()) + " weights)");
    }
    Var acc = tape::hadamard(weights[0], graphs[0]);
    for (std::size_t s = 1; s < graphs.size(); ++s) acc = tape::add(acc, tape::hadamard(weights[s], graphs[s]));
    return acc;
}

Adjacency eval_learnable_graph(const LearnableGraphParams& p)
{
    tape::Tape t(false);
    Var a = learnable_graph(t.constant(p.e1), t.constant(p.e2), t.constant(p.theta1), t.constant(p.theta2), p.alpha);
    return {GraphKind::learnable, a.value(), {{"alpha", p.alpha}}};
}

Adjacency eval_dynamic_graph(const tape::Tensor& window, const DynamicGraphParams& p)
{
    tape::Tape t(false);
    Var a = dynamic_graph(t.constant(window), t.constant(p.w1), t.constant(p.w2), p.beta);
    return {GraphKind::dynamic, a.value(), {{"beta", p.beta}}};
}

Adjacency fuse_graphs(std::span<const Adjacency> graphs, std::span<const tape::Tensor> weights)
{
    tape::Tape t(false);
    std::vector<Var> gs, ws;
    for (const auto& g : graphs) gs.push_back(t.constant(g.weights));
    for (const auto& w : weights) ws.push_back(t.constant(w));
    return {GraphKind::fused, fuse_graphs(gs, ws).value(), {}};
}

} // namespace mfmgcn::graphs
