// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/model/model.hpp"

#include "mfmgcn/errors.hpp"
#include "mfmgcn/graphs/learned.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mfmgcn::model {

using tape::Shape;
using tape::Tensor;
using tape::Var;

Var center_crop_time(Var x, std::size_t t_out)
{
    const std::size_t t = x.shape().at(1);
    if (t_out > t) throw ShapeError("center_crop_time: cannot crop " + tape::shape_str(x.shape()) + " to " + std::to_string(t_out) + " steps");
    if (t_out == t) return x;
    const std::size_t off = (t - t_out) / 2;
    return tape::slice(x, 1, off, off + t_out);
}

Var temporal_multibranch(Var x, std::span<const Var> kernels, Var fuse_weight, Var fuse_bias)
{
    if (kernels.empty()) throw ConfigError("temporal_multibranch needs at least one branch");
    std::size_t longest = 0;
    for (const Var& k : kernels) longest = std::max(longest, k.shape().at(0));
    const std::size_t t = x.shape().at(1);
    if (longest > t) throw ShapeError("temporal_multibranch: kernel of length " + std::to_string(longest) + " exceeds input " + tape::shape_str(x.shape()));
    const std::size_t t_out = t - longest + 1;
    std::vector<Var> outs;
    for (const Var& k : kernels) outs.push_back(center_crop_time(tape::conv1d(x, k), t_out));
    Var cat = outs.size() == 1 ? outs[0] : tape::concat(outs, 2);
    return tape::add_bias(tape::conv1d(cat, fuse_weight), fuse_bias);
}

Var st_block_forward(Var x, const BlockParams& p, Var l_tilde)
{
    Var s = tape::relu(tape::add_bias(graphs::cheb_filter(l_tilde, p.cheb_theta, x), p.cheb_bias));
    Var temporal = temporal_multibranch(s, p.branch_kernels, p.fuse_weight, p.fuse_bias);
    Var residual = tape::conv1d(center_crop_time(x, temporal.shape()[1]), p.res_weight);
    return tape::relu(tape::add(temporal, residual));
}

MfmgcnModel::MfmgcnModel(ModelConfig cfg, tape::ParamStore params) : cfg_(std::move(cfg)), params_(std::move(params))
{
    validate(cfg_);
}

namespace {

std::string block_name(std::size_t b, const std::string& leaf) { return "block" + std::to_string(b) + "." + leaf; }

} // namespace

BlockParams MfmgcnModel::block_params(tape::Tape& t, const tape::ParamStore& ps, std::size_t b) const
{
    BlockParams p;
    p.cheb_theta = t.param(ps, block_name(b, "cheb.theta"));
    p.cheb_bias = t.param(ps, block_name(b, "cheb.bias"));
    for (std::size_t j = 0; j < cfg_.blocks[b].kernels.size(); ++j)
        p.branch_kernels.push_back(t.param(ps, block_name(b, "branch" + std::to_string(j) + ".kernel")));
    p.fuse_weight = t.param(ps, block_name(b, "fuse.weight"));
    p.fuse_bias = t.param(ps, block_name(b, "fuse.bias"));
    p.res_weight = t.param(ps, block_name(b, "res.weight"));
    return p;
}

std::vector<Var> MfmgcnModel::static_inputs(tape::Tape& t, const graphs::StaticGraphs& statics) const
{
    std::vector<Var> fixed;
    for (const auto& slot : cfg_.graphs) {
        if (slot == "L" || slot == "K") {
            fixed.emplace_back();
            continue;
        }
        const graphs::Adjacency* a = statics.find(slot);
        if (!a) throw ConfigError("fusion slot '" + slot + "' has no matching static graph");
        if (a->n() != cfg_.n_nodes) {
            throw ShapeError("static graph '" + slot + "' has " + std::to_string(a->n()) + " nodes, model expects " +
                             std::to_string(cfg_.n_nodes));
        }
        fixed.push_back(t.constant(a->weights));
    }
    return fixed;
}

Var MfmgcnModel::fused(tape::Tape& t, const tape::ParamStore& ps, Var window, const std::vector<Var>& fixed,
                        Var learned) const
{
    std::vector<Var> gs, ws;
    for (std::size_t s = 0; s < cfg_.graphs.size(); ++s) {
        const std::string& slot = cfg_.graphs[s];
        if (slot == "L") {
            gs.push_back(learned);
        } else if (slot == "K") {
            const std::size_t n = cfg_.n_nodes, w = cfg_.input_len, d = cfg_.n_features;
            Var target = d == 1 ? window : tape::slice(window, 2, 0, 1);
            gs.push_back(graphs::dynamic_graph(tape::reshape(target, {n, w}), t.param(ps, "dyn.W1"),
                                               t.param(ps, "dyn.W2"), cfg_.beta));
        } else {
            gs.push_back(fixed[s]);
        }
        ws.push_back(t.param(ps, "fusion." + slot));
    }
    return graphs::fuse_graphs(gs, ws);
}

Var MfmgcnModel::window_forward(tape::Tape& t, const tape::ParamStore& ps, Var window, const std::vector<Var>& fixed,
                                Var learned, ForwardStats* stats) const
{
    const std::size_t n = cfg_.n_nodes;
    auto lap = graphs::scaled_laplacian(fused(t, ps, window, fixed, learned));
    if (stats) {
        ++stats->laplacians;
        stats->eigen_fallbacks += lap.used_fallback ? 1 : 0;
        stats->isolated_nodes += lap.isolated.size();
    }
    Var h = window;
    for (std::size_t b = 0; b < cfg_.blocks.size(); ++b) h = st_block_forward(h, block_params(t, ps, b), lap.l_tilde);
    Var flat = tape::reshape(h, {n, h.value().size() / n});
    Var y = tape::add_bias(tape::matmul(flat, t.param(ps, "out.weight")), t.param(ps, "out.bias"));
    return tape::reshape(y, {1, n, cfg_.horizon, 1});
}

Var MfmgcnModel::forward(tape::Tape& t, const Tensor& inputs, const graphs::StaticGraphs& statics,
                         ForwardStats* stats) const
{
    return forward_with(t, params_, inputs, statics, stats);
}

Var MfmgcnModel::forward_with(tape::Tape& t, const tape::ParamStore& ps, const Tensor& inputs,
                              const graphs::StaticGraphs& statics, ForwardStats* stats) const
{
    const Shape& s = inputs.shape;
    if (s.size() != 4 || s[1] != cfg_.n_nodes || s[2] != cfg_.input_len || s[3] != cfg_.n_features) {
        throw ShapeError("forward: inputs " + tape::shape_str(s) + " do not match the model's [B x " +
                         std::to_string(cfg_.n_nodes) + " x " + std::to_string(cfg_.input_len) + " x " +
                         std::to_string(cfg_.n_features) + "]");
    }
    const std::vector<Var> fixed = static_inputs(t, statics);
    Var learned;
    if (cfg_.uses("L")) {
        learned = graphs::learnable_graph(t.param(ps, "graph.E1"), t.param(ps, "graph.E2"),
                                          t.param(ps, "graph.theta1"), t.param(ps, "graph.theta2"),
                                          cfg_.alpha);
    }
    const std::size_t per = cfg_.n_nodes * cfg_.input_len * cfg_.n_features;
    std::vector<Var> outs;
    for (std::size_t b = 0; b < s[0]; ++b) {
        Tensor w({cfg_.n_nodes, cfg_.input_len, cfg_.n_features});
        std::copy_n(inputs.data.begin() + static_cast<std::ptrdiff_t>(b * per), per, w.data.begin());
        outs.push_back(window_forward(t, ps, t.constant(std::move(w)), fixed, learned, stats));
    }
    return outs.size() == 1 ? outs[0] : tape::concat(outs, 0);
}

Tensor MfmgcnModel::predict(const Tensor& inputs, const graphs::StaticGraphs& statics) const
{
    tape::Tape t(false);
    return forward(t, inputs, statics).value();
}

Tensor MfmgcnModel::fused_adjacency(const Tensor& window, const graphs::StaticGraphs& statics) const
{
    tape::Tape t(false);
    const tape::ParamStore& ps = params_;
    const std::vector<Var> fixed = static_inputs(t, statics);
    Var learned;
    if (cfg_.uses("L")) {
        learned = graphs::learnable_graph(t.param(ps, "graph.E1"), t.param(ps, "graph.E2"),
                                          t.param(ps, "graph.theta1"), t.param(ps, "graph.theta2"),
                                          cfg_.alpha);
    }
    return fused(t, ps, t.constant(window), fixed, learned).value();
}

MfmgcnModel build_model(const ModelConfig& cfg)
{
    validate(cfg);
    std::mt19937_64 rng(cfg.seed);
    tape::ParamStore ps;
    auto uniform = [&](Shape shape, double bound) {
        std::uniform_real_distribution<double> u(-bound, bound);
        Tensor t(std::move(shape));
        for (double& v : t.data) v = u(rng);
        return t;
    };
    auto fan = [](std::size_t fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); };

    const std::size_t n = cfg.n_nodes, d = cfg.embed_dim;
    if (cfg.uses("L")) {
        ps.add("graph.E1", uniform({n, d}, 1.0));
        ps.add("graph.E2", uniform({n, d}, 1.0));
        ps.add("graph.theta1", uniform({d, d}, fan(d)));
        ps.add("graph.theta2", uniform({d, d}, fan(d)));
    }
    if (cfg.uses("K")) {
        ps.add("dyn.W1", uniform({cfg.input_len, d}, fan(cfg.input_len)));
        ps.add("dyn.W2", uniform({cfg.input_len, d}, fan(cfg.input_len)));
    }
    const double share = 1.0 / static_cast<double>(cfg.graphs.size());
    for (const auto& slot : cfg.graphs) ps.add("fusion." + slot, Tensor({n, n}, share));

    std::size_t t = cfg.input_len;
    for (std::size_t b = 0; b < cfg.blocks.size(); ++b) {
        const auto& blk = cfg.blocks[b];
        const std::size_t ci = blk.channels_in, co = blk.channels_out;
        ps.add(block_name(b, "cheb.theta"), uniform({blk.cheb_order, ci, co}, fan(blk.cheb_order * ci)));
        ps.add(block_name(b, "cheb.bias"), Tensor({co}));
        for (std::size_t j = 0; j < blk.kernels.size(); ++j) {
            const std::size_t k = blk.kernels[j];
            ps.add(block_name(b, "branch" + std::to_string(j) + ".kernel"), uniform({k, co, co}, fan(k * co)));
        }
        const std::size_t cat = blk.kernels.size() * co;
        ps.add(block_name(b, "fuse.weight"), uniform({1, cat, co}, fan(cat)));
        ps.add(block_name(b, "fuse.bias"), Tensor({co}));
        ps.add(block_name(b, "res.weight"), uniform({1, ci, co}, fan(ci)));
        t -= *std::max_element(blk.kernels.begin(), blk.kernels.end()) - 1;
    }
    const std::size_t flat = t * cfg.blocks.back().channels_out;
    ps.add("out.weight", uniform({flat, cfg.horizon}, fan(flat)));
    ps.add("out.bias", Tensor({cfg.horizon}));
    return MfmgcnModel(cfg, std::move(ps));
}

MfmgcnModel permute_nodes(const MfmgcnModel& m, const std::vector<std::size_t>& perm)
{
    const std::size_t n = m.config().n_nodes;
    if (perm.size() != n) throw ConfigError("permutation length does not match the node count");
    tape::ParamStore ps = m.params();
    for (tape::ParamId id = 0; id < ps.size(); ++id) {
        const std::string& name = ps.name(id);
        const Tensor& src = m.params().value(id);
        Tensor& dst = ps.value(id);
        if (name == "graph.E1" || name == "graph.E2") {
            const std::size_t cols = src.shape[1];
            for (std::size_t i = 0; i < n; ++i)
                std::copy_n(src.data.begin() + static_cast<std::ptrdiff_t>(perm[i] * cols), cols,
                            dst.data.begin() + static_cast<std::ptrdiff_t>(i * cols));
        } else if (name.rfind("fusion.", 0) == 0) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) dst.data[i * n + j] = src.data[perm[i] * n + perm[j]];
        }
    }
    return MfmgcnModel(m.config(), std::move(ps));
}

Tensor target_channel(const Tensor& targets)
{
    if (targets.rank() != 4) throw ShapeError("target_channel: expected [B x N x W x D], got " + tape::shape_str(targets.shape));
    const std::size_t rows = targets.shape[0] * targets.shape[1] * targets.shape[2], d = targets.shape[3];
    Tensor out({targets.shape[0], targets.shape[1], targets.shape[2], 1});
    for (std::size_t r = 0; r < rows; ++r) out.data[r] = targets.data[r * d];
    return out;
}

} // namespace mfmgcn::model
