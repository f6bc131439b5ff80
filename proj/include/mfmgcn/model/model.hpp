// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/graphs/graph_set.hpp"
#include "mfmgcn/graphs/laplacian.hpp"
#include "mfmgcn/model/config.hpp"
#include "mfmgcn/tape/ops.hpp"

#include <span>
#include <vector>

namespace mfmgcn::model {

/// Multi-branch temporal convolution on x [R x T x C]: one valid conv per
/// kernel, center-cropped to the longest kernel's output, concatenated on
/// channels and mixed by a 1x1 convolution with bias.
tape::Var temporal_multibranch(tape::Var x, std::span<const tape::Var> kernels, tape::Var fuse_weight,
                               tape::Var fuse_bias);

/// Drops (T - t_out) / 2 steps from each end of axis 1.
tape::Var center_crop_time(tape::Var x, std::size_t t_out);

struct BlockParams {
    tape::Var cheb_theta;  // [K x C_in x C_out]
    tape::Var cheb_bias;   // [C_out]
    std::vector<tape::Var> branch_kernels;  // [k x C_out x C_out]
    tape::Var fuse_weight;  // [1 x (branches * C_out) x C_out]
    tape::Var fuse_bias;    // [C_out]
    tape::Var res_weight;   // [1 x C_in x C_out]
};

/// One window: x [N x T_in x C_in] -> [N x T_out x C_out].
/// s = relu(cheb(x) + b); y = relu(temporal_multibranch(s) + res(crop(x))).
tape::Var st_block_forward(tape::Var x, const BlockParams& p, tape::Var l_tilde);

struct ForwardStats {
    std::size_t laplacians = 0;
    std::size_t eigen_fallbacks = 0;
    std::size_t isolated_nodes = 0;
};

class MfmgcnModel {
public:
    MfmgcnModel() = default;
    MfmgcnModel(ModelConfig cfg, tape::ParamStore params);

    const ModelConfig& config() const { return cfg_; }
    tape::ParamStore& params() { return params_; }
    const tape::ParamStore& params() const { return params_; }

    /// inputs [B x N x W' x D] -> predictions of the target channel [B x N x W x 1].
    tape::Var forward(tape::Tape& t, const tape::Tensor& inputs, const graphs::StaticGraphs& statics,
                      ForwardStats* stats = nullptr) const;

    /// Same network evaluated with an external parameter store of identical layout.
    tape::Var forward_with(tape::Tape& t, const tape::ParamStore& params, const tape::Tensor& inputs,
                           const graphs::StaticGraphs& statics, ForwardStats* stats = nullptr) const;

    /// Forward pass on a no-gradient tape.
    tape::Tensor predict(const tape::Tensor& inputs, const graphs::StaticGraphs& statics) const;

    /// Current fused adjacency for one input window [N x W' x D].
    tape::Tensor fused_adjacency(const tape::Tensor& window, const graphs::StaticGraphs& statics) const;

private:
    BlockParams block_params(tape::Tape& t, const tape::ParamStore& ps, std::size_t b) const;
    tape::Var window_forward(tape::Tape& t, const tape::ParamStore& ps, tape::Var window,
                             const std::vector<tape::Var>& fixed, tape::Var learned, ForwardStats* stats) const;
    std::vector<tape::Var> static_inputs(tape::Tape& t, const graphs::StaticGraphs& statics) const;
    tape::Var fused(tape::Tape& t, const tape::ParamStore& ps, tape::Var window, const std::vector<tape::Var>& fixed,
                    tape::Var learned) const;

    ModelConfig cfg_;
    tape::ParamStore params_;
};

/// Validates cfg and initializes parameters from cfg.seed: uniform in
/// +-1/sqrt(fan_in) for weights, zero biases, fusion weights 1/|S|.
MfmgcnModel build_model(const ModelConfig& cfg);

/// Relabels node-indexed parameters: out node i is in node perm[i].
MfmgcnModel permute_nodes(const MfmgcnModel& m, const std::vector<std::size_t>& perm);

/// Target channel of the window targets: [B x N x W x D] -> [B x N x W x 1].
tape::Tensor target_channel(const tape::Tensor& targets);

} // namespace mfmgcn::model
