// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/tape/tensor.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mfmgcn::tape {

class Tape;

using ParamId = std::size_t;

/// Named, ordered collection of trainable tensors. Ids are insertion indices
/// and stay stable for the lifetime of the store.
class ParamStore {
public:
    ParamId add(std::string name, Tensor init);

    std::size_t size() const { return values_.size(); }
    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    ParamId id(const std::string& name) const;
    const std::string& name(ParamId id) const { return names_.at(id); }

    Tensor& value(ParamId id) { return values_.at(id); }
    const Tensor& value(ParamId id) const { return values_.at(id); }
    Tensor& value(const std::string& name) { return values_.at(id(name)); }
    const Tensor& value(const std::string& name) const { return values_.at(id(name)); }

    std::size_t total_elements() const;

    bool operator==(const ParamStore& other) const
    {
        return names_ == other.names_ && values_ == other.values_;
    }

private:
    std::vector<std::string> names_;
    std::vector<Tensor> values_;
    std::unordered_map<std::string, ParamId> index_;
};

/// Gradients aligned with a ParamStore; parameters the loss never reached
/// hold zeros of the right shape.
struct GradientStore {
    std::vector<Tensor> grads;

    const Tensor& operator[](ParamId id) const { return grads.at(id); }
    std::size_t size() const { return grads.size(); }
};

/// Handle to a node on a tape. Cheap to copy; only valid while the tape lives.
class Var {
public:
    Var() = default;

    const Tensor& value() const;
    const Shape& shape() const { return value().shape; }
    std::size_t id() const { return id_; }
    Tape& tape() const { return *tape_; }
    bool requires_grad() const;
    bool valid() const { return tape_ != nullptr; }

    // Value of a single-element tensor.
    double item() const;

private:
    friend class Tape;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Accumulates into the gradient of each input; entries are null for inputs
/// that do not require gradients.
using BackwardFn = std::function<void(const Tensor& grad_out, std::vector<Tensor*>& input_grads)>;

/// Append-only record of primitive applications. Append order is a
/// topological order, so backward is a single reverse sweep.
class Tape {
public:
    explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool grad_enabled() const { return grad_enabled_; }

    Var constant(Tensor value);

    // Leaf for a stored parameter. Repeated calls return the same node.
    Var param(const ParamStore& store, ParamId id);
    Var param(const ParamStore& store, const std::string& name) { return param(store, store.id(name)); }

    // Appends a primitive. `backward` is dropped when no input needs a gradient.
    Var record(std::string_view op, std::vector<Var> inputs, Tensor value, BackwardFn backward);

    // Reverse sweep from a scalar loss. Valid once per tape.
    GradientStore backward(Var loss, const ParamStore& store);

    std::size_t size() const { return nodes_.size(); }

private:
    friend class Var;

    struct Node {
        std::string_view op;
        Tensor value;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        bool requires_grad = false;
        std::optional<ParamId> param;
    };

    Var push(Node node);

    std::deque<Node> nodes_;  // deque: node references stay valid as the tape grows
    std::unordered_map<ParamId, std::size_t> param_nodes_;
    const ParamStore* store_ = nullptr;
    bool grad_enabled_;
    bool consumed_ = false;
};

} // namespace mfmgcn::tape
