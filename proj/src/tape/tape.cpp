// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/tape/tape.hpp"

#include "mfmgcn/errors.hpp"

namespace mfmgcn::tape {

ParamId ParamStore::add(std::string name, Tensor init)
{
    if (contains(name)) throw ConfigError("duplicate parameter name: " + name);
    const ParamId id = values_.size();
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    values_.push_back(std::move(init));
    return id;
}

ParamId ParamStore::id(const std::string& name) const
{
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
}

std::size_t ParamStore::total_elements() const
{
    std::size_t n = 0;
    for (const auto& v : values_) n += v.size();
    return n;
}

const Tensor& Var::value() const
{
    return tape_->nodes_.at(id_).value;
}

bool Var::requires_grad() const
{
    return tape_->nodes_.at(id_).requires_grad;
}

double Var::item() const
{
    const Tensor& v = value();
    if (v.size() != 1) throw ShapeError("item: expected a single element, got " + shape_str(v.shape));
    return v[0];
}

Var Tape::push(Node node)
{
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value)
{
    Node n;
    n.op = "constant";
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::param(const ParamStore& store, ParamId id)
{
    if (store_ && store_ != &store) throw ConfigError("tape: parameters from two different stores");
    store_ = &store;
    if (auto it = param_nodes_.find(id); it != param_nodes_.end()) return Var(this, it->second);
    Node n;
    n.op = "param";
    n.value = store.value(id);
    n.requires_grad = grad_enabled_;
    n.param = id;
    Var v = push(std::move(n));
    param_nodes_.emplace(id, v.id());
    return v;
}

Var Tape::record(std::string_view op, std::vector<Var> inputs, Tensor value, BackwardFn backward)
{
    Node n;
    n.op = op;
    n.value = std::move(value);
    n.inputs.reserve(inputs.size());
    for (const Var& in : inputs) {
        if (in.tape_ != this) throw ConfigError(std::string(op) + ": input belongs to another tape");
        n.inputs.push_back(in.id_);
        n.requires_grad = n.requires_grad || nodes_[in.id_].requires_grad;
    }
    if (n.requires_grad) n.backward = std::move(backward);
    return push(std::move(n));
}

GradientStore Tape::backward(Var loss, const ParamStore& store)
{
    if (consumed_) throw ConfigError("backward: tape already consumed");
    if (loss.tape_ != this) throw ConfigError("backward: loss belongs to another tape");
    if (loss.value().size() != 1) throw ShapeError("backward: loss must be scalar, got " + shape_str(loss.shape()));
    if (store_ && store_ != &store) throw ConfigError("backward: store does not match the tape's parameters");
    consumed_ = true;

    std::vector<Tensor> grads(nodes_.size());
    grads[loss.id_] = Tensor(loss.shape(), 1.0);

    std::vector<Tensor*> input_grads;
    for (std::size_t i = loss.id_ + 1; i-- > 0;) {
        Node& node = nodes_[i];
        if (!node.requires_grad || !node.backward || grads[i].data.empty()) continue;
        input_grads.clear();
        for (std::size_t in : node.inputs) {
            if (!nodes_[in].requires_grad) {
                input_grads.push_back(nullptr);
                continue;
            }
            if (grads[in].data.empty()) grads[in] = Tensor(nodes_[in].value.shape, 0.0);
            input_grads.push_back(&grads[in]);
        }
        node.backward(grads[i], input_grads);
    }

    GradientStore out;
    out.grads.reserve(store.size());
    for (ParamId p = 0; p < store.size(); ++p) {
        auto it = param_nodes_.find(p);
        if (it != param_nodes_.end() && !grads[it->second].data.empty()) {
            out.grads.push_back(std::move(grads[it->second]));
        } else {
            out.grads.emplace_back(store.value(p).shape, 0.0);
        }
    }
    return out;
}

} // namespace mfmgcn::tape
