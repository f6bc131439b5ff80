// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/tape/ops.hpp"

#include "mfmgcn/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

namespace mfmgcn::tape {

namespace {

[[noreturn]] void shape_mismatch(std::string_view op, const Shape& a, const Shape& b)
{
    throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " + shape_str(b));
}

void require_rank(std::string_view op, const Shape& s, std::size_t rank)
{
    if (s.size() != rank) {
        throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " + shape_str(s));
    }
}

void require_same(std::string_view op, const Var& a, const Var& b)
{
    if (a.shape() != b.shape()) shape_mismatch(op, a.shape(), b.shape());
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }

// c[m x n] += a[m x k] * b[k x n]
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n)
{
    MutMap(c, ix(m), ix(n)).noalias() += ConstMap(a, ix(m), ix(k)) * ConstMap(b, ix(k), ix(n));
}

// c[m x k] += g[m x n] * b[k x n]^T
void gemm_nt(const double* g, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k)
{
    MutMap(c, ix(m), ix(k)).noalias() += ConstMap(g, ix(m), ix(n)) * ConstMap(b, ix(k), ix(n)).transpose();
}

// c[k x n] += a[m x k]^T * g[m x n]
void gemm_tn(const double* a, const double* g, double* c, std::size_t m, std::size_t k, std::size_t n)
{
    MutMap(c, ix(k), ix(n)).noalias() += ConstMap(a, ix(m), ix(k)).transpose() * ConstMap(g, ix(m), ix(n));
}

template <typename F, typename D>
Var unary(std::string_view op, Var a, F f, D dfdx)
{
    const Tensor& x = a.value();
    Tensor y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
    Tape& t = a.tape();
    return t.record(op, {a}, std::move(y), [a, dfdx](const Tensor& g, std::vector<Tensor*>& in) {
        const Tensor& x = a.value();
        Tensor& gx = *in[0];
        for (std::size_t i = 0; i < x.size(); ++i) gx[i] += g[i] * dfdx(x[i]);
    });
}

} // namespace

Var matmul(Var a, Var b)
{
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    if (sa.size() != 2 || sb.size() != 2 || sa[1] != sb[0]) shape_mismatch("matmul", sa, sb);
    const std::size_t m = sa[0], k = sa[1], n = sb[1];
    Tensor y(Shape{m, n});
    gemm_nn(a.value().data.data(), b.value().data.data(), y.data.data(), m, k, n);
    return a.tape().record("matmul", {a, b}, std::move(y), [a, b, m, k, n](const Tensor& g, std::vector<Tensor*>& in) {
        if (in[0]) gemm_nt(g.data.data(), b.value().data.data(), in[0]->data.data(), m, n, k);
        if (in[1]) gemm_tn(a.value().data.data(), g.data.data(), in[1]->data.data(), m, k, n);
    });
}

Var transpose(Var a)
{
    require_rank("transpose", a.shape(), 2);
    const std::size_t r = a.shape()[0], c = a.shape()[1];
    const Tensor& x = a.value();
    Tensor y(Shape{c, r});
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) y[j * r + i] = x[i * c + j];
    return a.tape().record("transpose", {a}, std::move(y), [r, c](const Tensor& g, std::vector<Tensor*>& in) {
        Tensor& gx = *in[0];
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += g[j * r + i];
    });
}

Var add(Var a, Var b)
{
    require_same("add", a, b);
    Tensor y = a.value();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
    return a.tape().record("add", {a, b}, std::move(y), [](const Tensor& g, std::vector<Tensor*>& in) {
        for (Tensor* gi : in) {
            if (!gi) continue;
            for (std::size_t i = 0; i < g.size(); ++i) (*gi)[i] += g[i];
        }
    });
}

Var sub(Var a, Var b)
{
    require_same("sub", a, b);
    Tensor y = a.value();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
    return a.tape().record("sub", {a, b}, std::move(y), [](const Tensor& g, std::vector<Tensor*>& in) {
        if (in[0])
            for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i];
        if (in[1])
            for (std::size_t i = 0; i < g.size(); ++i) (*in[1])[i] -= g[i];
    });
}

Var hadamard(Var a, Var b)
{
    require_same("hadamard", a, b);
    Tensor y = a.value();
    const Tensor& bv = b.value();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
    return a.tape().record("hadamard", {a, b}, std::move(y), [a, b](const Tensor& g, std::vector<Tensor*>& in) {
        if (in[0]) {
            const Tensor& bv = b.value();
            for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i] * bv[i];
        }
        if (in[1]) {
            const Tensor& av = a.value();
            for (std::size_t i = 0; i < g.size(); ++i) (*in[1])[i] += g[i] * av[i];
        }
    });
}

Var scalar_mul(Var a, double s)
{
    Tensor y = a.value();
    for (double& v : y.data) v *= s;
    return a.tape().record("scalar_mul", {a}, std::move(y), [s](const Tensor& g, std::vector<Tensor*>& in) {
        for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i] * s;
    });
}

Var scale(Var a, Var s)
{
    if (s.value().size() != 1) shape_mismatch("scale", a.shape(), s.shape());
    const double sv = s.item();
    Tensor y = a.value();
    for (double& v : y.data) v *= sv;
    return a.tape().record("scale", {a, s}, std::move(y), [a, s](const Tensor& g, std::vector<Tensor*>& in) {
        if (in[0]) {
            const double sv = s.item();
            for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i] * sv;
        }
        if (in[1]) {
            const Tensor& av = a.value();
            double acc = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * av[i];
            (*in[1])[0] += acc;
        }
    });
}

Var reciprocal(Var a)
{
    return unary("reciprocal", a, [](double x) { return 1.0 / x; }, [](double x) { return -1.0 / (x * x); });
}

Var rsqrt(Var a)
{
    return unary(
        "rsqrt", a, [](double x) { return 1.0 / std::sqrt(x); },
        [](double x) { return -0.5 / (x * std::sqrt(x)); });
}

Var tanh(Var a)
{
    return unary(
        "tanh", a, [](double x) { return std::tanh(x); },
        [](double x) {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        });
}

Var relu(Var a)
{
    return unary("relu", a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var abs(Var a)
{
    return unary(
        "abs", a, [](double x) { return std::fabs(x); },
        [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var concat(std::span<const Var> parts, std::size_t axis)
{
    if (parts.empty()) throw ShapeError("concat: no inputs");
    const Shape& s0 = parts[0].shape();
    if (axis >= s0.size()) throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " + shape_str(s0));
    std::size_t outer = 1, inner = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= s0[d];
    for (std::size_t d = axis + 1; d < s0.size(); ++d) inner *= s0[d];

    std::vector<std::size_t> extents;
    std::size_t total = 0;
    for (const Var& p : parts) {
        const Shape& s = p.shape();
        if (s.size() != s0.size()) shape_mismatch("concat", s0, s);
        for (std::size_t d = 0; d < s.size(); ++d)
            if (d != axis && s[d] != s0[d]) shape_mismatch("concat", s0, s);
        extents.push_back(s[axis]);
        total += s[axis];
    }
    Shape out_shape = s0;
    out_shape[axis] = total;
    Tensor y(out_shape);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const Tensor& x = parts[k].value();
        const std::size_t chunk = extents[k] * inner;
        for (std::size_t o = 0; o < outer; ++o) {
            const double* src = x.data.data() + o * chunk;
            double* dst = y.data.data() + o * total * inner + offset * inner;
            std::copy(src, src + chunk, dst);
        }
        offset += extents[k];
    }
    std::vector<Var> inputs(parts.begin(), parts.end());
    return parts[0].tape().record(
        "concat", std::move(inputs), std::move(y),
        [extents, outer, inner, total](const Tensor& g, std::vector<Tensor*>& in) {
            std::size_t offset = 0;
            for (std::size_t k = 0; k < in.size(); ++k) {
                const std::size_t chunk = extents[k] * inner;
                if (in[k]) {
                    for (std::size_t o = 0; o < outer; ++o) {
                        const double* src = g.data.data() + o * total * inner + offset * inner;
                        double* dst = in[k]->data.data() + o * chunk;
                        for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
                    }
                }
                offset += extents[k];
            }
        });
}

Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end)
{
    const Shape& s = a.shape();
    if (axis >= s.size() || begin > end || end > s[axis]) {
        throw ShapeError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) + ") on axis " +
                         std::to_string(axis) + " invalid for " + shape_str(s));
    }
    std::size_t outer = 1, inner = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= s[d];
    for (std::size_t d = axis + 1; d < s.size(); ++d) inner *= s[d];
    const std::size_t full = s[axis], len = end - begin;
    Shape out_shape = s;
    out_shape[axis] = len;
    Tensor y(out_shape);
    const Tensor& x = a.value();
    for (std::size_t o = 0; o < outer; ++o) {
        const double* src = x.data.data() + (o * full + begin) * inner;
        std::copy(src, src + len * inner, y.data.data() + o * len * inner);
    }
    return a.tape().record("slice", {a}, std::move(y),
                           [outer, inner, full, begin, len](const Tensor& g, std::vector<Tensor*>& in) {
                               for (std::size_t o = 0; o < outer; ++o) {
                                   const double* src = g.data.data() + o * len * inner;
                                   double* dst = in[0]->data.data() + (o * full + begin) * inner;
                                   for (std::size_t i = 0; i < len * inner; ++i) dst[i] += src[i];
                               }
                           });
}

Var reshape(Var a, Shape shape)
{
    if (numel(shape) != a.value().size()) shape_mismatch("reshape", a.shape(), shape);
    Tensor y(std::move(shape), a.value().data);
    return a.tape().record("reshape", {a}, std::move(y), [](const Tensor& g, std::vector<Tensor*>& in) {
        for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i];
    });
}

Var flatten(Var a)
{
    return reshape(a, Shape{a.value().size()});
}

Var add_bias(Var x, Var bias)
{
    const Shape& s = x.shape();
    if (s.empty() || bias.shape().size() != 1 || bias.shape()[0] != s.back()) shape_mismatch("add_bias", s, bias.shape());
    const std::size_t c = s.back();
    const std::size_t rows = x.value().size() / c;
    Tensor y = x.value();
    const Tensor& b = bias.value();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < c; ++j) y[r * c + j] += b[j];
    return x.tape().record("add_bias", {x, bias}, std::move(y), [rows, c](const Tensor& g, std::vector<Tensor*>& in) {
        if (in[0])
            for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i];
        if (in[1])
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t j = 0; j < c; ++j) (*in[1])[j] += g[r * c + j];
    });
}

Var sum_last_axis(Var a)
{
    const Shape& s = a.shape();
    if (s.empty()) throw ShapeError("sum_last_axis: rank-0 input");
    const std::size_t c = s.back();
    const std::size_t rows = a.value().size() / c;
    Shape out_shape(s.begin(), s.end() - 1);
    if (out_shape.empty()) out_shape = {1};
    Tensor y(out_shape);
    const Tensor& x = a.value();
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) acc += x[r * c + j];
        y[r] = acc;
    }
    return a.tape().record("sum_last_axis", {a}, std::move(y), [rows, c](const Tensor& g, std::vector<Tensor*>& in) {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < c; ++j) (*in[0])[r * c + j] += g[r];
    });
}

Var reduce_sum(Var a)
{
    double acc = 0.0;
    for (double v : a.value().data) acc += v;
    return a.tape().record("reduce_sum", {a}, Tensor::scalar(acc), [](const Tensor& g, std::vector<Tensor*>& in) {
        for (double& v : in[0]->data) v += g[0];
    });
}

Var reduce_mean(Var a)
{
    const std::size_t n = a.value().size();
    if (n == 0) throw ShapeError("reduce_mean: empty tensor");
    double acc = 0.0;
    for (double v : a.value().data) acc += v;
    const double inv = 1.0 / static_cast<double>(n);
    return a.tape().record("reduce_mean", {a}, Tensor::scalar(acc * inv), [inv](const Tensor& g, std::vector<Tensor*>& in) {
        for (double& v : in[0]->data) v += g[0] * inv;
    });
}

Var conv1d(Var x, Var kernel, std::size_t dilation)
{
    const Shape& sx = x.shape();
    const Shape& sk = kernel.shape();
    if (sx.size() != 3 || sk.size() != 3 || sx[2] != sk[1] || dilation == 0) shape_mismatch("conv1d", sx, sk);
    const std::size_t rows = sx[0], t_in = sx[1], c_in = sx[2];
    const std::size_t k = sk[0], c_out = sk[2];
    const std::size_t span = dilation * (k - 1);
    if (k == 0 || span >= t_in) shape_mismatch("conv1d", sx, sk);
    const std::size_t t_out = t_in - span;

    Tensor y(Shape{rows, t_out, c_out});
    const double* xv = x.value().data.data();
    const double* wv = kernel.value().data.data();
    // Each tap is a [t_out x c_in] . [c_in x c_out] product on a contiguous block.
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < k; ++j)
            gemm_nn(xv + (r * t_in + j * dilation) * c_in, wv + j * c_in * c_out, y.data.data() + r * t_out * c_out,
                    t_out, c_in, c_out);
    return x.tape().record(
        "conv1d", {x, kernel}, std::move(y),
        [x, kernel, rows, t_in, c_in, k, c_out, t_out, dilation](const Tensor& g, std::vector<Tensor*>& in) {
            const double* xv = x.value().data.data();
            const double* wv = kernel.value().data.data();
            for (std::size_t r = 0; r < rows; ++r) {
                const double* gblock = g.data.data() + r * t_out * c_out;
                for (std::size_t j = 0; j < k; ++j) {
                    const std::size_t xoff = (r * t_in + j * dilation) * c_in;
                    if (in[0]) gemm_nt(gblock, wv + j * c_in * c_out, in[0]->data.data() + xoff, t_out, c_out, c_in);
                    if (in[1]) gemm_tn(xv + xoff, gblock, in[1]->data.data() + j * c_in * c_out, t_out, c_in, c_out);
                }
            }
        });
}

} // namespace mfmgcn::tape
