// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/graphs/laplacian.hpp"

#include "mfmgcn/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace mfmgcn::graphs {

using tape::Tensor;
using tape::Var;

namespace {

// Deterministic pseudo-random start vector.
double start_component(std::size_t i)
{
    std::uint64_t z = 0x9E3779B97F4A7C15ull * (i + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) / 9007199254740992.0 - 0.5;
}

// Inverse iteration with shift lambda; keeps v when a solve degenerates.
void polish(const Tensor& m, double lambda, std::vector<double>& v, std::size_t steps)
{
    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto n = static_cast<Eigen::Index>(v.size());
    const double shift = lambda + 1e-10 * std::max(1.0, std::fabs(lambda));
    Mat a = Eigen::Map<const Mat>(m.data.data(), n, n);
    a.diagonal().array() -= shift;
    const Eigen::PartialPivLU<Mat> lu(a);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    for (std::size_t s = 0; s < steps; ++s) {
        Eigen::VectorXd y = lu.solve(x);
        const double norm = y.norm();
        if (!std::isfinite(norm) || norm == 0.0) return;
        x = y / norm;
    }
    if (x.dot(Eigen::Map<const Eigen::VectorXd>(v.data(), n)) < 0.0) x = -x;
    Eigen::Map<Eigen::VectorXd>(v.data(), n) = x;
}

Tensor identity(std::size_t n)
{
    Tensor eye({n, n});
    for (std::size_t i = 0; i < n; ++i) eye.data[i * n + i] = 1.0;
    return eye;
}

} // namespace

PowerIterationResult power_iteration(const Tensor& m, const PowerIterationOptions& opts)
{
    if (m.rank() != 2 || m.shape[0] != m.shape[1]) throw ShapeError("power_iteration: expected a square matrix, got " + tape::shape_str(m.shape));
    const std::size_t n = m.shape[0];
    PowerIterationResult r;
    std::vector<double> v(n), w(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = start_component(i);
        norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;

    for (r.iterations = 1; r.iterations <= opts.max_iter; ++r.iterations) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += m.data[i * n + j] * v[j];
            w[i] = s;
        }
        double lambda = 0.0, wn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lambda += v[i] * w[i];
            wn += w[i] * w[i];
        }
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res += (w[i] - lambda * v[i]) * (w[i] - lambda * v[i]);
        r.lambda = lambda;
        if (std::sqrt(res) <= opts.tol) {
            r.converged = true;
            break;
        }
        wn = std::sqrt(wn);
        if (!(wn > 0.0)) break;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    }
    r.iterations = std::min(r.iterations, opts.max_iter);
    if (r.converged && opts.polish_steps > 0) polish(m, r.lambda, v, opts.polish_steps);
    r.vector = std::move(v);
    return r;
}

LaplacianVars scaled_laplacian(Var a, const PowerIterationOptions& opts)
{
    const auto& s = a.shape();
    if (s.size() != 2 || s[0] != s[1]) throw ShapeError("scaled_laplacian: expected a square matrix, got " + tape::shape_str(s));
    const std::size_t n = s[0];
    tape::Tape& t = a.tape();
    LaplacianVars out;

    Var abs_a = tape::abs(a);
    Var sym = tape::scalar_mul(tape::add(abs_a, tape::transpose(abs_a)), 0.5);
    Var deg = tape::sum_last_axis(sym);
    for (std::size_t i = 0; i < n; ++i)
        if (deg.value().data[i] == 0.0) out.isolated.push_back(i);
    if (!out.isolated.empty()) {
        Tensor loops({n, n});
        for (std::size_t i : out.isolated) loops.data[i * n + i] = 1.0;
        sym = tape::add(sym, t.constant(std::move(loops)));
        deg = tape::sum_last_axis(sym);
    }
    Var dinv = tape::rsqrt(deg);
    Var outer = tape::matmul(tape::reshape(dinv, {n, 1}), tape::reshape(dinv, {1, n}));
    Var eye = t.constant(identity(n));
    Var lap = tape::sub(eye, tape::hadamard(sym, outer));

    const PowerIterationResult pi = power_iteration(lap.value(), opts);
    if (pi.converged && pi.lambda > 1e-12) {
        std::vector<double> v = pi.vector;
        out.lambda_max = t.record("lambda_max", {lap}, Tensor::scalar(pi.lambda),
                                  [v, n](const Tensor& g, std::vector<Tensor*>& in) {
                                      Tensor& gl = *in[0];
                                      for (std::size_t i = 0; i < n; ++i)
                                          for (std::size_t j = 0; j < n; ++j) gl.data[i * n + j] += g[0] * v[i] * v[j];
                                  });
    } else {
        out.used_fallback = true;
        out.lambda_max = t.constant(Tensor::scalar(opts.fallback));
    }
    Var two_over = tape::scalar_mul(tape::reciprocal(out.lambda_max), 2.0);
    out.l_tilde = tape::sub(tape::scale(lap, two_over), eye);
    return out;
}

ScaledLaplacian scaled_laplacian(const Adjacency& a, const PowerIterationOptions& opts)
{
    tape::Tape t(false);
    LaplacianVars v = scaled_laplacian(t.constant(a.weights), opts);
    return {v.l_tilde.value(), v.lambda_max.item(), v.used_fallback, v.isolated};
}

Var cheb_filter(Var l_tilde, Var theta, Var x)
{
    const auto& ls = l_tilde.shape();
    const auto& ts = theta.shape();
    const auto& xs = x.shape();
    if (ls.size() != 2 || ls[0] != ls[1]) throw ShapeError("cheb_filter: Laplacian must be square, got " + tape::shape_str(ls));
    if (ts.size() != 3 || ts[0] == 0) throw ShapeError("cheb_filter: theta must be [K x C_in x C_out], got " + tape::shape_str(ts));
    if ((xs.size() != 2 && xs.size() != 3) || xs[0] != ls[0] || xs.back() != ts[1]) {
        throw ShapeError("cheb_filter: signal " + tape::shape_str(xs) + " does not fit Laplacian " +
                         tape::shape_str(ls) + " and theta " + tape::shape_str(ts));
    }
    const std::size_t n = ls[0], k_order = ts[0], cin = ts[1], cout = ts[2];
    const std::size_t m = xs.size() == 3 ? xs[1] : 1;

    auto project = [&](Var tk, std::size_t k) {
        Var th = tape::reshape(tape::slice(theta, 0, k, k + 1), {cin, cout});
        return tape::matmul(tape::reshape(tk, {n * m, cin}), th);
    };
    Var t0 = tape::reshape(x, {n, m * cin});
    Var y = project(t0, 0);
    if (k_order > 1) {
        Var t1 = tape::matmul(l_tilde, t0);
        y = tape::add(y, project(t1, 1));
        for (std::size_t k = 2; k < k_order; ++k) {
            Var t2 = tape::sub(tape::scalar_mul(tape::matmul(l_tilde, t1), 2.0), t0);
            y = tape::add(y, project(t2, k));
            t0 = t1;
            t1 = t2;
        }
    }
    return xs.size() == 3 ? tape::reshape(y, {n, m, cout}) : tape::reshape(y, {n, cout});
}

Tensor cheb_filter(const ScaledLaplacian& lap, const Tensor& theta, const Tensor& x)
{
    tape::Tape t(false);
    return cheb_filter(t.constant(lap.l_tilde), t.constant(theta), t.constant(x)).value();
}

} // namespace mfmgcn::graphs
