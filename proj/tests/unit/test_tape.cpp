// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/errors.hpp"
#include "mfmgcn/tape/adam.hpp"
#include "mfmgcn/tape/gradcheck.hpp"
#include "mfmgcn/tape/ops.hpp"
#include "test_random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace mfmgcn::tape {
namespace {

using testing::random_tensor;

TEST(TapeOps, TanhBackwardAtZeroIsOne)
{
    ParamStore ps;
    ps.add("x", Tensor::scalar(0.0));
    Tape t;
    Var y = reduce_sum(tanh(t.param(ps, "x")));
    auto g = t.backward(y, ps);
    EXPECT_DOUBLE_EQ(g[0][0], 1.0);
}

TEST(TapeOps, ReluSubgradientAtZeroIsZero)
{
    ParamStore ps;
    ps.add("x", Tensor(Shape{3}, {-1.0, 0.0, 2.0}));
    Tape t;
    auto g = t.backward(reduce_sum(relu(t.param(ps, "x"))), ps);
    EXPECT_EQ(g[0].data, (std::vector<double>{0.0, 0.0, 1.0}));
}

TEST(TapeOps, MatmulGradientIsUpstreamTimesBTransposed)
{
    std::mt19937_64 rng(11);
    ParamStore ps;
    ps.add("a", random_tensor({3, 4}, rng));
    const Tensor b = random_tensor({4, 2}, rng);
    const Tensor w = random_tensor({3, 2}, rng);  // loss = sum(w .* (A B)) so G = w

    Tape t;
    Var loss = reduce_sum(hadamard(matmul(t.param(ps, "a"), t.constant(b)), t.constant(w)));
    auto g = t.backward(loss, ps);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            double expect = 0.0;
            for (std::size_t j = 0; j < 2; ++j) expect += w.at(i, j) * b.at(k, j);
            EXPECT_NEAR(g[0].at(i, k), expect, 1e-14);
        }
    }
    auto fd = finite_diff_check(
        [&](Tape& tp, const ParamStore& p) {
            return reduce_sum(hadamard(matmul(tp.param(p, "a"), tp.constant(b)), tp.constant(w)));
        },
        ps);
    EXPECT_LT(fd.max_rel_error, 1e-6);
}

TEST(TapeOps, ShapeMismatchNamesPrimitiveAndShapes)
{
    Tape t;
    Var a = t.constant(Tensor(Shape{2, 3}));
    Var b = t.constant(Tensor(Shape{2, 3}));
    try {
        matmul(a, b);
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("matmul"), std::string::npos);
        EXPECT_NE(msg.find("[2 x 3]"), std::string::npos);
    }
    EXPECT_THROW(add(a, t.constant(Tensor(Shape{3, 2}))), ShapeError);
    EXPECT_THROW(reshape(a, {5}), ShapeError);
    EXPECT_THROW(slice(a, 1, 2, 4), ShapeError);
}

TEST(TapeOps, ConcatAndSliceRoundTrip)
{
    std::mt19937_64 rng(3);
    Tape t;
    Var a = t.constant(random_tensor({2, 3, 2}, rng));
    Var b = t.constant(random_tensor({2, 1, 2}, rng));
    std::vector<Var> parts{a, b};
    Var c = concat(parts, 1);
    EXPECT_EQ(c.shape(), (Shape{2, 4, 2}));
    EXPECT_EQ(slice(c, 1, 0, 3).value(), a.value());
    EXPECT_EQ(slice(c, 1, 3, 4).value(), b.value());
}

// Direct-sum convolution used as an independent reference.
Tensor conv_oracle(const Tensor& x, const Tensor& w, std::size_t dil)
{
    const std::size_t R = x.dim(0), T = x.dim(1), Ci = x.dim(2), K = w.dim(0), Co = w.dim(2);
    const std::size_t To = T - dil * (K - 1);
    Tensor y(Shape{R, To, Co});
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t t = 0; t < To; ++t)
            for (std::size_t o = 0; o < Co; ++o) {
                double s = 0.0;
                for (std::size_t j = 0; j < K; ++j)
                    for (std::size_t c = 0; c < Ci; ++c)
                        s += x[(r * T + t + j * dil) * Ci + c] * w[(j * Ci + c) * Co + o];
                y[(r * To + t) * Co + o] = s;
            }
    return y;
}

TEST(TapeOps, Conv1dMatchesDirectSum)
{
    std::mt19937_64 rng(5);
    for (std::size_t dil : {1u, 2u}) {
        Tensor x = random_tensor({3, 9, 2}, rng);
        Tensor w = random_tensor({3, 2, 4}, rng);
        Tape t;
        Var y = conv1d(t.constant(x), t.constant(w), dil);
        EXPECT_LT(testing::max_abs_diff(y.value(), conv_oracle(x, w, dil)), 1e-13);
    }
}

TEST(TapeOps, Conv1dKernelOneIsPerTimestepLinearMap)
{
    std::mt19937_64 rng(8);
    Tensor x = random_tensor({4, 6, 3}, rng);
    Tensor w = random_tensor({1, 3, 5}, rng);
    Tape t;
    Var conv = conv1d(t.constant(x), t.constant(w));
    Var lin = matmul(t.constant(Tensor(Shape{24, 3}, x.data)), t.constant(Tensor(Shape{3, 5}, w.data)));
    EXPECT_EQ(conv.value().data, lin.value().data);
}

TEST(TapeOps, Conv1dGradientsMatchFiniteDifferences)
{
    std::mt19937_64 rng(9);
    ParamStore ps;
    ps.add("x", random_tensor({2, 8, 3}, rng));
    ps.add("w", random_tensor({3, 3, 2}, rng));
    auto r = finite_diff_check(
        [](Tape& t, const ParamStore& p) { return reduce_sum(tanh(conv1d(t.param(p, "x"), t.param(p, "w"), 2))); },
        ps);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << "[" << r.worst_index << "]";
}

// A randomly parameterized five-op program: matmul, add_bias, tanh, hadamard, abs, mean.
Var composite(Tape& t, const ParamStore& p, const Tensor& x)
{
    Var h = matmul(t.constant(x), t.param(p, "w1"));
    h = tanh(add_bias(h, t.param(p, "b1")));
    h = hadamard(h, t.param(p, "gate"));
    h = matmul(h, transpose(t.param(p, "w2")));
    return reduce_mean(abs(add_bias(h, t.param(p, "b2"))));
}

class CompositeProgram : public ::testing::TestWithParam<int> {};

TEST_P(CompositeProgram, GradientsMatchCentralDifferences)
{
    std::mt19937_64 rng(1000 + GetParam());
    ParamStore ps;
    ps.add("w1", random_tensor({4, 5}, rng));
    ps.add("b1", random_tensor({5}, rng));
    ps.add("gate", random_tensor({6, 5}, rng));
    ps.add("w2", random_tensor({3, 5}, rng));
    // offset keeps abs() away from its kink
    ps.add("b2", random_tensor({3}, rng, 3.0, 4.0));
    const Tensor x = random_tensor({6, 4}, rng);
    auto r = finite_diff_check([&](Tape& t, const ParamStore& p) { return composite(t, p, x); }, ps);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << "[" << r.worst_index << "]";
}

INSTANTIATE_TEST_SUITE_P(Seeds, CompositeProgram, ::testing::Range(0, 8));

TEST(TapeBackward, SumGivesOnesAndUnreachableGivesZero)
{
    ParamStore ps;
    ps.add("p", Tensor(Shape{2, 2}, {1, 2, 3, 4}));
    ps.add("q", Tensor(Shape{3}, {5, 6, 7}));
    Tape t;
    t.param(ps, "q");  // on the tape but not reachable from the loss
    auto g = t.backward(reduce_sum(t.param(ps, "p")), ps);
    EXPECT_EQ(g[0].data, (std::vector<double>(4, 1.0)));
    EXPECT_EQ(g[1].data, (std::vector<double>(3, 0.0)));
    EXPECT_EQ(g[1].shape, (Shape{3}));
}

TEST(TapeBackward, RequiresScalarLossAndSingleUse)
{
    ParamStore ps;
    ps.add("p", Tensor(Shape{2}, {1, 2}));
    Tape t;
    Var p = t.param(ps, "p");
    EXPECT_THROW(t.backward(p, ps), ShapeError);
    Var l = reduce_sum(p);
    t.backward(l, ps);
    EXPECT_THROW(t.backward(l, ps), ConfigError);
}

TEST(TapeBackward, ReplayIsBitIdentical)
{
    std::mt19937_64 rng(77);
    ParamStore ps;
    ps.add("w1", random_tensor({4, 5}, rng));
    ps.add("b1", random_tensor({5}, rng));
    ps.add("gate", random_tensor({6, 5}, rng));
    ps.add("w2", random_tensor({3, 5}, rng));
    ps.add("b2", random_tensor({3}, rng));
    const Tensor x = random_tensor({6, 4}, rng);
    auto run = [&] {
        Tape t;
        Var l = composite(t, ps, x);
        return std::make_pair(l.item(), t.backward(l, ps).grads);
    };
    auto a = run();
    auto b = run();
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
}

TEST(TapeBackward, NoGradTapeRecordsNoGradients)
{
    ParamStore ps;
    ps.add("p", Tensor(Shape{2}, {1, 2}));
    Tape t(false);
    Var l = reduce_sum(t.param(ps, "p"));
    EXPECT_FALSE(l.requires_grad());
    auto g = t.backward(l, ps);
    EXPECT_EQ(g[0].data, (std::vector<double>{0.0, 0.0}));
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged)
{
    ParamStore ps;
    ps.add("p", Tensor(Shape{3}, {1.0, -2.0, 3.0}));
    const Tensor before = ps.value(0);
    AdamState st;
    GradientStore g{{Tensor(Shape{3}, 0.0)}};
    for (int i = 0; i < 10; ++i) adam_step(ps, g, st, 1e-2);
    EXPECT_EQ(ps.value(0), before);
}

TEST(Adam, ConstantGradientStepApproachesLrTimesSign)
{
    ParamStore ps;
    ps.add("p", Tensor(Shape{2}, {0.0, 0.0}));
    AdamState st;
    GradientStore g{{Tensor(Shape{2}, {0.3, -2.0})}};
    const double lr = 1e-3;
    Tensor prev = ps.value(0);
    for (int i = 0; i < 2000; ++i) {
        prev = ps.value(0);
        adam_step(ps, g, st, lr);
    }
    EXPECT_NEAR(ps.value(0)[0] - prev[0], -lr, 1e-9);
    EXPECT_NEAR(ps.value(0)[1] - prev[1], lr, 1e-9);
}

TEST(Adam, QuadraticBowlConverges)
{
    ParamStore ps;
    ps.add("x", Tensor::scalar(1.0));
    AdamState st;
    for (int i = 0; i < 500; ++i) {
        Tape t;
        Var x = t.param(ps, "x");
        auto g = t.backward(reduce_sum(hadamard(x, x)), ps);
        adam_step(ps, g, st, 1e-2);
    }
    EXPECT_LT(std::fabs(ps.value(0)[0]), 1e-2);
}

TEST(FiniteDiffCheck, LinearFunctionIsExact)
{
    std::mt19937_64 rng(4);
    ParamStore ps;
    ps.add("w", random_tensor({3, 4}, rng));
    const Tensor c = random_tensor({3, 4}, rng);
    auto r = finite_diff_check(
        [&](Tape& t, const ParamStore& p) { return reduce_sum(hadamard(t.param(p, "w"), t.constant(c))); }, ps);
    EXPECT_LT(r.max_rel_error, 1e-9);
    EXPECT_EQ(r.coords_checked, 12u);
}

TEST(FiniteDiffCheck, ReluWithKinkAvoidedPasses)
{
    std::mt19937_64 rng(6);
    ParamStore ps;
    Tensor w = random_tensor({10}, rng);
    for (double& v : w.data) v += (v >= 0 ? 0.1 : -0.1);  // offset away from 0
    ps.add("w", w);
    auto r = finite_diff_check(
        [](Tape& t, const ParamStore& p) {
            Var w = t.param(p, "w");
            return reduce_sum(hadamard(relu(w), w));
        },
        ps);
    EXPECT_LT(r.max_rel_error, 1e-4);
}

// tanh with a deliberately wrong derivative (missing the square).
Var broken_tanh(Var a)
{
    Tensor y = a.value();
    for (double& v : y.data) v = std::tanh(v);
    return a.tape().record("broken_tanh", {a}, std::move(y), [a](const Tensor& g, std::vector<Tensor*>& in) {
        for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i] * (1.0 - std::tanh(a.value()[i]));
    });
}

TEST(FiniteDiffCheck, DetectsCorruptedBackward)
{
    std::mt19937_64 rng(12);
    ParamStore ps;
    ps.add("w", random_tensor({6}, rng, 0.3, 1.5));
    auto r = finite_diff_check([](Tape& t, const ParamStore& p) { return reduce_sum(broken_tanh(t.param(p, "w"))); },
                               ps);
    EXPECT_GT(r.max_rel_error, 1e-2);
}

TEST(FiniteDiffCheck, SubsamplingAndFilter)
{
    std::mt19937_64 rng(2);
    ParamStore ps;
    ps.add("a", random_tensor({20}, rng));
    ps.add("b", random_tensor({20}, rng));
    GradCheckOptions o;
    o.max_coords_per_param = 5;
    o.only = {"b"};
    auto r = finite_diff_check(
        [](Tape& t, const ParamStore& p) { return reduce_sum(tanh(add(t.param(p, "a"), t.param(p, "b")))); }, ps, o);
    EXPECT_EQ(r.coords_checked, 5u);
    EXPECT_LT(r.max_rel_error, 1e-6);
}

} // namespace
} // namespace mfmgcn::tape
