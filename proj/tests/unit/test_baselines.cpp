// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/baselines/baselines.hpp"
#include "mfmgcn/errors.hpp"
#include "fixtures.hpp"
#include "test_random.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <random>

using namespace mfmgcn;
using baselines::KernelKind;
using baselines::RegressionConfig;
using baselines::RegressionKind;
using tape::Tensor;
namespace mt = mfmgcn::testing;

namespace {

struct Problem {
    std::vector<double> x, y;
    std::size_t m, wi, wo;
};

Problem random_problem(std::size_t m, std::size_t wi, std::size_t wo, std::mt19937_64& rng, double noise)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Problem p{std::vector<double>(m * wi), std::vector<double>(m * wo), m, wi, wo};
    Eigen::MatrixXd a(wi, wo);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    for (double& v : p.x) v = g(rng);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t h = 0; h < wo; ++h) {
            double s = 0.5 * static_cast<double>(h) - 2.0;
            for (std::size_t k = 0; k < wi; ++k) s += p.x[r * wi + k] * a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(h));
            p.y[r * wo + h] = s + noise * g(rng);
        }
    return p;
}

baselines::RegressionModel one_station(const baselines::StationRegressor& s, const RegressionConfig& cfg,
                                       std::size_t wi, std::size_t wo, double gamma = 0.0)
{
    baselines::RegressionModel m;
    m.cfg = cfg;
    m.input_len = wi;
    m.horizon = wo;
    m.gamma = gamma;
    m.stations = {s};
    m.fitted = true;
    return m;
}

std::vector<double> row(const Problem& p, std::size_t r)
{
    return {p.x.begin() + static_cast<std::ptrdiff_t>(r * p.wi), p.x.begin() + static_cast<std::ptrdiff_t>((r + 1) * p.wi)};
}

// Ridge with an unpenalized intercept as one augmented least-squares problem,
// solved by Householder QR.
Eigen::MatrixXd ridge_oracle(const Problem& p, double lambda, const std::vector<double>& query)
{
    const auto m = static_cast<Eigen::Index>(p.m), wi = static_cast<Eigen::Index>(p.wi), wo = static_cast<Eigen::Index>(p.wo);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + wi, wi + 1);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m + wi, wo);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index k = 0; k < wi; ++k) a(r, k) = p.x[static_cast<std::size_t>(r * wi + k)];
        a(r, wi) = 1.0;
        for (Eigen::Index h = 0; h < wo; ++h) b(r, h) = p.y[static_cast<std::size_t>(r * wo + h)];
    }
    for (Eigen::Index k = 0; k < wi; ++k) a(m + k, k) = std::sqrt(lambda);
    const Eigen::MatrixXd beta = a.householderQr().solve(b);
    Eigen::RowVectorXd q(wi + 1);
    for (Eigen::Index k = 0; k < wi; ++k) q(k) = query[static_cast<std::size_t>(k)];
    q(wi) = 1.0;
    return q * beta;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

} // namespace

TEST(Persistence, RepeatsLastObservation)
{
    Tensor in({2, 3, 4, 2});
    for (std::size_t i = 0; i < in.size(); ++i) in.data[i] = static_cast<double>(i);
    const Tensor out = baselines::persistence_forecast(in, 5);
    ASSERT_EQ(out.shape, (tape::Shape{2, 3, 5, 2}));
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t h = 0; h < 5; ++h)
            for (std::size_t f = 0; f < 2; ++f) EXPECT_EQ(out.data[(r * 5 + h) * 2 + f], in.data[(r * 4 + 3) * 2 + f]);
}

TEST(Persistence, ConstantSeriesIsExact)
{
    const Tensor in({4, 12, 1}, 3.25);
    const Tensor out = baselines::persistence_forecast(in, 12);
    for (double v : out.data) EXPECT_EQ(v, 3.25);
}

TEST(Persistence, RampEndsAtLastValue)
{
    Tensor in({1, 8, 1});
    for (std::size_t t = 0; t < 8; ++t) in.data[t] = static_cast<double>(t);
    const Tensor out = baselines::persistence_forecast(in, 3);
    EXPECT_EQ(out.data, (std::vector<double>{7.0, 7.0, 7.0}));
    EXPECT_THROW(baselines::persistence_forecast(Tensor({8, 1}), 3), ShapeError);
}

TEST(Persistence, ErrorGrowsWithHorizonOnDriftingSeries)
{
    // Random walk: expected |x_{t+h} - x_t| grows with h.
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 400, wi = 12, wo = 12;
    std::vector<double> walk(n * (wi + wo));
    double mae1 = 0.0, mae12 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double v = 0.0;
        for (std::size_t t = 0; t < wi + wo; ++t) walk[r * (wi + wo) + t] = v += g(rng);
        Tensor in({1, wi, 1});
        std::copy_n(walk.begin() + static_cast<std::ptrdiff_t>(r * (wi + wo)), wi, in.data.begin());
        const Tensor out = baselines::persistence_forecast(in, wo);
        mae1 += std::fabs(out.data[0] - walk[r * (wi + wo) + wi]);
        mae12 += std::fabs(out.data[wo - 1] - walk[r * (wi + wo) + wi + wo - 1]);
    }
    EXPECT_GE(mae12, mae1);
}

TEST(Regression, ParsesKinds)
{
    EXPECT_EQ(baselines::parse_regression_kind("krr"), RegressionKind::kernel_ridge);
    EXPECT_EQ(baselines::parse_regression_kind("linear"), RegressionKind::linear);
    EXPECT_EQ(baselines::to_string(RegressionKind::ridge), "ridge");
    EXPECT_THROW(baselines::parse_regression_kind("lasso"), ConfigError);
}

TEST(Regression, LinearRecoversNoiseFreeMap)
{
    std::mt19937_64 rng(4);
    const Problem p = random_problem(60, 6, 3, rng, 0.0);
    RegressionConfig cfg{RegressionKind::linear, 0.0, {}, KernelKind::rbf};
    const auto s = baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, cfg, 0.0);
    const auto model = one_station(s, cfg, p.wi, p.wo);
    for (std::size_t r = 0; r < p.m; ++r) {
        const auto pred = baselines::predict_station(model, 0, row(p, r));
        for (std::size_t h = 0; h < p.wo; ++h) EXPECT_NEAR(pred[h], p.y[r * p.wo + h], 1e-8);
    }
}

TEST(Regression, RidgeMatchesAugmentedLeastSquares)
{
    std::mt19937_64 rng(5);
    for (double lambda : {1e-3, 0.5, 7.0, 300.0}) {
        const Problem p = random_problem(40, 5, 4, rng, 0.3);
        RegressionConfig cfg{RegressionKind::ridge, lambda, {}, KernelKind::rbf};
        const auto model = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, cfg, 0.0), cfg, p.wi, p.wo);
        for (std::size_t r = 0; r < 5; ++r) {
            const auto q = mt::random_tensor({p.wi}, rng, -2.0, 2.0).data;
            const auto pred = baselines::predict_station(model, 0, q);
            const Eigen::MatrixXd ref = ridge_oracle(p, lambda, q);
            for (std::size_t h = 0; h < p.wo; ++h) EXPECT_NEAR(pred[h], ref(0, static_cast<Eigen::Index>(h)), 1e-9);
        }
    }
}

TEST(Regression, HugeRidgePenaltyPredictsTheMean)
{
    std::mt19937_64 rng(6);
    const Problem p = random_problem(30, 4, 2, rng, 0.5);
    RegressionConfig cfg{RegressionKind::ridge, 1e14, {}, KernelKind::rbf};
    const auto model = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, cfg, 0.0), cfg, p.wi, p.wo);
    std::vector<double> mean(p.wo, 0.0);
    for (std::size_t r = 0; r < p.m; ++r)
        for (std::size_t h = 0; h < p.wo; ++h) mean[h] += p.y[r * p.wo + h] / static_cast<double>(p.m);
    EXPECT_LT(max_diff(baselines::predict_station(model, 0, row(p, 3)), mean), 1e-9);
}

TEST(Regression, RidgeIsContinuousInLambda)
{
    std::mt19937_64 rng(7);
    const Problem p = random_problem(50, 6, 3, rng, 0.2);
    RegressionConfig lin{RegressionKind::linear, 0.0, {}, KernelKind::rbf};
    RegressionConfig rid{RegressionKind::ridge, 1e-9, {}, KernelKind::rbf};
    const auto a = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, lin, 0.0), lin, p.wi, p.wo);
    const auto b = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, rid, 0.0), rid, p.wi, p.wo);
    EXPECT_LT(max_diff(baselines::predict_station(a, 0, row(p, 0)), baselines::predict_station(b, 0, row(p, 0))), 1e-7);
}

TEST(Regression, ConstantInputShiftLeavesPredictionsUnchanged)
{
    std::mt19937_64 rng(8);
    Problem p = random_problem(40, 5, 2, rng, 0.2);
    RegressionConfig cfg{RegressionKind::ridge, 2.0, {}, KernelKind::rbf};
    const auto a = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, cfg, 0.0), cfg, p.wi, p.wo);
    const auto q = row(p, 7);
    const auto before = baselines::predict_station(a, 0, q);
    for (double& v : p.x) v += 11.0;
    const auto b = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, cfg, 0.0), cfg, p.wi, p.wo);
    auto shifted = q;
    for (double& v : shifted) v += 11.0;
    EXPECT_LT(max_diff(before, baselines::predict_station(b, 0, shifted)), 1e-10);
}

TEST(Regression, DuplicateFeaturesAreSingularWithoutPenalty)
{
    std::mt19937_64 rng(9);
    Problem p = random_problem(30, 4, 2, rng, 0.1);
    for (std::size_t r = 0; r < p.m; ++r) p.x[r * p.wi + 3] = p.x[r * p.wi + 1];
    RegressionConfig lin{RegressionKind::linear, 0.0, {}, KernelKind::rbf};
    try {
        baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, lin, 0.0);
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_NE(std::string(e.what()).find("ridge"), std::string::npos);
    }
    RegressionConfig rid{RegressionKind::ridge, 1.0, {}, KernelKind::rbf};
    EXPECT_NO_THROW(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, rid, 0.0));
}

TEST(Regression, DuplicateWindowsMatchWeightedFit)
{
    // Repeating every window twice is ridge with lambda halved.
    std::mt19937_64 rng(10);
    const Problem p = random_problem(25, 4, 2, rng, 0.4);
    Problem twice{p.x, p.y, 2 * p.m, p.wi, p.wo};
    twice.x.insert(twice.x.end(), p.x.begin(), p.x.end());
    twice.y.insert(twice.y.end(), p.y.begin(), p.y.end());
    RegressionConfig c2{RegressionKind::ridge, 3.0, {}, KernelKind::rbf};
    RegressionConfig c1{RegressionKind::ridge, 1.5, {}, KernelKind::rbf};
    const auto a = one_station(baselines::fit_station(twice.x, twice.y, twice.m, p.wi, p.wo, c2, 0.0), c2, p.wi, p.wo);
    const auto b = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, c1, 0.0), c1, p.wi, p.wo);
    EXPECT_LT(max_diff(baselines::predict_station(a, 0, row(p, 2)), baselines::predict_station(b, 0, row(p, 2))), 1e-10);
}

TEST(KernelRidge, TinyPenaltyInterpolates)
{
    std::mt19937_64 rng(11);
    const Problem p = random_problem(20, 3, 2, rng, 0.5);
    RegressionConfig cfg{RegressionKind::kernel_ridge, 1e-10, 0.5, KernelKind::rbf};
    const auto model = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, cfg, 0.5), cfg, p.wi, p.wo, 0.5);
    for (std::size_t r = 0; r < p.m; ++r) {
        const auto pred = baselines::predict_station(model, 0, row(p, r));
        for (std::size_t h = 0; h < p.wo; ++h) EXPECT_NEAR(pred[h], p.y[r * p.wo + h], 1e-4);
    }
}

TEST(KernelRidge, LinearKernelEqualsRidge)
{
    std::mt19937_64 rng(12);
    const Problem p = random_problem(35, 5, 3, rng, 0.3);
    RegressionConfig krr{RegressionKind::kernel_ridge, 2.5, {}, KernelKind::linear};
    RegressionConfig rid{RegressionKind::ridge, 2.5, {}, KernelKind::rbf};
    const auto a = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, krr, 0.0), krr, p.wi, p.wo);
    const auto b = one_station(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, rid, 0.0), rid, p.wi, p.wo);
    for (std::size_t r = 0; r < 5; ++r) {
        const auto q = mt::random_tensor({p.wi}, rng, -2.0, 2.0).data;
        EXPECT_LT(max_diff(baselines::predict_station(a, 0, q), baselines::predict_station(b, 0, q)), 1e-8);
    }
}

TEST(KernelRidge, NonPositiveSystemIsRejected)
{
    std::mt19937_64 rng(13);
    Problem p = random_problem(10, 3, 1, rng, 0.1);
    p.x = std::vector<double>(p.x.size(), 1.0);  // all kernel rows identical
    RegressionConfig cfg{RegressionKind::kernel_ridge, 0.0, 1.0, KernelKind::rbf};
    EXPECT_THROW(baselines::fit_station(p.x, p.y, p.m, p.wi, p.wo, cfg, 1.0), SingularMatrixError);
}

TEST(RegressionModel, FitsPerStationWindowsOfTheFirstFactor)
{
    std::mt19937_64 rng(14);
    const auto ds = mt::random_dataset(3, 80, {"t", "rh"}, rng);
    const data::WindowSpec ws{6, 4, 1};
    RegressionConfig cfg{RegressionKind::ridge, 0.7, {}, KernelKind::rbf};
    const auto model = baselines::fit_regression(ds, ws, cfg);
    ASSERT_EQ(model.stations.size(), 3u);

    // Same windows assembled by hand for station 2.
    const auto origins = data::window_origins(ds.steps, ws);
    Problem p{{}, {}, origins.size(), 6, 4};
    for (std::size_t t : origins) {
        for (std::size_t k = 0; k < 6; ++k) p.x.push_back(ds.value(2, t - 5 + k, 0));
        for (std::size_t h = 0; h < 4; ++h) p.y.push_back(ds.value(2, t + 1 + h, 0));
    }
    const auto batch = data::make_batch(ds, std::vector<std::size_t>{origins[5]}, ws);
    const Tensor pred = baselines::predict_regression(model, batch.inputs);
    ASSERT_EQ(pred.shape, (tape::Shape{1, 3, 4, 1}));
    const Eigen::MatrixXd ref = ridge_oracle(p, 0.7, row(p, 5));
    for (std::size_t h = 0; h < 4; ++h) EXPECT_NEAR(pred.data[2 * 4 + h], ref(0, static_cast<Eigen::Index>(h)), 1e-9);
}

TEST(RegressionModel, DefaultKernelWidthFromTrainingVariance)
{
    std::mt19937_64 rng(15);
    const auto ds = mt::random_dataset(2, 60, {"t"}, rng);
    double mean = 0.0, sq = 0.0;
    for (double v : ds.values) mean += v / static_cast<double>(ds.values.size());
    for (double v : ds.values) sq += (v - mean) * (v - mean) / static_cast<double>(ds.values.size());
    RegressionConfig cfg{RegressionKind::kernel_ridge, 1.0, {}, KernelKind::rbf};
    const auto model = baselines::fit_regression(ds, {6, 3, 1}, cfg);
    EXPECT_NEAR(model.gamma, 1.0 / (6.0 * sq), 1e-12);
}

TEST(RegressionModel, UnfittedModelRefusesToPredict)
{
    baselines::RegressionModel m;
    EXPECT_THROW(baselines::predict_regression(m, Tensor({1, 1, 1, 1})), NotFittedError);
    EXPECT_THROW(baselines::predict_station(m, 0, {1.0}), NotFittedError);
}
