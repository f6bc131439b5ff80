// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/baselines/baselines.hpp"

#include "mfmgcn/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace mfmgcn::baselines {

using tape::Tensor;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Tensor persistence_forecast(const Tensor& in, std::size_t horizon)
{
    if (in.rank() != 3 && in.rank() != 4) {
        throw ShapeError("persistence_forecast: expected [N x W' x D] or [B x N x W' x D], got " + tape::shape_str(in.shape));
    }
    const std::size_t d = in.shape.back(), wi = in.shape[in.rank() - 2];
    if (wi == 0) throw ShapeError("persistence_forecast: empty input window");
    const std::size_t rows = in.size() / (wi * d);
    tape::Shape out_shape = in.shape;
    out_shape[in.rank() - 2] = horizon;
    Tensor out(out_shape);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t h = 0; h < horizon; ++h)
            for (std::size_t f = 0; f < d; ++f) out.data[(r * horizon + h) * d + f] = in.data[(r * wi + wi - 1) * d + f];
    return out;
}

RegressionKind parse_regression_kind(std::string_view name)
{
    if (name == "linear") return RegressionKind::linear;
    if (name == "ridge") return RegressionKind::ridge;
    if (name == "krr" || name == "kernel_ridge") return RegressionKind::kernel_ridge;
    throw ConfigError("unknown regression kind '" + std::string(name) + "'");
}

std::string_view to_string(RegressionKind kind)
{
    switch (kind) {
    case RegressionKind::linear: return "linear";
    case RegressionKind::ridge: return "ridge";
    case RegressionKind::kernel_ridge: return "kernel_ridge";
    }
    return "ridge";
}

namespace {

double kernel_value(const double* a, const double* b, std::size_t w, KernelKind kind, double gamma)
{
    double s = 0.0;
    if (kind == KernelKind::linear) {
        for (std::size_t k = 0; k < w; ++k) s += a[k] * b[k];
        return s;
    }
    for (std::size_t k = 0; k < w; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::exp(-gamma * s);
}

} // namespace

StationRegressor fit_station(const std::vector<double>& x, const std::vector<double>& y, std::size_t m,
                             std::size_t wi, std::size_t wo, const RegressionConfig& cfg, double gamma)
{
    if (m == 0) throw EmptyDatasetError("regression needs at least one training window");
    if (x.size() != m * wi || y.size() != m * wo) throw ShapeError("fit_station: feature or target size mismatch");
    const double lambda = cfg.kind == RegressionKind::linear ? 0.0 : cfg.lambda;
    if (!(lambda >= 0.0)) throw ConfigError("regularization strength must be non-negative");

    StationRegressor s;
    s.samples = m;
    RowMatrix xm = Eigen::Map<const RowMatrix>(x.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(wi));
    RowMatrix ym = Eigen::Map<const RowMatrix>(y.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(wo));
    const Eigen::RowVectorXd xbar = xm.colwise().mean(), ybar = ym.colwise().mean();
    xm.rowwise() -= xbar;
    ym.rowwise() -= ybar;
    s.x_mean.assign(xbar.data(), xbar.data() + wi);
    s.y_mean.assign(ybar.data(), ybar.data() + wo);

    if (cfg.kind != RegressionKind::kernel_ridge) {
        Eigen::MatrixXd gram = xm.transpose() * xm;
        if (lambda == 0.0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
            const double top = eig.eigenvalues().maxCoeff();
            if (!(eig.eigenvalues().minCoeff() > 1e-12 * std::max(top, 1.0))) {
                throw SingularMatrixError("normal equations are singular for the unregularized linear fit; use ridge with lambda > 0");
            }
        }
        gram.diagonal().array() += lambda;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        if (ldlt.info() != Eigen::Success) throw SingularMatrixError("normal-equation solve failed");
        const RowMatrix beta = ldlt.solve(xm.transpose() * ym);
        s.coef.assign(beta.data(), beta.data() + wi * wo);
        return s;
    }

    Eigen::MatrixXd k(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            k(i, j) = k(j, i) = kernel_value(xm.row(i).data(), xm.row(j).data(), wi, cfg.kernel, gamma);
    k.diagonal().array() += lambda;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
    const Eigen::VectorXd pivots = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !(pivots.minCoeff() > 1e-12 * std::max(pivots.maxCoeff(), 1.0))) {
        throw SingularMatrixError("kernel system is not positive definite; increase lambda");
    }
    const RowMatrix dual = ldlt.solve(Eigen::MatrixXd(ym));
    s.dual.assign(dual.data(), dual.data() + m * wo);
    s.train_x.assign(xm.data(), xm.data() + m * wi);
    return s;
}

RegressionModel fit_regression(const data::WeatherSeriesDataset& train, const data::WindowSpec& windows,
                               const RegressionConfig& cfg)
{
    const auto origins = data::window_origins(train.steps, windows);
    if (origins.empty()) throw EmptyDatasetError("training split is too short for one regression window");
    const std::size_t wi = windows.input_len, wo = windows.horizon, m = origins.size();
    RegressionModel model;
    model.cfg = cfg;
    model.input_len = wi;
    model.horizon = wo;

    if (cfg.kind == RegressionKind::kernel_ridge && cfg.kernel == KernelKind::rbf) {
        if (cfg.gamma) {
            model.gamma = *cfg.gamma;
        } else {
            double sum = 0.0, sq = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < train.n(); ++i)
                for (std::size_t t = 0; t < train.steps; ++t) {
                    const double v = train.value(i, t, 0);
                    sum += v;
                    sq += v * v;
                    ++count;
                }
            const double mean = sum / static_cast<double>(count);
            const double var = sq / static_cast<double>(count) - mean * mean;
            if (!(var > 0.0)) throw NumericError("training inputs have zero variance; cannot set the kernel width");
            model.gamma = 1.0 / (static_cast<double>(wi) * var);
        }
        if (!(model.gamma > 0.0)) throw ConfigError("kernel width gamma must be positive");
    }

    std::vector<double> x(m * wi), y(m * wo);
    for (std::size_t i = 0; i < train.n(); ++i) {
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t t = origins[r];
            for (std::size_t k = 0; k < wi; ++k) x[r * wi + k] = train.value(i, t + 1 - wi + k, 0);
            for (std::size_t h = 0; h < wo; ++h) y[r * wo + h] = train.value(i, t + 1 + h, 0);
        }
        model.stations.push_back(fit_station(x, y, m, wi, wo, cfg, model.gamma));
    }
    model.fitted = true;
    return model;
}

std::vector<double> predict_station(const RegressionModel& model, std::size_t station, const std::vector<double>& x)
{
    if (!model.fitted) throw NotFittedError("regression model has not been fitted");
    if (station >= model.stations.size()) throw ShapeError("station index out of range for the regression model");
    const std::size_t wi = model.input_len, wo = model.horizon;
    if (x.size() != wi) throw ShapeError("predict_station: expected " + std::to_string(wi) + " inputs");
    const StationRegressor& s = model.stations[station];
    std::vector<double> xc(wi);
    for (std::size_t k = 0; k < wi; ++k) xc[k] = x[k] - s.x_mean[k];
    std::vector<double> out = s.y_mean;
    if (model.cfg.kind != RegressionKind::kernel_ridge) {
        for (std::size_t k = 0; k < wi; ++k)
            for (std::size_t h = 0; h < wo; ++h) out[h] += xc[k] * s.coef[k * wo + h];
        return out;
    }
    for (std::size_t r = 0; r < s.samples; ++r) {
        const double kv = kernel_value(xc.data(), &s.train_x[r * wi], wi, model.cfg.kernel, model.gamma);
        for (std::size_t h = 0; h < wo; ++h) out[h] += kv * s.dual[r * wo + h];
    }
    return out;
}

Tensor predict_regression(const RegressionModel& model, const Tensor& in)
{
    if (!model.fitted) throw NotFittedError("regression model has not been fitted");
    if (in.rank() != 4 || in.shape[1] != model.stations.size() || in.shape[2] != model.input_len) {
        throw ShapeError("predict_regression: inputs " + tape::shape_str(in.shape) + " do not match " +
                         std::to_string(model.stations.size()) + " stations and input length " +
                         std::to_string(model.input_len));
    }
    const std::size_t B = in.shape[0], N = in.shape[1], wi = in.shape[2], d = in.shape[3], wo = model.horizon;
    Tensor out({B, N, wo, 1});
    std::vector<double> x(wi);
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < wi; ++k) x[k] = in.data[((b * N + i) * wi + k) * d];
            const auto y = predict_station(model, i, x);
            std::copy(y.begin(), y.end(), out.data.begin() + static_cast<std::ptrdiff_t>((b * N + i) * wo));
        }
    return out;
}

} // namespace mfmgcn::baselines
