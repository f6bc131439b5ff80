// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/eval/metrics.hpp"

#include "mfmgcn/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mfmgcn::eval {

using tape::Tensor;

std::string_view to_string(MetricSpace space)
{
    return space == MetricSpace::normalized ? "normalized" : "physical";
}

MetricSpace parse_metric_space(std::string_view name)
{
    if (name == "normalized") return MetricSpace::normalized;
    if (name == "physical") return MetricSpace::physical;
    throw ConfigError("unknown metric space '" + std::string(name) + "' (expected normalized or physical)");
}

MetricsReport compute_metrics(const Tensor& pred, const Tensor& truth, std::vector<std::string> names, MetricSpace space)
{
    if (pred.shape != truth.shape || pred.rank() != 4) {
        throw ShapeError("compute_metrics: prediction " + tape::shape_str(pred.shape) + " vs truth " +
                         tape::shape_str(truth.shape) + " (both must be [B x N x W x D])");
    }
    const std::size_t B = pred.shape[0], N = pred.shape[1], W = pred.shape[2], D = pred.shape[3];
    if (names.empty())
        for (std::size_t f = 0; f < D; ++f) names.push_back("f" + std::to_string(f));
    if (names.size() != D) throw ShapeError("compute_metrics: " + std::to_string(names.size()) + " factor names for D = " + std::to_string(D));

    MetricsReport r;
    r.batch = B;
    r.nodes = N;
    r.horizon = W;
    r.features = D;
    r.space = space;
    std::vector<double> abs_sum(W * D, 0.0), sq_sum(W * D, 0.0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred.data[i] - truth.data[i];
        const std::size_t slot = i % (W * D);
        abs_sum[slot] += std::fabs(e);
        sq_sum[slot] += e * e;
    }
    const double per_step = static_cast<double>(B * N);
    double all_abs = 0.0, all_sq = 0.0;
    for (std::size_t f = 0; f < D; ++f) {
        FactorMetrics fm;
        fm.factor = names[f];
        double fa = 0.0, fs = 0.0;
        for (std::size_t h = 0; h < W; ++h) {
            const double a = abs_sum[h * D + f], s = sq_sum[h * D + f];
            fm.horizon_mae.push_back(per_step > 0 ? a / per_step : 0.0);
            fm.horizon_rmse.push_back(per_step > 0 ? std::sqrt(s / per_step) : 0.0);
            fa += a;
            fs += s;
        }
        const double cells = per_step * static_cast<double>(W);
        fm.mae = cells > 0 ? fa / cells : 0.0;
        fm.mse = cells > 0 ? fs / cells : 0.0;
        fm.rmse = std::sqrt(fm.mse);
        all_abs += fa;
        all_sq += fs;
        r.factors.push_back(std::move(fm));
    }
    const double total = static_cast<double>(pred.size());
    r.mae = total > 0 ? all_abs / total : 0.0;
    r.mse = total > 0 ? all_sq / total : 0.0;
    r.rmse = std::sqrt(r.mse);
    return r;
}

Tensor denormalize_forecast(const Tensor& x, const data::NormStats& stats, const std::vector<std::string>& factors)
{
    const std::size_t D = x.shape.empty() ? 0 : x.shape.back();
    if (factors.size() != D) throw ShapeError("denormalize_forecast: " + std::to_string(factors.size()) + " factor names for last axis " + std::to_string(D));
    std::vector<double> mean(D), sd(D);
    for (std::size_t f = 0; f < D; ++f) {
        std::size_t k = 0;
        while (k < stats.factors.size() && stats.factors[k] != factors[f]) ++k;
        if (k == stats.factors.size()) throw SchemaError("no normalization statistics for factor '" + factors[f] + "'");
        mean[f] = stats.mean[k];
        sd[f] = stats.std[k];
    }
    Tensor out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = out.data[i] * sd[i % D] + mean[i % D];
    return out;
}

nlohmann::json to_json(const MetricsReport& r)
{
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : r.factors) {
        factors.push_back({{"factor", f.factor},
                           {"mae", f.mae},
                           {"mse", f.mse},
                           {"rmse", f.rmse},
                           {"horizon_mae", f.horizon_mae},
                           {"horizon_rmse", f.horizon_rmse}});
    }
    return {{"counts", {{"batch", r.batch}, {"nodes", r.nodes}, {"horizon", r.horizon}, {"features", r.features}}},
            {"space", to_string(r.space)},
            {"mae", r.mae},
            {"mse", r.mse},
            {"rmse", r.rmse},
            {"factors", factors}};
}

HorizonCurve horizon_curve(const MetricsReport& r, std::string label, std::size_t factor)
{
    if (factor >= r.factors.size()) throw ConfigError("horizon_curve: factor index out of range");
    const auto& f = r.factors[factor];
    return {std::move(label), f.factor, f.horizon_mae, f.horizon_rmse};
}

nlohmann::json to_json(const std::vector<HorizonCurve>& curves)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : curves) out.push_back({{"label", c.label}, {"factor", c.factor}, {"mae", c.mae}, {"rmse", c.rmse}});
    return out;
}

std::string to_csv(const std::vector<HorizonCurve>& curves)
{
    std::ostringstream out;
    out << "label,factor,step,mae,rmse\n";
    char buf[64];
    for (const auto& c : curves) {
        for (std::size_t h = 0; h < c.mae.size(); ++h) {
            out << c.label << ',' << c.factor << ',' << h + 1;
            std::snprintf(buf, sizeof buf, ",%.17g", c.mae[h]);
            out << buf;
            std::snprintf(buf, sizeof buf, ",%.17g", c.rmse[h]);
            out << buf << '\n';
        }
    }
    return out.str();
}

} // namespace mfmgcn::eval
