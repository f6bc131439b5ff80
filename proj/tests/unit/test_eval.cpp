// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/data/stats.hpp"
#include "mfmgcn/data/synthetic.hpp"
#include "mfmgcn/errors.hpp"
#include "mfmgcn/eval/ablation.hpp"
#include "mfmgcn/eval/forecast.hpp"
#include "fixtures.hpp"
#include "temp_dir.hpp"
#include "test_random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

using namespace mfmgcn;
using eval::MetricSpace;
using tape::Tensor;
namespace mt = mfmgcn::testing;

namespace {

struct LoopMetrics {
    double mae = 0.0, mse = 0.0;
    std::vector<double> step_mae;
};

LoopMetrics loop_oracle(const Tensor& p, const Tensor& y, std::size_t factor)
{
    const std::size_t B = p.shape[0], N = p.shape[1], W = p.shape[2], D = p.shape[3];
    LoopMetrics m;
    m.step_mae.assign(W, 0.0);
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t w = 0; w < W; ++w) {
                const std::size_t i = ((b * N + n) * W + w) * D + factor;
                const double e = p.data[i] - y.data[i];
                m.mae += std::fabs(e);
                m.mse += e * e;
                m.step_mae[w] += std::fabs(e) / static_cast<double>(B * N);
            }
    m.mae /= static_cast<double>(B * N * W);
    m.mse /= static_cast<double>(B * N * W);
    return m;
}

model::ForecastData tiny_data(std::size_t n = 5, std::size_t steps = 240)
{
    data::SyntheticConfig sc;
    sc.n = n;
    sc.t = steps;
    sc.seed = 21;
    return model::prepare_forecast_data(data::generate_synthetic(sc), "t", {}, data::RatioSplit{}, {6, 3, 1});
}

graphs::StaticGraphs tiny_statics(const model::ForecastData& fd)
{
    graphs::StaticGraphConfig gc;
    gc.neighbor.n_adjacent = 2;
    return graphs::build_static_graphs(fd.splits.train, gc);
}

model::ModelConfig tiny_model(std::size_t n)
{
    model::ModelConfig c;
    c.n_nodes = n;
    c.input_len = 6;
    c.horizon = 3;
    c.blocks = {{2, {3}, 1, 4}};
    c.embed_dim = 3;
    return c;
}

} // namespace

TEST(Metrics, PerfectForecastIsZero)
{
    std::mt19937_64 rng(1);
    const Tensor y = mt::random_tensor({2, 3, 4, 2}, rng);
    const auto r = eval::compute_metrics(y, y, {"t", "rh"});
    EXPECT_EQ(r.mae, 0.0);
    EXPECT_EQ(r.rmse, 0.0);
    for (const auto& f : r.factors) EXPECT_EQ(f.horizon_mae, std::vector<double>(4, 0.0));
}

TEST(Metrics, UnitOffsetGivesUnitErrors)
{
    std::mt19937_64 rng(2);
    const Tensor y = mt::random_tensor({2, 3, 4, 1}, rng);
    Tensor p = y;
    for (double& v : p.data) v += 1.0;
    const auto r = eval::compute_metrics(p, y);
    EXPECT_NEAR(r.mae, 1.0, 1e-12);
    EXPECT_NEAR(r.mse, 1.0, 1e-12);
    EXPECT_NEAR(r.rmse, 1.0, 1e-12);
    EXPECT_EQ(r.factors[0].factor, "f0");
}

TEST(Metrics, MatchesLoopOracle)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Tensor p = mt::random_tensor({2, 3, 4, 2}, rng), y = mt::random_tensor({2, 3, 4, 2}, rng);
        const auto r = eval::compute_metrics(p, y);
        for (std::size_t f = 0; f < 2; ++f) {
            const auto o = loop_oracle(p, y, f);
            EXPECT_NEAR(r.factors[f].mae, o.mae, 1e-12);
            EXPECT_NEAR(r.factors[f].mse, o.mse, 1e-12);
            for (std::size_t w = 0; w < 4; ++w) EXPECT_NEAR(r.factors[f].horizon_mae[w], o.step_mae[w], 1e-12);
        }
    }
}

TEST(Metrics, PowerMeanIdentities)
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const Tensor p = mt::random_tensor({3, 4, 5, 2}, rng, -5, 5), y = mt::random_tensor({3, 4, 5, 2}, rng, -5, 5);
        const auto r = eval::compute_metrics(p, y);
        EXPECT_NEAR(r.rmse * r.rmse, r.mse, 1e-12);
        EXPECT_LE(r.mae, r.rmse);
        for (const auto& f : r.factors) {
            EXPECT_NEAR(f.rmse * f.rmse, f.mse, 1e-12);
            EXPECT_LE(f.mae, f.rmse);
            for (std::size_t w = 0; w < 5; ++w) EXPECT_LE(f.horizon_mae[w], f.horizon_rmse[w] + 1e-15);
        }
    }
}

TEST(Metrics, InvariantUnderJointNodePermutation)
{
    std::mt19937_64 rng(5);
    const Tensor p = mt::random_tensor({2, 4, 3, 1}, rng), y = mt::random_tensor({2, 4, 3, 1}, rng);
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    Tensor pp(p.shape), yp(y.shape);
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t w = 0; w < 3; ++w) {
                pp.data[(b * 4 + i) * 3 + w] = p.data[(b * 4 + perm[i]) * 3 + w];
                yp.data[(b * 4 + i) * 3 + w] = y.data[(b * 4 + perm[i]) * 3 + w];
            }
    const auto a = eval::compute_metrics(p, y), b = eval::compute_metrics(pp, yp);
    EXPECT_NEAR(a.mae, b.mae, 1e-14);
    EXPECT_NEAR(a.rmse, b.rmse, 1e-14);
}

TEST(Metrics, HorizonArraysAverageBackToScalars)
{
    std::mt19937_64 rng(6);
    const Tensor p = mt::random_tensor({5, 3, 12, 1}, rng), y = mt::random_tensor({5, 3, 12, 1}, rng);
    const auto r = eval::compute_metrics(p, y);
    double mae = 0.0, mse = 0.0;
    for (std::size_t w = 0; w < 12; ++w) {
        mae += r.factors[0].horizon_mae[w] / 12.0;
        mse += r.factors[0].horizon_rmse[w] * r.factors[0].horizon_rmse[w] / 12.0;
    }
    EXPECT_NEAR(mae, r.mae, 1e-12);
    EXPECT_NEAR(mse, r.mse, 1e-12);
}

TEST(Metrics, ShapeMismatchNamesBothShapes)
{
    try {
        eval::compute_metrics(Tensor({1, 2, 3, 1}), Tensor({1, 2, 4, 1}));
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("[1 x 2 x 3 x 1]"), std::string::npos) << msg;
        EXPECT_NE(msg.find("[1 x 2 x 4 x 1]"), std::string::npos) << msg;
    }
}

TEST(Metrics, PhysicalSpaceScalesByFactorSpread)
{
    std::mt19937_64 rng(7);
    const Tensor p = mt::random_tensor({4, 3, 5, 1}, rng), y = mt::random_tensor({4, 3, 5, 1}, rng);
    const data::NormStats stats{{"rh"}, {55.0}, {12.5}};
    const auto n = eval::compute_metrics(p, y, {"rh"});
    const auto ph = eval::compute_metrics(eval::denormalize_forecast(p, stats, {"rh"}),
                                          eval::denormalize_forecast(y, stats, {"rh"}), {"rh"}, MetricSpace::physical);
    EXPECT_NEAR(ph.mae, 12.5 * n.mae, 1e-12);
    EXPECT_NEAR(ph.rmse, 12.5 * n.rmse, 1e-12);
    EXPECT_EQ(eval::to_json(ph).at("space"), "physical");
    EXPECT_THROW(eval::denormalize_forecast(p, stats, {"t"}), SchemaError);
}

TEST(Metrics, JsonIsStable)
{
    std::mt19937_64 rng(8);
    const Tensor p = mt::random_tensor({2, 2, 3, 1}, rng), y = mt::random_tensor({2, 2, 3, 1}, rng);
    const auto a = eval::to_json(eval::compute_metrics(p, y, {"t"})).dump();
    const auto b = eval::to_json(eval::compute_metrics(p, y, {"t"})).dump();
    EXPECT_EQ(a, b);
    EXPECT_LT(a.find("\"counts\""), a.find("\"factors\""));
}

TEST(HorizonCurve, PersistenceOnRampGrowsLinearly)
{
    const double slope = 0.25;
    data::WeatherSeriesDataset ds;
    ds.factors = {"t"};
    ds.steps = 60;
    ds.stations = {{"a", 30, 110, 0}, {"b", 31, 111, 0}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t t = 0; t < 60; ++t) ds.values.push_back(static_cast<double>(i) + slope * static_cast<double>(t));
    ds.mask.assign(ds.values.size(), 1);
    const auto f = eval::forecast_persistence(ds, {12, 12, 1});
    const auto curve = eval::horizon_curve(eval::compute_metrics(f.pred, f.truth, {"t"}), "persistence");
    ASSERT_EQ(curve.mae.size(), 12u);
    for (std::size_t h = 0; h < 12; ++h) EXPECT_NEAR(curve.mae[h], slope * static_cast<double>(h + 1), 1e-12);
}

TEST(HorizonCurve, PersistenceOnWhiteNoiseIsFlat)
{
    std::mt19937_64 rng(9);
    const auto ds = mt::random_dataset(4, 3000, {"t"}, rng);
    const auto f = eval::forecast_persistence(ds, {12, 12, 1});
    const auto curve = eval::horizon_curve(eval::compute_metrics(f.pred, f.truth), "persistence");
    const auto [lo, hi] = std::minmax_element(curve.mae.begin(), curve.mae.end());
    EXPECT_LT(*hi / *lo, 1.05);
}

TEST(HorizonCurve, CsvHasOneRowPerStep)
{
    const eval::HorizonCurve c{"ridge", "t", {0.5, 0.75}, {0.6, 0.8}};
    EXPECT_EQ(eval::to_csv({c}), "label,factor,step,mae,rmse\nridge,t,1,0.5,0.59999999999999998\nridge,t,2,0.75,0.80000000000000004\n");
    EXPECT_EQ(eval::to_json(std::vector<eval::HorizonCurve>{c})[0].at("label"), "ridge");
}

TEST(ExternalScoring, TruthScoresZeroAndOffsetScoresOne)
{
    mt::TempDir dir;
    std::mt19937_64 rng(10);
    const auto ds = mt::random_dataset(3, 50, {"t", "rh"}, rng);
    const data::WindowSpec ws{4, 5, 1};
    const auto origins = data::window_origins(ds.steps, ws);
    const auto batch = data::make_batch(ds, origins, ws);
    eval::PredictionFile p;
    p.factors = ds.factors;
    for (const auto& s : ds.stations) p.station_ids.push_back(s.station_id);
    p.space = MetricSpace::physical;
    p.origin_times = batch.origin_times;
    p.values = batch.targets;
    eval::write_predictions(p, dir / "truth.w2kp");
    const auto back = eval::read_predictions(dir / "truth.w2kp");
    EXPECT_EQ(back.values.data, p.values.data);
    EXPECT_EQ(back.origin_times, p.origin_times);
    const auto zero = eval::score_external(back, ds);
    EXPECT_EQ(zero.mae, 0.0);
    EXPECT_EQ(zero.space, MetricSpace::physical);

    for (double& v : p.values.data) v += 1.0;
    EXPECT_NEAR(eval::score_external(p, ds).mae, 1.0, 1e-12);
}

TEST(ExternalScoring, MismatchesAreExplicit)
{
    std::mt19937_64 rng(11);
    const auto ds = mt::random_dataset(3, 50, {"t"}, rng);
    eval::PredictionFile p;
    p.factors = {"t"};
    p.station_ids = {"st0", "st1"};
    p.space = MetricSpace::physical;
    p.origin_times = {ds.time_start + 3600 * 10};
    p.values = Tensor({1, 2, 5, 1});
    EXPECT_THROW(eval::score_external(p, ds), ShapeError);

    p.station_ids = {"st0", "st1", "st2"};
    p.values = Tensor({1, 3, 5, 1});
    EXPECT_NO_THROW(eval::score_external(p, ds));
    p.origin_times = {ds.time_start + 3600 * 46};  // horizon runs past the end
    EXPECT_THROW(eval::score_external(p, ds), ShapeError);
    p.origin_times = {ds.time_start + 1800};
    EXPECT_THROW(eval::score_external(p, ds), ShapeError);
    p.origin_times = {ds.time_start};
    p.space = MetricSpace::normalized;
    EXPECT_THROW(eval::score_external(p, ds), ConfigError);
}

TEST(ExternalScoring, CorruptFilesAreRejected)
{
    mt::TempDir dir;
    {
        std::ofstream out(dir / "bad.w2kp", std::ios::binary);
        out << "NOPE1234";
    }
    EXPECT_THROW(eval::read_predictions(dir / "bad.w2kp"), FormatError);
    EXPECT_THROW(eval::read_predictions(dir / "missing.w2kp"), IoError);
}

TEST(Ablation, TableSpecsFollowTheRowPattern)
{
    const auto specs = eval::table4_specs({1, 2});
    ASSERT_EQ(specs.size(), 13u);
    const std::vector<std::string> names{"D", "N", "P", "L", "K", "DN", "DNP", "NPLK", "DPLK", "DNLK", "DNPK", "DNPL", "DNPLK"};
    for (std::size_t i = 0; i < 13; ++i) {
        EXPECT_EQ(specs[i].name, names[i]);
        EXPECT_EQ(specs[i].seeds, (std::vector<std::uint64_t>{1, 2}));
    }
    EXPECT_EQ(eval::single_graph_specs({3}).back().name, "DNPLK");
}

TEST(Ablation, SingleSpecEqualsPlainTrainingRun)
{
    const auto fd = tiny_data();
    const auto statics = tiny_statics(fd);
    model::TrainConfig tc;
    tc.epochs = 2;
    const auto base = tiny_model(5);
    const eval::AblationSpec spec{"DL", {"D", "L"}, {5}};
    const auto table = eval::run_ablation({spec}, fd, statics, base, tc);

    auto mc = base;
    mc.graphs = {"D", "L"};
    mc.seed = 5;
    tc.seed = 5;
    const auto res = model::train(model::build_model(mc), fd, statics, tc);
    const auto f = eval::forecast_model(res.best, fd.splits.test, fd.windows, statics);
    const auto direct = eval::compute_metrics(f.pred, f.truth, {"t"});
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_EQ(eval::to_json(table.rows[0].runs[0].normalized).dump(), eval::to_json(direct).dump());
    EXPECT_EQ(table.rows[0].mean_mae, direct.mae);
}

TEST(Ablation, DistinctSpecsGiveDistinctReports)
{
    const auto fd = tiny_data();
    const auto statics = tiny_statics(fd);
    model::TrainConfig tc;
    tc.epochs = 1;
    std::size_t calls = 0;
    const auto table = eval::run_ablation({{"D", {"D"}, {1}}, {"DN", {"D", "N"}, {1}}}, fd, statics, tiny_model(5), tc,
                                          [&](const eval::AblationSpec&, const eval::AblationRun&) { ++calls; });
    EXPECT_EQ(calls, 2u);
    ASSERT_NE(table.find("DN"), nullptr);
    EXPECT_NE(table.find("D")->mean_mae, table.find("DN")->mean_mae);
    const auto j = eval::to_json(table);
    EXPECT_EQ(j.at("rows")[1].at("graphs").at("N"), true);
    EXPECT_EQ(j.at("rows")[0].at("graphs").at("N"), false);
    EXPECT_THROW(eval::run_ablation({{"X", {"X"}, {1}}}, fd, statics, tiny_model(5), tc), ConfigError);
}

TEST(Ablation, NeighborSweepRebuildsTheGraph)
{
    const auto fd = tiny_data(6);
    model::TrainConfig tc;
    tc.epochs = 1;
    graphs::StaticGraphConfig gc;
    const auto sweep = eval::neighbor_sweep({1, 3}, fd, gc, tiny_model(6), tc, {2});
    ASSERT_EQ(sweep.size(), 2u);
    EXPECT_NE(sweep[0].row.mean_mae, sweep[1].row.mean_mae);
    const auto j = eval::to_json(sweep);
    EXPECT_EQ(j.at("n_adjacent"), (nlohmann::json{1, 3}));
    EXPECT_EQ(j.at("mae").size(), 2u);
}

namespace {

struct TableRow {
    std::string name;
    std::string mae, rmse;
};

// Rows of the ablation table in the source document: checkmark columns give the
// fusion set, the next two cells the temperature MAE and RMSE.
std::vector<TableRow> read_source_ablation_rows()
{
    std::ifstream in(MFMGCN_SOURCE_DOC);
    std::vector<TableRow> rows;
    std::string line;
    bool inside = false;
    const std::string letters = "DNPLK";
    const std::regex number(R"((\d+\.\d+))");
    while (std::getline(in, line)) {
        if (line.find("label{table4}") != std::string::npos) inside = true;
        if (!inside) continue;
        if (line.find("end{tabular}") != std::string::npos) break;
        if (line.find("CheckmarkBold") == std::string::npos) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, '&')) cells.push_back(cell);
        if (cells.size() < 7) continue;
        TableRow r;
        for (std::size_t k = 0; k < 5; ++k)
            if (cells[k].find("CheckmarkBold") != std::string::npos) r.name += letters[k];
        std::smatch m;
        if (std::regex_search(cells[5], m, number)) r.mae = m[1];
        if (std::regex_search(cells[6], m, number)) r.rmse = m[1];
        rows.push_back(r);
    }
    return rows;
}

std::string fixed4(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

TEST(Ablation, PublishedTemperatureRowsMatchTheSourceTable)
{
    const auto source = read_source_ablation_rows();
    const auto& ours = mfmgcn::eval::published_temperature_rows();
    ASSERT_EQ(source.size(), 13u);
    ASSERT_EQ(ours.size(), source.size());
    const auto specs = mfmgcn::eval::table4_specs({7});
    for (std::size_t i = 0; i < source.size(); ++i) {
        EXPECT_EQ(ours[i].name, source[i].name);
        EXPECT_EQ(specs[i].name, source[i].name);
        EXPECT_EQ(fixed4(ours[i].mae), source[i].mae) << source[i].name;
        EXPECT_EQ(fixed4(ours[i].rmse), source[i].rmse) << source[i].name;
    }
}
