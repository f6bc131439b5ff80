// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/model/train.hpp"

#include "mfmgcn/data/stats.hpp"
#include "mfmgcn/errors.hpp"
#include "mfmgcn/tape/adam.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace mfmgcn::model {

ForecastData prepare_forecast_data(const data::WeatherSeriesDataset& ds, const std::string& target,
                                   const std::vector<std::string>& extra_inputs, const data::SplitScheme& scheme,
                                   const data::WindowSpec& windows)
{
    if (!ds.fully_observed()) throw ConfigError("dataset still has unobserved cells; run the preprocessing pipeline first");
    ForecastData fd;
    fd.target = target;
    fd.inputs = {target};
    for (const auto& f : extra_inputs)
        if (std::find(fd.inputs.begin(), fd.inputs.end(), f) == fd.inputs.end()) fd.inputs.push_back(f);
    fd.windows = windows;
    const auto selected = data::select_factors(ds, fd.inputs);
    const auto raw = data::split_temporal(selected, scheme);
    fd.stats = data::fit_norm_stats(raw.train);
    fd.splits.bounds = raw.bounds;
    fd.splits.train = data::apply_normalization(raw.train, fd.stats);
    fd.splits.val = data::apply_normalization(raw.val, fd.stats);
    fd.splits.test = data::apply_normalization(raw.test, fd.stats);
    return fd;
}

std::string history_jsonl(const TrainHistory& h, bool include_wall_time)
{
    std::ostringstream out;
    for (const auto& e : h.epochs) {
        nlohmann::json j{{"epoch", e.epoch},
                         {"train_loss", e.train_loss},
                         {"val_mae", e.val_mae},
                         {"lr", e.lr},
                         {"improved", e.improved},
                         {"best", e.epoch == h.best_epoch}};
        if (include_wall_time) j["wall_seconds"] = e.wall_seconds;
        out << j.dump() << '\n';
    }
    return out.str();
}

double mean_abs_error(const tape::Tensor& pred, const tape::Tensor& truth)
{
    if (pred.shape != truth.shape) {
        throw ShapeError("mean_abs_error: " + tape::shape_str(pred.shape) + " vs " + tape::shape_str(truth.shape));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::fabs(pred[i] - truth[i]);
    return pred.size() ? s / static_cast<double>(pred.size()) : 0.0;
}

SplitPredictions predict_split(const MfmgcnModel& m, const data::WeatherSeriesDataset& split,
                               const data::WindowSpec& windows, const graphs::StaticGraphs& statics,
                               std::size_t batch_size)
{
    const auto origins = data::window_origins(split.steps, windows);
    const std::size_t B = origins.size(), N = split.n(), W = windows.horizon;
    SplitPredictions out{tape::Tensor({B, N, W, 1}), tape::Tensor({B, N, W, 1}), {}};
    data::WindowIterator it(split, windows, batch_size);
    std::size_t offset = 0;
    while (auto batch = it.next()) {
        const tape::Tensor p = m.predict(batch->inputs, statics);
        const tape::Tensor y = target_channel(batch->targets);
        std::copy(p.data.begin(), p.data.end(), out.pred.data.begin() + static_cast<std::ptrdiff_t>(offset));
        std::copy(y.data.begin(), y.data.end(), out.truth.data.begin() + static_cast<std::ptrdiff_t>(offset));
        offset += p.size();
        out.origin_times.insert(out.origin_times.end(), batch->origin_times.begin(), batch->origin_times.end());
    }
    return out;
}

TrainResult train(const MfmgcnModel& init, const ForecastData& data, const graphs::StaticGraphs& statics,
                  const TrainConfig& cfg, const EpochCallback& on_epoch)
{
    if (cfg.epochs == 0) throw ConfigError("epochs must be positive");
    if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(cfg.lr0 >= 0.0)) throw ConfigError("lr0 must be non-negative");
    const auto train_origins = data::window_origins(data.splits.train.steps, data.windows);
    if (train_origins.empty()) throw ConfigError("training split is too short for one window");
    if (data::window_origins(data.splits.val.steps, data.windows).empty()) {
        throw ConfigError("validation split is too short for one window");
    }

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    MfmgcnModel model = init;
    TrainResult result{model, {}};
    tape::AdamState adam;
    std::mt19937_64 rng(cfg.seed);
    std::size_t since_best = 0;
    bool have_best = false;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto epoch_start = clock::now();
        const double lr = lr_at_epoch(cfg, epoch);
        std::vector<std::size_t> order = train_origins;
        std::shuffle(order.begin(), order.end(), rng);
        data::WindowIterator it(data.splits.train, data.windows, cfg.batch_size, std::move(order));
        double loss_sum = 0.0;
        std::size_t seen = 0, step = 0;
        while (auto batch = it.next()) {
            ++step;
            tape::Tape t;
            tape::Var pred = model.forward(t, batch->inputs, statics);
            tape::Var truth = t.constant(target_channel(batch->targets));
            tape::Var loss = tape::reduce_mean(tape::abs(tape::sub(pred, truth)));
            const double lv = loss.item();
            if (!std::isfinite(lv)) {
                throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) + ", step " +
                                   std::to_string(step));
            }
            const auto grads = t.backward(loss, model.params());
            tape::adam_step(model.params(), grads, adam, lr);
            loss_sum += lv * static_cast<double>(batch->size());
            seen += batch->size();
        }
        const auto val = predict_split(model, data.splits.val, data.windows, statics);
        const double val_mae = mean_abs_error(val.pred, val.truth);
        if (!std::isfinite(val_mae)) throw NumericError("non-finite validation MAE at epoch " + std::to_string(epoch));

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(seen);
        rec.val_mae = val_mae;
        rec.lr = lr;
        rec.wall_seconds = std::chrono::duration<double>(clock::now() - epoch_start).count();
        rec.improved = !have_best || val_mae < result.history.best_val_mae;
        if (rec.improved) {
            have_best = true;
            result.best = model;
            result.history.best_epoch = epoch;
            result.history.best_val_mae = val_mae;
            since_best = 0;
        } else {
            ++since_best;
        }
        result.history.epochs.push_back(rec);
        if (on_epoch) on_epoch(rec);
        if (cfg.early_stop_patience > 0 && since_best >= cfg.early_stop_patience && epoch < cfg.epochs) {
            result.history.stopped_early = true;
            break;
        }
    }
    result.history.total_wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    return result;
}

} // namespace mfmgcn::model
