// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/cli/cli.hpp"

#include "mfmgcn/data/io.hpp"
#include "mfmgcn/data/stats.hpp"
#include "mfmgcn/data/synthetic.hpp"
#include "mfmgcn/errors.hpp"
#include "mfmgcn/eval/ablation.hpp"
#include "mfmgcn/eval/forecast.hpp"
#include "mfmgcn/graphs/graph_set.hpp"
#include "mfmgcn/model/checkpoint.hpp"
#include "mfmgcn/model/train.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace mfmgcn::cli {

namespace {

constexpr const char* kDefaultScheme = "3:1:2";

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// small helpers

template <typename T>
void take(RunManifest& m, const std::string& key, T& dst, const std::optional<T>& flag, bool in_file = false)
{
    if (flag) {
        dst = *flag;
        m.sources[key] = "flag";
    } else {
        m.sources[key] = in_file ? "file" : "default";
    }
}

std::vector<std::string> split_list(const std::string& text, char sep = ',')
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& text, const char* what)
{
    std::vector<T> out;
    for (const auto& s : split_list(text)) {
        std::istringstream in(s);
        T v{};
        if (!(in >> v) || !in.eof()) throw ConfigError(std::string("bad ") + what + " value '" + s + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError(std::string(what) + " list is empty");
    return out;
}

std::vector<std::string> parse_graph_slots(const std::string& text)
{
    std::vector<std::string> slots;
    const auto items = text.find(',') != std::string::npos ? split_list(text) : [&] {
        std::vector<std::string> v;
        for (char c : text) v.emplace_back(1, c);
        return v;
    }();
    for (const auto& s : items) {
        const auto& all = eval::all_graph_slots();
        if (std::find(all.begin(), all.end(), s) == all.end()) {
            throw ConfigError("unknown graph slot '" + s + "' (expected letters from DNPLK)");
        }
        if (std::find(slots.begin(), slots.end(), s) == slots.end()) slots.push_back(s);
    }
    if (slots.empty()) throw ConfigError("graph selection is empty");
    return slots;
}

Json read_json_file(const fs::path& p)
{
    std::ifstream in(p);
    if (!in) throw IoError("cannot open " + p.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(p.string() + ": invalid JSON (" + e.what() + ")");
    }
}

void write_text(const fs::path& p, const std::string& text)
{
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("failed writing " + p.string());
}

void write_json(const fs::path& p, const Json& j) { write_text(p, j.dump(2) + "\n"); }

/// Refuses outputs that would overwrite one of the command's inputs.
void guard_outputs(const RunManifest& m)
{
    for (const auto& o : m.outputs) {
        for (const auto& [in, hash] : m.inputs) {
            std::error_code ec;
            if (o == in || (fs::exists(o) && fs::equivalent(o, in, ec))) {
                throw ConfigError("output '" + o + "' would overwrite input '" + in + "'");
            }
        }
    }
}

void prepare_out_dir(const fs::path& p)
{
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

data::WeatherSeriesDataset load_data(const std::string& path, const std::string& format, RunManifest& m,
                                     const data::DefaultCodes& codes = data::DefaultCodes::builtin())
{
    const fs::path p = resolve_input(path);
    m.add_input(p);
    const data::Format f = format == "auto"
                               ? (fs::is_directory(p) ? data::Format::csv_per_station : data::Format::packed_binary)
                               : data::parse_format(format);
    return data::load_dataset(p, f, codes);
}

graphs::StaticGraphs load_graphs(const std::string& path, const data::WeatherSeriesDataset& ds, RunManifest& m)
{
    const fs::path p = resolve_input(path);
    m.add_input(p);
    auto g = graphs::read_static_graphs(p);
    std::vector<std::string> ids;
    for (const auto& s : ds.stations) ids.push_back(s.station_id);
    if (g.station_ids != ids) {
        throw ShapeError("graph file " + p.string() + " covers " + std::to_string(g.n()) +
                         " stations that do not match the " + std::to_string(ids.size()) + " stations of the dataset");
    }
    return g;
}

std::vector<std::string> station_ids(const data::WeatherSeriesDataset& ds)
{
    std::vector<std::string> ids;
    for (const auto& s : ds.stations) ids.push_back(s.station_id);
    return ids;
}

const data::WeatherSeriesDataset& pick_split(const data::Splits& s, const std::string& name)
{
    if (name == "train") return s.train;
    if (name == "val") return s.val;
    if (name == "test") return s.test;
    throw ConfigError("unknown split '" + name + "' (expected train, val or test)");
}

std::string_view to_string(graphs::DistanceMode mode)
{
    return mode == graphs::DistanceMode::great_circle ? "great_circle" : "euclidean_3d";
}

graphs::DistanceMode parse_distance_mode(const std::string& s)
{
    if (s == "great_circle") return graphs::DistanceMode::great_circle;
    if (s == "euclidean_3d") return graphs::DistanceMode::euclidean_3d;
    throw ConfigError("unknown distance mode '" + s + "' (expected great_circle or euclidean_3d)");
}

// ---------------------------------------------------------------------------
// shared option groups

struct DataOptions {
    std::string data;
    std::string format = "auto";
    std::string scheme = kDefaultScheme;

    void add(CLI::App* app, bool with_scheme = true)
    {
        app->add_option("--data", data, "Dataset: packed .w2kt file or CSV directory")->required();
        app->add_option("--format", format, "auto | packed | csv")->capture_default_str();
        if (with_scheme) {
            app->add_option("--scheme", scheme, "Temporal split, ratios a:b:c or boundaries t0,t1,t2,t3")
                ->capture_default_str();
        }
    }
};

struct GraphBuildOptions {
    std::string sigma = "auto";
    double epsilon = 0.1;
    std::size_t na = 10;
    std::string distance = "great_circle";
    std::string pattern_factors = "default";
    bool per_factor_pattern = false;

    void add(CLI::App* app)
    {
        app->add_option("--sigma", sigma, "Distance kernel width in km, or auto (mean pairwise distance)")
            ->capture_default_str();
        app->add_option("--epsilon", epsilon, "Distance graph sparsity threshold")->capture_default_str();
        app->add_option("--na", na, "Neighbors per station in the neighbor graph")->capture_default_str();
        app->add_option("--distance", distance, "great_circle | euclidean_3d")->capture_default_str();
        app->add_option("--pattern-factors", pattern_factors, "Comma list of factors for the pattern graph, or default")
            ->capture_default_str();
        app->add_flag("--per-factor-pattern", per_factor_pattern, "Emit one pattern graph per factor");
    }

    graphs::StaticGraphConfig resolve(RunManifest& m) const
    {
        graphs::StaticGraphConfig c;
        if (sigma != "auto") {
            try {
                std::size_t used = 0;
                c.distance.sigma_km = std::stod(sigma, &used);
                if (used != sigma.size()) throw std::invalid_argument(sigma);
            } catch (const std::exception&) {
                throw ConfigError("--sigma must be a number of km or auto, got '" + sigma + "'");
            }
        }
        c.distance.epsilon = epsilon;
        c.distance.mode = parse_distance_mode(distance);
        c.neighbor.n_adjacent = na;
        if (pattern_factors != "default") c.pattern_factors = split_list(pattern_factors);
        c.pattern_per_factor_slots = per_factor_pattern;
        m.config["graphs"] = {{"sigma", sigma},
                              {"epsilon", epsilon},
                              {"n_adjacent", na},
                              {"distance", to_string(c.distance.mode)},
                              {"pattern_factors", c.pattern_factors},
                              {"per_factor_pattern", per_factor_pattern}};
        return c;
    }
};

struct TrainingOptions {
    std::string config;
    std::optional<std::size_t> epochs, patience, batch, wprime, w, channels, embed;
    std::optional<double> lr;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> use_graphs;

    void add(CLI::App* app)
    {
        app->add_option("--config", config, "JSON file with optional \"model\" and \"train\" objects");
        app->add_option("--epochs", epochs, "Training epochs");
        app->add_option("--patience", patience, "Early-stopping patience in epochs");
        app->add_option("--batch-size", batch, "Windows per optimizer step");
        app->add_option("--lr", lr, "Initial learning rate");
        app->add_option("--seed", seed, "Seed for initialization and shuffling");
        app->add_option("--wprime", wprime, "Input window length W'");
        app->add_option("--w", w, "Forecast horizon W");
        app->add_option("--channels", channels, "Hidden channels of every ST-block");
        app->add_option("--embed-dim", embed, "Node embedding size of the learnable and dynamic graphs");
        app->add_option("--use-graphs", use_graphs, "Fusion set, letters from DNPLK");
    }

    /// Built-in defaults, overlaid by the config file, overlaid by flags.
    std::pair<model::ModelConfig, model::TrainConfig> resolve(RunManifest& m, std::size_t n_nodes,
                                                              std::size_t n_features) const
    {
        model::ModelConfig mc;
        model::TrainConfig tc;
        Json file_model = Json::object(), file_train = Json::object();
        if (!config.empty()) {
            const fs::path p = resolve_input(config);
            m.add_input(p);
            const Json j = read_json_file(p);
            if (!j.is_object()) throw ConfigError(p.string() + ": configuration must be a JSON object");
            for (const auto& [k, v] : j.items()) {
                if (k == "model") {
                    file_model = v;
                } else if (k == "train") {
                    file_train = v;
                } else {
                    throw ConfigError(p.string() + ": unknown top-level key '" + k + "' (expected model, train)");
                }
            }
            model::from_json(file_model, mc, false);
            model::from_json(file_train, tc, false);
        }
        const auto model_src = [&](const char* key) { return file_model.contains(key) ? "file" : "default"; };
        const auto train_src = [&](const char* key) { return file_train.contains(key) ? "file" : "default"; };

        for (const char* key : {"n_nodes", "n_features"}) {
            if (file_model.contains(key)) {
                const std::size_t want = std::string(key) == "n_nodes" ? n_nodes : n_features;
                if (file_model.at(key).get<std::size_t>() != want) {
                    throw ConfigError(std::string("config sets model.") + key + " = " + file_model.at(key).dump() +
                                      " but the data gives " + std::to_string(want));
                }
            }
        }
        mc.n_nodes = n_nodes;
        mc.n_features = n_features;
        m.sources["model.n_nodes"] = "data";
        m.sources["model.n_features"] = "data";

        take(m, "model.input_len", mc.input_len, wprime, file_model.contains("input_len"));
        take(m, "model.horizon", mc.horizon, w, file_model.contains("horizon"));
        take(m, "model.embed_dim", mc.embed_dim, embed, file_model.contains("embed_dim"));
        if (use_graphs) {
            mc.graphs = parse_graph_slots(*use_graphs);
            m.sources["model.graphs"] = "flag";
        } else {
            m.sources["model.graphs"] = model_src("graphs");
        }
        if (channels) {
            for (std::size_t b = 0; b < mc.blocks.size(); ++b) {
                mc.blocks[b].channels_out = *channels;
                if (b > 0) mc.blocks[b].channels_in = *channels;
            }
            m.sources["model.blocks.channels"] = "flag";
        }
        if (!file_model.contains("blocks") && !mc.blocks.empty()) {
            mc.blocks[0].channels_in = n_features;
            m.sources["model.blocks"] = "default";
        } else if (file_model.contains("blocks")) {
            m.sources["model.blocks"] = "file";
        }
        for (const char* key : {"alpha", "beta"}) m.sources[std::string("model.") + key] = model_src(key);

        if (seed) {
            mc.seed = tc.seed = *seed;
            m.sources["model.seed"] = m.sources["train.seed"] = "flag";
        } else {
            m.sources["model.seed"] = model_src("seed");
            m.sources["train.seed"] = train_src("seed");
        }
        take(m, "train.epochs", tc.epochs, epochs, file_train.contains("epochs"));
        take(m, "train.early_stop_patience", tc.early_stop_patience, patience, file_train.contains("early_stop_patience"));
        take(m, "train.batch_size", tc.batch_size, batch, file_train.contains("batch_size"));
        take(m, "train.lr0", tc.lr0, lr, file_train.contains("lr0"));
        for (const char* key : {"lr_decay_factor", "lr_decay_every", "decay_window", "decay_mode"}) {
            m.sources[std::string("train.") + key] = train_src(key);
        }
        model::validate(mc);
        m.config["model"] = model::to_json(mc);
        m.config["train"] = model::to_json(tc);
        m.seed = tc.seed;
        return {mc, tc};
    }
};

std::function<void(const model::EpochRecord&)> epoch_logger(std::ostream& err, std::size_t total)
{
    return [&err, total](const model::EpochRecord& e) {
        char line[160];
        std::snprintf(line, sizeof line, "epoch %zu/%zu  train_loss %.6f  val_mae %.6f  lr %.3g%s\n", e.epoch, total,
                      e.train_loss, e.val_mae, e.lr, e.improved ? "  *" : "");
        err << line << std::flush;
    };
}

// ---------------------------------------------------------------------------
// commands

struct Command {
    CLI::App* app = nullptr;
    std::function<void(RunManifest&, std::ostream&)> run;
};

Command add_preprocess(CLI::App& root)
{
    struct Opts {
        std::string in, format = "csv", out, report;
        double max_missing = 0.01, max_default = 0.01;
    };
    auto o = std::make_shared<Opts>();
    auto* app = root.add_subcommand("preprocess", "Screen, interpolate and pack a raw station dataset");
    app->add_option("--in", o->in, "Input dataset (CSV directory or packed file)")->required();
    app->add_option("--format", o->format, "csv | packed")->capture_default_str();
    app->add_option("--max-missing", o->max_missing, "Drop stations missing more than this share of records")
        ->capture_default_str();
    app->add_option("--max-default", o->max_default, "Drop stations with more default codes than this share")
        ->capture_default_str();
    app->add_option("--out", o->out, "Packed output dataset")->required();
    app->add_option("--report", o->report, "Screening report JSON");
    return {app, [o](RunManifest& m, std::ostream& err) {
                const auto ds = load_data(o->in, o->format, m);
                m.config = {{"format", o->format}, {"max_missing", o->max_missing}, {"max_default", o->max_default}};
                m.outputs.push_back(o->out);
                if (!o->report.empty()) m.outputs.push_back(o->report);
                guard_outputs(m);
                const auto result = data::run_pipeline(ds, data::DefaultCodes::builtin(), o->max_missing, o->max_default);
                prepare_out_dir(o->out);
                data::write_packed(result.dataset, o->out);
                if (!o->report.empty()) {
                    write_json(o->report, {{"stations_in", ds.n()},
                                           {"stations_out", result.dataset.n()},
                                           {"steps", result.dataset.steps},
                                           {"factors", result.dataset.factors},
                                           {"missing", data::to_json(result.missing)},
                                           {"defaults", data::to_json(result.defaults)}});
                }
                err << "kept " << result.dataset.n() << " of " << ds.n() << " stations\n";
            }};
}

Command add_synth(CLI::App& root)
{
    struct Opts {
        std::optional<std::size_t> n, t, d;
        std::optional<std::uint64_t> seed;
        std::optional<double> drift, noise, persistence, corr, diurnal, seasonal;
        std::string out, format = "packed";
    };
    auto o = std::make_shared<Opts>();
    auto* app = root.add_subcommand("synth", "Generate a spatially correlated synthetic station dataset");
    app->add_option("--n", o->n, "Stations");
    app->add_option("--t", o->t, "Hourly steps");
    app->add_option("--d", o->d, "Factors");
    app->add_option("--seed", o->seed, "Generator seed");
    app->add_option("--drift-km-per-step", o->drift, "Eastward transport speed of the noise field");
    app->add_option("--noise-amplitude", o->noise, "Noise field amplitude");
    app->add_option("--noise-persistence", o->persistence, "Lag-one coefficient of the noise field");
    app->add_option("--corr-scale-km", o->corr, "Spatial correlation length of the noise field");
    app->add_option("--diurnal-amplitude", o->diurnal, "Amplitude of the daily cycle");
    app->add_option("--seasonal-amplitude", o->seasonal, "Amplitude of the slow cycle");
    app->add_option("--format", o->format, "packed | csv")->capture_default_str();
    app->add_option("--out", o->out, "Output path")->required();
    return {app, [o](RunManifest& m, std::ostream& err) {
                data::SyntheticConfig c;
                take(m, "n", c.n, o->n);
                take(m, "t", c.t, o->t);
                take(m, "d", c.d, o->d);
                take(m, "seed", c.seed, o->seed);
                take(m, "drift_km_per_step", c.drift_km_per_step, o->drift);
                take(m, "noise_amplitude", c.noise_amplitude, o->noise);
                take(m, "noise_persistence", c.noise_persistence, o->persistence);
                take(m, "spatial_corr_scale_km", c.spatial_corr_scale_km, o->corr);
                take(m, "diurnal_amplitude", c.diurnal_amplitude, o->diurnal);
                take(m, "seasonal_amplitude", c.seasonal_amplitude, o->seasonal);
                m.config = {{"n", c.n},
                            {"t", c.t},
                            {"d", c.d},
                            {"seed", c.seed},
                            {"center_lat", c.center_lat},
                            {"center_lon", c.center_lon},
                            {"patch_deg", c.patch_deg},
                            {"spatial_corr_scale_km", c.spatial_corr_scale_km},
                            {"diurnal_amplitude", c.diurnal_amplitude},
                            {"seasonal_amplitude", c.seasonal_amplitude},
                            {"seasonal_period", c.seasonal_period},
                            {"baseline_spread", c.baseline_spread},
                            {"noise_amplitude", c.noise_amplitude},
                            {"noise_persistence", c.noise_persistence},
                            {"drift_km_per_step", c.drift_km_per_step},
                            {"time_start", c.time_start},
                            {"format", o->format}};
                m.seed = c.seed;
                m.outputs.push_back(o->out);
                const auto ds = data::generate_synthetic(c);
                if (data::parse_format(o->format) == data::Format::csv_per_station) {
                    data::write_csv_dir(ds, o->out);
                } else {
                    prepare_out_dir(o->out);
                    data::write_packed(ds, o->out);
                }
                err << "wrote " << c.n << " stations x " << c.t << " steps x " << c.d << " factors\n";
            }};
}

Command add_graphs(CLI::App& root)
{
    struct Opts {
        DataOptions data;
        GraphBuildOptions build;
        std::string out;
        bool binary = false;
    };
    auto o = std::make_shared<Opts>();
    auto* app = root.add_subcommand("graphs", "Build the static distance, neighbor and pattern graphs");
    o->data.add(app);
    o->build.add(app);
    app->add_option("--out", o->out, "Output graph file")->required();
    app->add_flag("--binary", o->binary, "Packed binary output regardless of station count");
    return {app, [o](RunManifest& m, std::ostream& err) {
                const auto ds = load_data(o->data.data, o->data.format, m);
                const auto cfg = o->build.resolve(m);
                m.config["scheme"] = o->data.scheme;
                m.outputs.push_back(o->out);
                guard_outputs(m);
                const auto train = data::split_temporal(ds, data::parse_split(o->data.scheme)).train;
                const auto g = graphs::build_static_graphs(train, cfg);
                Json meta = m.config["graphs"];
                meta["scheme"] = o->data.scheme;
                meta["train_steps"] = train.steps;
                meta["data_fnv1a64"] = m.inputs.front().second;
                prepare_out_dir(o->out);
                graphs::write_static_graphs(g, o->out, meta, o->binary);
                err << "built " << g.slots.size() << " graphs over " << g.n() << " stations\n";
            }};
}

Command add_train(CLI::App& root)
{
    struct Opts {
        DataOptions data;
        TrainingOptions training;
        std::string graphs, factor = "t", inputs, out, history;
    };
    auto o = std::make_shared<Opts>();
    auto* app = root.add_subcommand("train", "Train an MFMGCN model and write its best checkpoint");
    o->data.add(app);
    app->add_option("--graphs", o->graphs, "Static graph file")->required();
    app->add_option("--factor", o->factor, "Target factor")->capture_default_str();
    app->add_option("--inputs", o->inputs, "Comma list of extra input factors");
    o->training.add(app);
    app->add_option("--out", o->out, "Checkpoint path")->required();
    app->add_option("--history", o->history, "Per-epoch history, one JSON record per line");
    return {app, [o](RunManifest& m, std::ostream& err) {
                const auto ds = load_data(o->data.data, o->data.format, m);
                const auto statics = load_graphs(o->graphs, ds, m);
                const auto extra = split_list(o->inputs);
                const auto [mc, tc] = o->training.resolve(m, ds.n(), 1 + extra.size());
                m.config["factor"] = o->factor;
                m.config["inputs"] = extra;
                m.config["scheme"] = o->data.scheme;
                m.outputs.push_back(o->out);
                if (!o->history.empty()) m.outputs.push_back(o->history);
                guard_outputs(m);

                const data::WindowSpec windows{mc.input_len, mc.horizon, 1};
                const auto fd =
                    model::prepare_forecast_data(ds, o->factor, extra, data::parse_split(o->data.scheme), windows);
                if (fd.inputs.size() != mc.n_features) {
                    throw ConfigError("--inputs repeats the target or another factor");
                }
                const auto result =
                    model::train(model::build_model(mc), fd, statics, tc, epoch_logger(err, tc.epochs));

                const Json meta{{"factor", fd.target},
                                {"inputs", fd.inputs},
                                {"scheme", o->data.scheme},
                                {"windows", {{"input_len", windows.input_len}, {"horizon", windows.horizon}}},
                                {"norm", data::to_json(fd.stats)},
                                {"station_ids", station_ids(ds)},
                                {"train", model::to_json(tc)},
                                {"best_epoch", result.history.best_epoch},
                                {"best_val_mae", result.history.best_val_mae},
                                {"graphs_fnv1a64", m.inputs.at(1).second}};
                prepare_out_dir(o->out);
                model::save_checkpoint(result.best, o->out, meta);
                if (!o->history.empty()) write_text(o->history, model::history_jsonl(result.history));
                err << "best epoch " << result.history.best_epoch << " of " << result.history.epochs.size()
                    << ", val_mae " << result.history.best_val_mae << "\n";
            }};
}

Command add_eval(CLI::App& root)
{
    struct Opts {
        DataOptions data;
        std::string baseline, ckpt, pred, graphs, factor = "t", split = "test", space = "normalized", out, curve,
                                                                pred_out, kernel = "rbf";
        std::size_t wprime = 12, w = 12;
        double lambda = 1.0;
        std::optional<double> gamma;
    };
    auto o = std::make_shared<Opts>();
    auto* app = root.add_subcommand("eval", "Score a baseline, a checkpoint or an external prediction file");
    o->data.add(app);
    auto* b = app->add_option("--baseline", o->baseline, "persistence | linear | ridge | krr");
    auto* c = app->add_option("--ckpt", o->ckpt, "Model checkpoint");
    auto* p = app->add_option("--pred", o->pred, "Packed prediction file");
    b->excludes(c)->excludes(p);
    c->excludes(p);
    app->add_option("--graphs", o->graphs, "Static graph file (with --ckpt)");
    app->add_option("--factor", o->factor, "Target factor (baselines)")->capture_default_str();
    app->add_option("--wprime", o->wprime, "Input window length (baselines)")->capture_default_str();
    app->add_option("--w", o->w, "Forecast horizon (baselines)")->capture_default_str();
    app->add_option("--lambda", o->lambda, "Ridge penalty (ridge, krr)")->capture_default_str();
    app->add_option("--gamma", o->gamma, "RBF width (krr); default 1/(W' var)");
    app->add_option("--kernel", o->kernel, "rbf | linear (krr)")->capture_default_str();
    app->add_option("--split", o->split, "train | val | test")->capture_default_str();
    app->add_option("--space", o->space, "normalized | physical")->capture_default_str();
    app->add_option("--out", o->out, "Metrics JSON")->required();
    app->add_option("--curve", o->curve, "Per-step horizon curve CSV");
    app->add_option("--pred-out", o->pred_out, "Write the forecasts as a packed prediction file");
    app->callback([app, o] {
        const int modes = !o->baseline.empty() + !o->ckpt.empty() + !o->pred.empty();
        if (modes != 1) throw CLI::ValidationError("eval", "exactly one of --baseline, --ckpt, --pred is required");
        if (!o->ckpt.empty() && o->graphs.empty()) throw CLI::RequiredError("--graphs (with --ckpt)");
        (void)app;
    });
    return {app, [o](RunManifest& m, std::ostream& err) {
                const auto ds = load_data(o->data.data, o->data.format, m);
                const auto scheme = data::parse_split(o->data.scheme);
                const auto space = eval::parse_metric_space(o->space);
                m.config = {{"scheme", o->data.scheme}, {"split", o->split}, {"space", o->space}};
                m.outputs.push_back(o->out);
                if (!o->curve.empty()) m.outputs.push_back(o->curve);
                if (!o->pred_out.empty()) m.outputs.push_back(o->pred_out);

                eval::MetricsReport report;
                std::string label;
                std::optional<eval::Forecast> forecast;
                model::ForecastData fd;
                if (!o->pred.empty()) {
                    const fs::path pp = resolve_input(o->pred);
                    m.add_input(pp);
                    guard_outputs(m);
                    if (!o->pred_out.empty()) throw ConfigError("--pred-out is not available with --pred");
                    const auto pf = eval::read_predictions(pp);
                    const auto raw = data::split_temporal(data::select_factors(ds, pf.factors), scheme);
                    auto truth = pick_split(raw, o->split);
                    if (pf.space == eval::MetricSpace::normalized) {
                        truth = data::apply_normalization(truth, data::fit_norm_stats(raw.train));
                    }
                    report = eval::score_external(pf, truth);
                    label = "external";
                    m.config["predictor"] = "external";
                    m.config["prediction_space"] = std::string(eval::to_string(pf.space));
                } else if (!o->ckpt.empty()) {
                    const fs::path cp = resolve_input(o->ckpt);
                    m.add_input(cp);
                    const auto statics = load_graphs(o->graphs, ds, m);
                    guard_outputs(m);
                    const auto loaded = model::load_checkpoint(cp);
                    const Json& meta = loaded.meta;
                    std::vector<std::string> inputs, extra;
                    data::WindowSpec windows;
                    try {
                        fd.target = meta.at("factor").get<std::string>();
                        inputs = meta.at("inputs").get<std::vector<std::string>>();
                        windows.input_len = meta.at("windows").at("input_len").get<std::size_t>();
                        windows.horizon = meta.at("windows").at("horizon").get<std::size_t>();
                        if (meta.at("station_ids").get<std::vector<std::string>>() != station_ids(ds)) {
                            throw ShapeError("checkpoint was trained on different stations than " + o->data.data);
                        }
                    } catch (const Json::exception& e) {
                        throw FormatError(cp.string() + ": checkpoint metadata lacks forecasting fields (" + e.what() + ")");
                    }
                    extra.assign(inputs.begin() + 1, inputs.end());
                    fd = model::prepare_forecast_data(ds, inputs.front(), extra, scheme, windows);
                    if (fd.stats != data::norm_stats_from_json(meta.at("norm"))) {
                        throw ConfigError("normalization statistics of " + o->data.data +
                                          " under split scheme '" + o->data.scheme + "' differ from the checkpoint's");
                    }
                    forecast = eval::forecast_model(loaded.model, pick_split(fd.splits, o->split), windows, statics);
                    label = "mfmgcn";
                    m.config["predictor"] = "mfmgcn";
                    m.config["factor"] = fd.target;
                    m.seed = loaded.model.config().seed;
                } else {
                    guard_outputs(m);
                    const data::WindowSpec windows{o->wprime, o->w, 1};
                    fd = model::prepare_forecast_data(ds, o->factor, {}, scheme, windows);
                    const auto& split = pick_split(fd.splits, o->split);
                    m.config["predictor"] = o->baseline;
                    m.config["factor"] = o->factor;
                    m.config["windows"] = {{"input_len", o->wprime}, {"horizon", o->w}};
                    if (o->baseline == "persistence") {
                        forecast = eval::forecast_persistence(split, windows);
                    } else {
                        baselines::RegressionConfig rc;
                        rc.kind = baselines::parse_regression_kind(o->baseline);
                        rc.lambda = rc.kind == baselines::RegressionKind::linear ? 0.0 : o->lambda;
                        rc.gamma = o->gamma;
                        if (o->kernel == "rbf") {
                            rc.kernel = baselines::KernelKind::rbf;
                        } else if (o->kernel == "linear") {
                            rc.kernel = baselines::KernelKind::linear;
                        } else {
                            throw ConfigError("unknown kernel '" + o->kernel + "' (expected rbf or linear)");
                        }
                        const auto fitted = baselines::fit_regression(fd.splits.train, windows, rc);
                        forecast = eval::forecast_regression(fitted, split, windows);
                        m.config["regression"] = {{"lambda", rc.lambda}, {"gamma", fitted.gamma}, {"kernel", o->kernel}};
                    }
                    label = o->baseline;
                }

                if (forecast) {
                    report = eval::score_forecast(*forecast, fd.target, fd.stats, space);
                    if (!o->pred_out.empty()) {
                        eval::PredictionFile pf;
                        pf.factors = {fd.target};
                        pf.station_ids = station_ids(ds);
                        pf.space = space;
                        pf.time_step = ds.time_step;
                        pf.origin_times = forecast->origin_times;
                        pf.values = space == eval::MetricSpace::physical
                                        ? eval::denormalize_forecast(forecast->pred, fd.stats, {fd.target})
                                        : forecast->pred;
                        prepare_out_dir(o->pred_out);
                        eval::write_predictions(pf, o->pred_out);
                    }
                }
                Json j = eval::to_json(report);
                j["predictor"] = label;
                j["split"] = o->split;
                write_json(o->out, j);
                if (!o->curve.empty()) write_text(o->curve, eval::to_csv({eval::horizon_curve(report, label)}));
                char line[128];
                std::snprintf(line, sizeof line, "%s on %s: MAE %.6f RMSE %.6f (%s)\n", label.c_str(),
                              o->split.c_str(), report.mae, report.rmse, o->space.c_str());
                err << line;
            }};
}

Command add_ablate(CLI::App& root)
{
    struct Opts {
        DataOptions data;
        GraphBuildOptions build;
        TrainingOptions training;
        std::string grid = "table4", graphs, factor = "t", inputs, seeds = "7", na_values = "5,10,15,20,25", out;
    };
    auto o = std::make_shared<Opts>();
    auto* app = root.add_subcommand("ablate", "Train one model per fusion selection or neighbor count");
    o->data.add(app);
    app->add_option("--grid", o->grid, "table4 | single | na")->capture_default_str();
    app->add_option("--graphs", o->graphs, "Static graph file; built from the graph flags when absent");
    o->build.add(app);
    app->add_option("--factor", o->factor, "Target factor")->capture_default_str();
    app->add_option("--inputs", o->inputs, "Comma list of extra input factors");
    app->add_option("--seeds", o->seeds, "Comma list of seeds, one training run each")->capture_default_str();
    app->add_option("--na-values", o->na_values, "Neighbor counts for --grid na")->capture_default_str();
    o->training.add(app);
    app->add_option("--out", o->out, "Ablation report JSON")->required();
    return {app, [o](RunManifest& m, std::ostream& err) {
                const auto ds = load_data(o->data.data, o->data.format, m);
                const auto scheme = data::parse_split(o->data.scheme);
                const auto seeds = parse_numbers<std::uint64_t>(o->seeds, "seed");
                const auto extra = split_list(o->inputs);
                const auto graph_cfg = o->build.resolve(m);
                std::optional<graphs::StaticGraphs> statics;
                if (!o->graphs.empty()) statics = load_graphs(o->graphs, ds, m);
                const auto [mc, tc] = o->training.resolve(m, ds.n(), 1 + extra.size());
                m.config["grid"] = o->grid;
                m.config["factor"] = o->factor;
                m.config["inputs"] = extra;
                m.config["scheme"] = o->data.scheme;
                m.config["seeds"] = seeds;
                m.outputs.push_back(o->out);
                guard_outputs(m);

                const auto fd = model::prepare_forecast_data(ds, o->factor, extra, scheme,
                                                             data::WindowSpec{mc.input_len, mc.horizon, 1});
                const auto progress = [&err](const eval::AblationSpec& s, const eval::AblationRun& r) {
                    char line[160];
                    std::snprintf(line, sizeof line, "%-6s seed %llu: test MAE %.6f RMSE %.6f (best epoch %zu)\n",
                                  s.name.c_str(), static_cast<unsigned long long>(r.seed), r.normalized.mae,
                                  r.normalized.rmse, r.best_epoch);
                    err << line << std::flush;
                };
                Json report;
                if (o->grid == "na") {
                    const auto values = parse_numbers<std::size_t>(o->na_values, "neighbor count");
                    m.config["na_values"] = values;
                    report = eval::to_json(eval::neighbor_sweep(values, fd, graph_cfg, mc, tc, seeds, progress));
                } else {
                    if (!statics) statics = graphs::build_static_graphs(data::split_temporal(ds, scheme).train, graph_cfg);
                    std::vector<eval::AblationSpec> specs;
                    if (o->grid == "table4") {
                        specs = eval::table4_specs(seeds);
                    } else if (o->grid == "single") {
                        specs = eval::single_graph_specs(seeds);
                    } else {
                        throw ConfigError("unknown grid '" + o->grid + "' (expected table4, single or na)");
                    }
                    report = eval::to_json(eval::run_ablation(specs, fd, *statics, mc, tc, progress));
                    if (o->grid == "table4") report["published_reference"] = eval::published_reference_json();
                }
                report["grid"] = o->grid;
                write_json(o->out, report);
            }};
}

int exit_code_for(const std::exception& e)
{
    return dynamic_cast<const ValidationError*>(&e) ? 1 : 2;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App root{"MFMGCN: multi-factor multi-graph spatio-temporal forecasting", "mfmgcn"};
    root.require_subcommand(1);
    root.set_version_flag("--version", kArtifactVersion);
    std::vector<Command> commands{add_preprocess(root), add_synth(root),  add_graphs(root),
                                  add_train(root),      add_eval(root),   add_ablate(root)};

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        root.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const CLI::App* culprit = &root;
        for (const auto& c : commands)
            if (c.app->parsed()) culprit = c.app;
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            if (dynamic_cast<const CLI::CallForVersion*>(&e)) {
                out << e.what() << "\n";
            } else {
                out << culprit->help();
            }
            return 0;
        }
        err << "error: " << e.what() << "\n\n" << culprit->help();
        return 1;
    }

    const auto start = std::chrono::steady_clock::now();
    for (const auto& c : commands) {
        if (!c.app->parsed()) continue;
        RunManifest m;
        m.command = c.app->get_name();
        m.argv = args;
        try {
            c.run(m, err);
            m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (!m.outputs.empty()) write_manifest(m, m.outputs.front());
            return 0;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return exit_code_for(e);
        }
    }
    return 1;
}

int dispatch(int argc, const char* const* argv)
{
    return dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

} // namespace mfmgcn::cli
