// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/graphs/graph_set.hpp"

#include "mfmgcn/data/binary.hpp"
#include "mfmgcn/errors.hpp"

#include <fstream>

namespace mfmgcn::graphs {

namespace fs = std::filesystem;

const Adjacency* StaticGraphs::find(const std::string& slot) const
{
    for (std::size_t s = 0; s < slots.size(); ++s)
        if (slots[s] == slot) return &graphs[s];
    return nullptr;
}

StaticGraphs build_static_graphs(const data::WeatherSeriesDataset& train, const StaticGraphConfig& cfg)
{
    StaticGraphs g;
    for (const auto& s : train.stations) g.station_ids.push_back(s.station_id);
    g.slots = {"D", "N"};
    g.graphs.push_back(build_distance_graph(train.stations, cfg.distance));
    g.graphs.push_back(build_neighbor_graph(train.stations, cfg.neighbor));
    PatternGraph p = build_pattern_graph(train, cfg.pattern_factors, cfg.skip_absent_pattern_factors);
    g.pattern_factors = p.factors;
    g.pattern_components = p.per_factor;
    if (cfg.pattern_per_factor_slots) {
        for (std::size_t f = 0; f < p.factors.size(); ++f) {
            g.slots.push_back("P:" + p.factors[f]);
            g.graphs.push_back(p.per_factor[f]);
        }
    } else {
        g.slots.push_back("P");
        g.graphs.push_back(p.mean);
    }
    return g;
}

namespace {

Adjacency permute(const Adjacency& a, const std::vector<std::size_t>& perm)
{
    const std::size_t n = a.n();
    Adjacency out = a;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.weights.data[i * n + j] = a.weights.data[perm[i] * n + perm[j]];
    return out;
}

} // namespace

StaticGraphs permute_nodes(const StaticGraphs& g, const std::vector<std::size_t>& perm)
{
    if (perm.size() != g.n()) throw ConfigError("permutation length does not match the node count");
    StaticGraphs out = g;
    for (std::size_t i = 0; i < perm.size(); ++i) out.station_ids[i] = g.station_ids[perm[i]];
    for (std::size_t s = 0; s < g.graphs.size(); ++s) out.graphs[s] = permute(g.graphs[s], perm);
    for (std::size_t s = 0; s < g.pattern_components.size(); ++s)
        out.pattern_components[s] = permute(g.pattern_components[s], perm);
    return out;
}

namespace {

nlohmann::json adjacency_json(const std::string& slot, const Adjacency& a)
{
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < a.n(); ++i)
        rows.push_back(std::vector<double>(a.weights.data.begin() + static_cast<std::ptrdiff_t>(i * a.n()),
                                           a.weights.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * a.n())));
    return {{"slot", slot}, {"kind", to_string(a.kind)}, {"params", a.params}, {"weights", rows}};
}

Adjacency adjacency_from_json(const nlohmann::json& j, std::size_t n)
{
    Adjacency a;
    a.kind = parse_graph_kind(j.at("kind").get<std::string>());
    a.params = j.at("params").get<std::map<std::string, double>>();
    const auto& rows = j.at("weights");
    if (rows.size() != n) throw SchemaError("graph '" + j.at("slot").get<std::string>() + "' has the wrong row count");
    a.weights = tape::Tensor({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = rows[i].get<std::vector<double>>();
        if (row.size() != n) throw SchemaError("graph row " + std::to_string(i) + " has the wrong length");
        std::copy(row.begin(), row.end(), a.weights.data.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
    return a;
}

void write_adjacency(data::BinaryWriter& w, const std::string& slot, const Adjacency& a)
{
    w.str(slot);
    w.str(std::string(to_string(a.kind)));
    w.u32(static_cast<std::uint32_t>(a.params.size()));
    for (const auto& [k, v] : a.params) {
        w.str(k);
        w.f64(v);
    }
    w.f64_array(a.weights.data);
}

Adjacency read_adjacency(data::BinaryReader& r, std::string& slot, std::size_t n)
{
    Adjacency a;
    slot = r.str();
    a.kind = parse_graph_kind(r.str());
    const std::uint32_t np = r.u32();
    for (std::uint32_t p = 0; p < np; ++p) {
        std::string k = r.str();
        a.params[k] = r.f64();
    }
    a.weights = tape::Tensor({n, n}, r.f64_array(n * n));
    return a;
}

} // namespace

nlohmann::json to_json(const StaticGraphs& g, const nlohmann::json& build_meta)
{
    nlohmann::json graphs = nlohmann::json::array();
    for (std::size_t s = 0; s < g.slots.size(); ++s) graphs.push_back(adjacency_json(g.slots[s], g.graphs[s]));
    nlohmann::json components = nlohmann::json::array();
    for (std::size_t f = 0; f < g.pattern_components.size(); ++f)
        components.push_back(adjacency_json("P:" + g.pattern_factors[f], g.pattern_components[f]));
    return {{"format", "mfmgcn-graphs"},
            {"version", kGraphVersion},
            {"n", g.n()},
            {"station_ids", g.station_ids},
            {"pattern_factors", g.pattern_factors},
            {"graphs", graphs},
            {"pattern_components", components},
            {"build", build_meta.is_null() ? nlohmann::json::object() : build_meta}};
}

StaticGraphs static_graphs_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format") != "mfmgcn-graphs") throw FormatError("not a graph file");
        if (j.at("version").get<std::uint32_t>() != kGraphVersion) {
            throw VersionError("unsupported graph file version " + j.at("version").dump());
        }
        StaticGraphs g;
        const std::size_t n = j.at("n").get<std::size_t>();
        g.station_ids = j.at("station_ids").get<std::vector<std::string>>();
        if (g.station_ids.size() != n) throw SchemaError("graph file station list does not match n");
        g.pattern_factors = j.at("pattern_factors").get<std::vector<std::string>>();
        for (const auto& e : j.at("graphs")) {
            g.slots.push_back(e.at("slot").get<std::string>());
            g.graphs.push_back(adjacency_from_json(e, n));
        }
        for (const auto& e : j.at("pattern_components")) g.pattern_components.push_back(adjacency_from_json(e, n));
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed graph file: ") + e.what());
    }
}

void write_static_graphs(const StaticGraphs& g, const fs::path& path, const nlohmann::json& build_meta, bool force_binary)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    if (!force_binary && g.n() <= kJsonGraphLimit) {
        out << to_json(g, build_meta).dump(1) << '\n';
    } else {
        data::BinaryWriter w(out);
        w.magic("W2KG");
        w.u32(kGraphVersion);
        w.u32(static_cast<std::uint32_t>(g.n()));
        w.u32(static_cast<std::uint32_t>(g.slots.size()));
        w.u32(static_cast<std::uint32_t>(g.pattern_components.size()));
        for (const auto& id : g.station_ids) w.str(id);
        for (std::size_t s = 0; s < g.slots.size(); ++s) write_adjacency(w, g.slots[s], g.graphs[s]);
        for (std::size_t f = 0; f < g.pattern_components.size(); ++f)
            write_adjacency(w, "P:" + g.pattern_factors[f], g.pattern_components[f]);
        w.str(build_meta.is_null() ? "{}" : build_meta.dump());
    }
    if (!out) throw IoError("failed writing " + path.string());
}

StaticGraphs read_static_graphs(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char head[4] = {};
    in.read(head, 4);
    in.clear();
    in.seekg(0);
    if (std::string_view(head, 4) != "W2KG") {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ": neither a W2KG file nor valid JSON");
        }
        return static_graphs_from_json(j);
    }
    data::BinaryReader r(in, path.string());
    r.expect_magic("W2KG");
    const auto version = r.u32();
    if (version != kGraphVersion) throw VersionError(path.string() + ": unsupported W2KG version " + std::to_string(version));
    StaticGraphs g;
    const std::size_t n = r.u32(), count = r.u32(), comps = r.u32();
    for (std::size_t i = 0; i < n; ++i) g.station_ids.push_back(r.str());
    for (std::size_t s = 0; s < count; ++s) {
        std::string slot;
        g.graphs.push_back(read_adjacency(r, slot, n));
        g.slots.push_back(slot);
    }
    for (std::size_t f = 0; f < comps; ++f) {
        std::string slot;
        g.pattern_components.push_back(read_adjacency(r, slot, n));
        g.pattern_factors.push_back(slot.substr(2));
    }
    return g;
}

} // namespace mfmgcn::graphs
