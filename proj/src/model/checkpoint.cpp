// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/model/checkpoint.hpp"

#include "mfmgcn/data/binary.hpp"
#include "mfmgcn/errors.hpp"

#include <fstream>

namespace mfmgcn::model {

void save_checkpoint(const MfmgcnModel& m, const std::filesystem::path& path, const nlohmann::json& meta)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    data::BinaryWriter w(out);
    w.magic("MFMC");
    w.u32(kCheckpointVersion);
    const nlohmann::json header{{"model", to_json(m.config())}, {"meta", meta.is_null() ? nlohmann::json::object() : meta}};
    w.str(header.dump());
    const auto& ps = m.params();
    w.u32(static_cast<std::uint32_t>(ps.size()));
    for (tape::ParamId id = 0; id < ps.size(); ++id) {
        const tape::Tensor& t = ps.value(id);
        w.str(ps.name(id));
        w.u32(static_cast<std::uint32_t>(t.rank()));
        for (std::size_t d : t.shape) w.u32(static_cast<std::uint32_t>(d));
        w.f64_array(t.data);
    }
    if (!out) throw IoError("failed writing " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    data::BinaryReader r(in, path.string());
    r.expect_magic("MFMC");
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
        throw VersionError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(r.str());
    } catch (const nlohmann::json::exception&) {
        throw FormatError(path.string() + ": checkpoint header is not valid JSON");
    }
    if (!header.contains("model")) throw VersionError(path.string() + ": checkpoint header lacks 'model'");
    ModelConfig cfg;
    try {
        from_json(header.at("model"), cfg, true);
    } catch (const VersionError& e) {
        throw VersionError(path.string() + ": " + e.what());
    }
    const MfmgcnModel reference = build_model(cfg);

    tape::ParamStore ps;
    const std::uint32_t count = r.u32();
    for (std::uint32_t p = 0; p < count; ++p) {
        std::string name = r.str();
        const std::uint32_t rank = r.u32();
        if (rank > 8) throw FormatError(path.string() + ": implausible rank for parameter " + name);
        tape::Shape shape;
        for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(r.u32());
        std::vector<double> values = r.f64_array(tape::numel(shape));
        ps.add(std::move(name), tape::Tensor(std::move(shape), std::move(values)));
    }
    if (!r.at_end()) throw FormatError(path.string() + ": trailing bytes after the parameter table");
    const auto& ref = reference.params();
    if (ps.size() != ref.size()) throw SchemaError(path.string() + ": parameter count does not match the configuration");
    for (tape::ParamId id = 0; id < ps.size(); ++id) {
        if (ps.name(id) != ref.name(id) || ps.value(id).shape != ref.value(id).shape) {
            throw SchemaError(path.string() + ": parameter '" + ps.name(id) + "' does not match the configuration");
        }
    }
    return {MfmgcnModel(cfg, std::move(ps)), header.value("meta", nlohmann::json::object())};
}

} // namespace mfmgcn::model
