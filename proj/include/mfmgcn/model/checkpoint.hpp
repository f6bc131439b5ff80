// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfmgcn/model/model.hpp"

#include <filesystem>

#include <json.hpp>

namespace mfmgcn::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout: magic "MFMC", u32 version, JSON header string
/// {"model": ModelConfig, "meta": {...}}, u32 parameter count, then per
/// parameter its name, u32 rank, u32 dims and f64 values.
void save_checkpoint(const MfmgcnModel& m, const std::filesystem::path& path, const nlohmann::json& meta = {});

struct LoadedCheckpoint {
    MfmgcnModel model;
    nlohmann::json meta;
};

/// Missing header fields raise VersionError; bad magic or truncation raise
/// FormatError; parameter names or shapes that disagree with the config
/// raise SchemaError.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

} // namespace mfmgcn::model
