// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfmgcn::cli {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kDataDirEnv = "MFMGCN_DATA_DIR";

/// Runs one command line. Exit codes: 0 success, 1 invalid input or usage,
/// 2 runtime failure. Diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

/// FNV-1a 64 over file bytes; for a directory, over the sorted relative
/// paths and contents of every regular file beneath it.
std::uint64_t fnv1a64(const std::filesystem::path& path);
std::string hex64(std::uint64_t h);

/// Relative paths missing from the working directory are looked up under
/// $MFMGCN_DATA_DIR.
std::filesystem::path resolve_input(const std::filesystem::path& p);

std::filesystem::path manifest_path(const std::filesystem::path& out);

/// Record of one command: argv, the resolved configuration with the source
/// of each overridable value, hashes of every input, seed, version, wall time.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json sources = nlohmann::json::object();  // key -> "flag" | "file" | "default" | "data"
    std::vector<std::pair<std::string, std::string>> inputs;   // path, hash
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    void add_input(const std::filesystem::path& p);
    nlohmann::json to_json() const;
};

void write_manifest(const RunManifest& m, const std::filesystem::path& out);

} // namespace mfmgcn::cli
