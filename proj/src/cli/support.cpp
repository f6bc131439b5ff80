// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/cli/cli.hpp"

#include "mfmgcn/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace fs = std::filesystem;

namespace mfmgcn::cli {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void mix(std::uint64_t& h, const char* p, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(p[i]);
        h *= kFnvPrime;
    }
}

void mix_file(std::uint64_t& h, const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        mix(h, buf, static_cast<std::size_t>(in.gcount()));
    }
}

} // namespace

std::uint64_t fnv1a64(const fs::path& path)
{
    std::uint64_t h = kFnvOffset;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(path))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const std::string rel = fs::relative(f, path).generic_string();
            mix(h, rel.data(), rel.size() + 1);
            mix_file(h, f);
        }
        return h;
    }
    mix_file(h, path);
    return h;
}

std::string hex64(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

fs::path resolve_input(const fs::path& p)
{
    if (p.is_absolute() || fs::exists(p)) return p;
    if (const char* dir = std::getenv(kDataDirEnv); dir && *dir) {
        const fs::path alt = fs::path(dir) / p;
        if (fs::exists(alt)) return alt;
    }
    throw IoError("input not found: " + p.string());
}

fs::path manifest_path(const fs::path& out)
{
    fs::path m = out;
    m += ".manifest.json";
    return m;
}

void RunManifest::add_input(const fs::path& p)
{
    inputs.emplace_back(p.string(), hex64(fnv1a64(p)));
}

nlohmann::json RunManifest::to_json() const
{
    nlohmann::json in = nlohmann::json::array();
    for (const auto& [path, hash] : inputs) in.push_back({{"path", path}, {"fnv1a64", hash}});
    return {{"command", command},
            {"argv", argv},
            {"config", config},
            {"sources", sources},
            {"inputs", in},
            {"outputs", outputs},
            {"seed", seed},
            {"artifact_version", kArtifactVersion},
            {"wall_seconds", wall_seconds}};
}

void write_manifest(const RunManifest& m, const fs::path& out)
{
    const fs::path path = manifest_path(out);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    f << m.to_json().dump(2) << '\n';
    if (!f) throw IoError("failed writing " + path.string());
}

} // namespace mfmgcn::cli
