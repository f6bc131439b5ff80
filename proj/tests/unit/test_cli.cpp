// Copyright 2026 The mfmgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfmgcn/cli/cli.hpp"
#include "mfmgcn/errors.hpp"

#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mt = mfmgcn::testing;
namespace fs = std::filesystem;
using mfmgcn::cli::dispatch;
using nlohmann::json;

namespace {

struct Run {
    int rc;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "mfmgcn");
    std::ostringstream out, err;
    const int rc = dispatch(args, out, err);
    return {rc, out.str(), err.str()};
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

json read_json(const fs::path& p)
{
    std::ifstream in(p);
    return json::parse(in);
}

} // namespace

TEST(Fnv1a64, PublishedVectors)
{
    mt::TempDir dir;
    write_file(dir / "empty", "");
    write_file(dir / "a", "a");
    write_file(dir / "foobar", "foobar");
    EXPECT_EQ(mfmgcn::cli::hex64(mfmgcn::cli::fnv1a64(dir / "empty")), "cbf29ce484222325");
    EXPECT_EQ(mfmgcn::cli::hex64(mfmgcn::cli::fnv1a64(dir / "a")), "af63dc4c8601ec8c");
    EXPECT_EQ(mfmgcn::cli::hex64(mfmgcn::cli::fnv1a64(dir / "foobar")), "85944171f73967e8");
}

TEST(Fnv1a64, DirectoryHashSeesNamesAndContents)
{
    mt::TempDir a, b;
    write_file(a / "x.csv", "1,2\n");
    write_file(b / "x.csv", "1,2\n");
    EXPECT_EQ(mfmgcn::cli::fnv1a64(a.path()), mfmgcn::cli::fnv1a64(b.path()));
    write_file(b / "x.csv", "1,3\n");
    EXPECT_NE(mfmgcn::cli::fnv1a64(a.path()), mfmgcn::cli::fnv1a64(b.path()));
    write_file(b / "x.csv", "1,2\n");
    fs::rename(b / "x.csv", b / "y.csv");
    EXPECT_NE(mfmgcn::cli::fnv1a64(a.path()), mfmgcn::cli::fnv1a64(b.path()));
}

TEST(ResolveInput, FallsBackToDataDirectory)
{
    mt::TempDir dir;
    write_file(dir / "only-here.txt", "x");
    ::setenv(mfmgcn::cli::kDataDirEnv, dir.path().c_str(), 1);
    EXPECT_EQ(mfmgcn::cli::resolve_input("only-here.txt"), dir / "only-here.txt");
    EXPECT_THROW(mfmgcn::cli::resolve_input("absent.txt"), mfmgcn::IoError);
    ::unsetenv(mfmgcn::cli::kDataDirEnv);
    EXPECT_THROW(mfmgcn::cli::resolve_input("only-here.txt"), mfmgcn::IoError);
}

TEST(Dispatch, HelpExitsZeroOnStdout)
{
    const auto r = run({"train", "--help"});
    EXPECT_EQ(r.rc, 0);
    EXPECT_NE(r.out.find("--graphs"), std::string::npos);
    EXPECT_TRUE(r.err.empty());
}

TEST(Dispatch, UsageErrorsExitOne)
{
    EXPECT_EQ(run({}).rc, 1);
    EXPECT_EQ(run({"frobnicate"}).rc, 1);
    const auto r = run({"synth", "--out", "x.w2kt", "--wat"});
    EXPECT_EQ(r.rc, 1);
    EXPECT_NE(r.err.find("Usage:"), std::string::npos);
    EXPECT_EQ(run({"eval", "--data", "x", "--out", "y"}).rc, 1);
}

TEST(Dispatch, ValidationAndRuntimeFailuresAreDistinguished)
{
    mt::TempDir dir;
    const std::string data = (dir / "d.w2kt").string();
    ASSERT_EQ(run({"synth", "--n", "4", "--t", "80", "--out", data}).rc, 0);
    // invalid values: exit 1
    EXPECT_EQ(run({"graphs", "--data", data, "--epsilon", "1.5", "--out", (dir / "g.json").string()}).rc, 1);
    EXPECT_EQ(run({"eval", "--baseline", "ridge", "--data", data, "--factor", "nope", "--out",
                   (dir / "m.json").string()})
                  .rc,
              1);
    // unreadable or corrupt inputs: exit 2
    EXPECT_EQ(run({"eval", "--baseline", "ridge", "--data", (dir / "none.w2kt").string(), "--out",
                   (dir / "m.json").string()})
                  .rc,
              2);
    write_file(dir / "junk.w2kt", "not a dataset");
    EXPECT_EQ(run({"eval", "--baseline", "ridge", "--data", (dir / "junk.w2kt").string(), "--out",
                   (dir / "m.json").string()})
                  .rc,
              2);
}

TEST(Dispatch, RefusesToOverwriteInputs)
{
    mt::TempDir dir;
    const std::string data = (dir / "d.w2kt").string();
    ASSERT_EQ(run({"synth", "--n", "4", "--t", "80", "--out", data}).rc, 0);
    const auto before = mfmgcn::cli::fnv1a64(data);
    EXPECT_EQ(run({"graphs", "--data", data, "--na", "2", "--out", data}).rc, 1);
    EXPECT_EQ(mfmgcn::cli::fnv1a64(data), before);
}

TEST(Manifest, RecordsSourcesHashesAndSeed)
{
    mt::TempDir dir;
    const std::string data = (dir / "d.w2kt").string(), graphs = (dir / "g.json").string(),
                      cfg = (dir / "model.json").string(), ckpt = (dir / "c.bin").string();
    ASSERT_EQ(run({"synth", "--n", "5", "--t", "120", "--seed", "4", "--out", data}).rc, 0);
    ASSERT_EQ(run({"graphs", "--data", data, "--na", "2", "--out", graphs}).rc, 0);
    write_file(cfg, R"({"model": {"embed_dim": 4, "input_len": 8}, "train": {"epochs": 3, "lr0": 0.005}})");
    const auto r = run({"train", "--data", data, "--graphs", graphs, "--config", cfg, "--epochs", "1", "--w", "4",
                        "--channels", "3", "--seed", "9", "--out", ckpt});
    ASSERT_EQ(r.rc, 0) << r.err;

    const json m = read_json(mfmgcn::cli::manifest_path(ckpt));
    EXPECT_EQ(m.at("command"), "train");
    EXPECT_EQ(m.at("seed"), 9);
    const json& s = m.at("sources");
    EXPECT_EQ(s.at("train.epochs"), "flag");     // flag beats file
    EXPECT_EQ(s.at("train.lr0"), "file");
    EXPECT_EQ(s.at("train.batch_size"), "default");
    EXPECT_EQ(s.at("model.embed_dim"), "file");
    EXPECT_EQ(s.at("model.input_len"), "file");
    EXPECT_EQ(s.at("model.horizon"), "flag");
    EXPECT_EQ(s.at("model.n_nodes"), "data");
    const json& c = m.at("config");
    EXPECT_EQ(c.at("train").at("epochs"), 1);
    EXPECT_DOUBLE_EQ(c.at("train").at("lr0").get<double>(), 0.005);
    EXPECT_EQ(c.at("model").at("input_len"), 8);
    EXPECT_EQ(c.at("model").at("horizon"), 4);
    EXPECT_EQ(c.at("model").at("seed"), 9);

    ASSERT_EQ(m.at("inputs").size(), 3u);
    for (const auto& in : m.at("inputs")) {
        EXPECT_EQ(in.at("fnv1a64"), mfmgcn::cli::hex64(mfmgcn::cli::fnv1a64(in.at("path").get<std::string>())));
    }
}

TEST(Manifest, ConfigFileRejectsUnknownKeysAndWrongNodeCount)
{
    mt::TempDir dir;
    const std::string data = (dir / "d.w2kt").string(), graphs = (dir / "g.json").string(),
                      cfg = (dir / "model.json").string();
    ASSERT_EQ(run({"synth", "--n", "5", "--t", "120", "--out", data}).rc, 0);
    ASSERT_EQ(run({"graphs", "--data", data, "--na", "2", "--out", graphs}).rc, 0);
    write_file(cfg, R"({"modle": {}})");
    EXPECT_EQ(run({"train", "--data", data, "--graphs", graphs, "--config", cfg, "--out", (dir / "c").string()}).rc, 1);
    write_file(cfg, R"({"model": {"n_nodes": 7}})");
    EXPECT_EQ(run({"train", "--data", data, "--graphs", graphs, "--config", cfg, "--out", (dir / "c").string()}).rc, 1);
    write_file(cfg, "{ not json");
    EXPECT_EQ(run({"train", "--data", data, "--graphs", graphs, "--config", cfg, "--out", (dir / "c").string()}).rc, 1);
}

TEST(Dispatch, GraphFileMustMatchTheDataset)
{
    mt::TempDir dir;
    const std::string a = (dir / "a.w2kt").string(), b = (dir / "b.w2kt").string(), g = (dir / "g.json").string();
    ASSERT_EQ(run({"synth", "--n", "5", "--t", "120", "--out", a}).rc, 0);
    ASSERT_EQ(run({"synth", "--n", "6", "--t", "120", "--out", b}).rc, 0);
    ASSERT_EQ(run({"graphs", "--data", a, "--na", "2", "--out", g}).rc, 0);
    const auto r = run({"train", "--data", b, "--graphs", g, "--epochs", "1", "--out", (dir / "c").string()});
    EXPECT_EQ(r.rc, 1);
    EXPECT_NE(r.err.find("stations"), std::string::npos);
}
