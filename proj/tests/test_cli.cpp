#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hocl/cli.hpp"

using namespace hocl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "hocl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("hocl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
                std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, HelpExitsZero) {
    const Outcome o = run({"--help"});
    EXPECT_EQ(o.code, 0);
    EXPECT_NE(o.out.find("simulate"), std::string::npos);
}

TEST_F(CliTest, UnknownScenarioIsUsageError) {
    const Outcome o = run({"simulate", "fig9", "--out", (dir_ / "x").string()});
    EXPECT_EQ(o.code, 2);
    EXPECT_FALSE(o.err.empty());
    EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(CliTest, MissingSubcommandOrFlag) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bounds", "--eps", "0.01"}).code, 2);
}

TEST_F(CliTest, BoundsValues) {
    const Outcome o = run({"bounds", "--eps", "0.01", "--sigma-c", "1", "--k", "2", "--n", "50", "--eta", "0.01", "--m",
                           "1", "--gamma", "0.001"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json j = Json::parse(o.out);
    const double lc = std::exp(-0.5);
    EXPECT_NEAR(j["separation_bound"].get<double>(), 0.01 / (lc * 100.0 + 0.01), 1e-15);
    EXPECT_DOUBLE_EQ(j["weight_bound"].get<double>(), 500.0);
    EXPECT_NEAR(j["kernel_lipschitz"].get<double>(), lc, 1e-15);
    EXPECT_EQ(run({"bounds", "--eps", "0.01", "--sigma-c", "1", "--k", "2", "--n", "50", "--eta", "0.01", "--m", "1",
                   "--gamma", "0"})
                  .code,
              2);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
    const Outcome o = run({"simulate", "fig2", "--steps", "5", "--out", "/proc/hocl_nope/run"});
    EXPECT_EQ(o.code, 3);
}

TEST_F(CliTest, BadTrainConfigNamesField) {
    std::ofstream(dir_ / "bad.json") << R"({"gamma": -1})";
    const Outcome o = run({"train", "--config", (dir_ / "bad.json").string(), "--out", (dir_ / "t").string()});
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.err.find("gamma"), std::string::npos);
    EXPECT_EQ(run({"train", "--config", (dir_ / "missing.json").string(), "--out", (dir_ / "t").string()}).code, 3);
}

TEST_F(CliTest, SimulateWritesArtifacts) {
    const fs::path out = dir_ / "fig3";
    const Outcome o = run({"simulate", "fig3", "--out", out.string()});
    ASSERT_EQ(o.code, 0) << o.err;
    for (const char* f : {"trace.csv", "final_state.json", "manifest.json"}) EXPECT_TRUE(fs::exists(out / f)) << f;
    const Json m = Json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(m["command"], "simulate");
    EXPECT_EQ(m["version"], "1.0.0");
    EXPECT_EQ(m["config"]["scenario"], "fig3");
    EXPECT_EQ(m["summary"]["clusters"].dump(), "[[1,2,3,4,5],[6,7,8]]");
    EXPECT_TRUE(m.contains("wall_clock_seconds"));
    const std::string trace = slurp(out / "trace.csv");
    EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), static_cast<long>(m["config"]["steps"].get<std::size_t>()) + 1);
}

TEST_F(CliTest, Fig4WritesProjectionAndSurface) {
    const fs::path out = dir_ / "fig4";
    ASSERT_EQ(run({"simulate", "fig4", "--steps", "50", "--out", out.string()}).code, 0);
    for (const char* f : {"trace.csv", "projection.csv", "surface.csv", "final_state.json", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
}

TEST_F(CliTest, RerunFromManifestIsByteIdentical) {
    const fs::path a = dir_ / "a", b = dir_ / "b";
    ASSERT_EQ(run({"simulate", "fig2", "--seed", "9", "--steps", "300", "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"simulate", "fig2", "--config", (a / "manifest.json").string(), "--out", b.string()}).code, 0);
    EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
    EXPECT_EQ(slurp(a / "final_state.json"), slurp(b / "final_state.json"));
    Json ma = Json::parse(slurp(a / "manifest.json")), mb = Json::parse(slurp(b / "manifest.json"));
    ma.erase("wall_clock_seconds");
    mb.erase("wall_clock_seconds");
    EXPECT_EQ(ma, mb);
}

TEST_F(CliTest, ScenarioConfigMismatchRejected) {
    const fs::path a = dir_ / "a";
    ASSERT_EQ(run({"simulate", "fig2", "--steps", "5", "--out", a.string()}).code, 0);
    EXPECT_EQ(run({"simulate", "fig3", "--config", (a / "manifest.json").string(), "--out", (dir_ / "b").string()}).code,
              2);
}

TEST_F(CliTest, BenchSmall) {
    const Outcome o = run({"bench", "--n", "64,128", "--k", "4", "--reps", "1", "--out", (dir_ / "bench").string()});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json j = Json::parse(o.out);
    EXPECT_EQ(j["points"].size(), 2u);
    EXPECT_TRUE(j["exponent"].is_number());
    EXPECT_TRUE(fs::exists(dir_ / "bench" / "bench.csv"));
}
