#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "common.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("blochpdc_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// env is a prefix such as "BLOCHPDC_OUT=x"; stderr is captured.
Result run(const std::string& args, const std::string& env = "") {
    const fs::path err = fs::temp_directory_path() / "blochpdc_cli_stderr.txt";
    const std::string cmd =
        "env -u BLOCHPDC_OUT -u BLOCHPDC_THREADS -u BLOCHPDC_RESOLUTION -u BLOCHPDC_WINDOW -u BLOCHPDC_PROCESS " + env +
        " " + BLOCHPDC_CLI + " " + args + " >/dev/null 2>" + err.string();
    const int st = std::system(cmd.c_str());
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(err)};
}

std::string cfg(const char* name) { return "--config " + blochpdc::fixture::source_path(std::string("configs/") + name); }

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> m;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) m[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return m;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST(Cli, BandWritesGridAndMetadata) {
    const auto out = scratch("band");
    const auto r = run("band " + cfg("illustrative.cfg") + " --resolution 32 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(out / "band_te.csv"));
    EXPECT_TRUE(fs::exists(out / "band_tm.csv"));
    const auto meta = read_json(out / "band.json");
    EXPECT_FALSE(meta.empty());
    // header plus one row per cell
    std::ifstream in(out / "band_te.csv");
    int lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    EXPECT_EQ(lines, 1 + 32 * 32);
}

TEST(Cli, ModesAndSurface) {
    const auto out = scratch("modes");
    ASSERT_EQ(run("modes " + cfg("illustrative.cfg") + " --window 8 --out " + out.string()).code, 0);
    const auto idx = read_json(out / "modes.json");
    ASSERT_EQ(idx.at("modes").size(), 2u);
    ASSERT_EQ(run("surface " + cfg("illustrative.cfg") + " --out " + out.string()).code, 0);
    EXPECT_TRUE(fs::exists(out / "surface.json"));
}

TEST(Cli, IntersectReportsTwoPairs) {
    const auto out = scratch("intersect");
    const auto r = run("intersect " + cfg("algaas_air.cfg") + " --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = read_json(out / "intersect.json");
    EXPECT_FALSE(j.at("rings_coincide").get<bool>());
    EXPECT_GE(j.at("pairs").size(), 2u);
    EXPECT_EQ(j.at("pairs")[0].at("terms").size(), 2u);
}

TEST(Cli, EfficiencyReportsRatio) {
    const auto out = scratch("efficiency");
    ASSERT_EQ(run("efficiency " + cfg("algaas_air.cfg") + " --out " + out.string()).code, 0);
    const auto j = read_json(out / "efficiency.json");
    EXPECT_GT(j.at("ratio_vs_reference").get<double>(), 1.0);
    EXPECT_EQ(j.at("amplitudes").size(), 4u);
}

TEST(Cli, OutputsByteIdenticalAcrossRunsAndThreads) {
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    const std::string common = cfg("algaas_air.cfg") + " --resolution 40 --process II";
    for (const char* sub : {"band", "emission"}) {
        ASSERT_EQ(run(std::string(sub) + " " + common + " --threads 1 --out " + a.string()).code, 0);
        ASSERT_EQ(run(std::string(sub) + " " + common + " --threads 1 --out " + b.string()).code, 0);
        ASSERT_EQ(run(std::string(sub) + " " + common + " --threads 8 --out " + c.string()).code, 0);
    }
    const auto ta = tree(a);
    EXPECT_GE(ta.size(), 4u);
    EXPECT_EQ(ta, tree(b));
    EXPECT_EQ(ta, tree(c));
}

TEST(Cli, BadConfigGivesErrorJson) {
    const auto dir = scratch("badcfg");
    {
        std::ofstream f(dir / "bad.cfg");
        f << R"({"materials": {"m": {"index": {"constant": 1.5}}},
                "structure": {"layer_a": {"material": "m", "thickness_nm": -5},
                              "layer_b": {"material": "m", "thickness_nm": 10}, "periods": 2},
                "bogus": 1})";
    }
    const auto r = run("band --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string());
    EXPECT_NE(r.code, 0);
    const auto j = nlohmann::json::parse(r.err);
    EXPECT_EQ(j.at("error"), "ConfigError");
    EXPECT_EQ(j.at("subcommand"), "band");
    EXPECT_EQ(j.at("violations").size(), 2u);
    EXPECT_NE(j.at("message").get<std::string>().find("structure.layer_a.thickness_nm"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST(Cli, MissingConfigFile) {
    const auto r = run("band --config /nonexistent/x.cfg");
    EXPECT_NE(r.code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.err).at("error"), "ConfigError");
}

TEST(Cli, RejectsBadFlags) {
    EXPECT_NE(run("emission " + cfg("algaas_air.cfg") + " --process IV").code, 0);
    EXPECT_NE(run("band " + cfg("algaas_air.cfg") + " --threads -1").code, 0);
    EXPECT_NE(run(cfg("algaas_air.cfg")).code, 0);
}

TEST(Cli, FlagBeatsEnvironmentBeatsConfig) {
    const auto env_dir = scratch("env"), flag_dir = scratch("flag");
    fs::remove_all(env_dir);
    fs::remove_all(flag_dir);
    const std::string args = "surface " + cfg("illustrative.cfg");
    ASSERT_EQ(run(args, "BLOCHPDC_OUT=" + env_dir.string()).code, 0);
    EXPECT_TRUE(fs::exists(env_dir / "surface.json"));
    fs::remove_all(env_dir);
    ASSERT_EQ(run(args + " --out " + flag_dir.string(), "BLOCHPDC_OUT=" + env_dir.string()).code, 0);
    EXPECT_TRUE(fs::exists(flag_dir / "surface.json"));
    EXPECT_FALSE(fs::exists(env_dir));
}

TEST(Cli, EnvironmentSetsResolution) {
    const auto out = scratch("envres");
    ASSERT_EQ(run("band " + cfg("illustrative.cfg") + " --out " + out.string(), "BLOCHPDC_RESOLUTION=8").code, 0);
    std::ifstream in(out / "band_te.csv");
    int lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    EXPECT_EQ(lines, 1 + 8 * 8);
}
