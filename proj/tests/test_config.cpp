#include <algorithm>
#include <filesystem>

#include <gtest/gtest.h>

#include "common.hpp"

using namespace blochpdc;

namespace {

const char* kMinimal = R"({
  "materials": {"m1": {"index": {"constant": 1.5}}, "m2": {"index": {"constant": 2.0}}},
  "structure": {"layer_a": {"material": "m1", "thickness_nm": 100},
                "layer_b": {"material": "m2", "thickness_nm": 80}, "periods": 4}
})";

std::vector<std::string> violations(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.violations;
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

std::string patched(const std::string& from, const std::string& to) {
    std::string s = kMinimal;
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Config, BundledConfigsParse) {
    const auto a = parse_config(fixture::source_path("configs/algaas_air.cfg"));
    EXPECT_DOUBLE_EQ(a.structure.thickness_a, 123.0);
    EXPECT_DOUBLE_EQ(a.structure.thickness_b, 64.5);
    EXPECT_EQ(a.structure.periods, 15);
    EXPECT_EQ(a.process.type, ProcessType::II);
    EXPECT_EQ(a.process.pump.pol, Polarization::TM);
    EXPECT_EQ(a.process.pump.kx, 0.0);
    EXPECT_NEAR(a.process.pump.ky, 2 * std::numbers::pi / 750 * std::sin(10 * std::numbers::pi / 180), 1e-15);
    EXPECT_EQ(a.modes.size(), 3u);
    EXPECT_TRUE(a.structure.material_a.absorption_edge_nm.has_value());

    const auto b = parse_config(fixture::source_path("configs/illustrative.cfg"));
    EXPECT_DOUBLE_EQ(b.structure.period(), 1000.0);
    EXPECT_EQ(b.band.axes, BandAxes::normalized);
    EXPECT_EQ(b.modes.at(1).query.ky, 0.0003);
}

TEST(Config, MinimalUsesDefaults) {
    const auto c = parse_config_text(kMinimal);
    EXPECT_EQ(c.structure.layers, 8);
    EXPECT_EQ(c.threads, 1u);
    EXPECT_TRUE(c.emission.chi2_weighting);
    EXPECT_EQ(c.emission.processes.size(), 3u);
}

TEST(Config, NegativeThicknessNamesField) {
    const auto v = violations(patched("\"thickness_nm\": 100", "\"thickness_nm\": -5"));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("structure.layer_a.thickness_nm"), std::string::npos) << v[0];
}

TEST(Config, TableAndTableFileAreAmbiguous) {
    const auto v = violations(
        patched("{\"constant\": 1.5}", "{\"table\": [[500, 1.5], [900, 1.4]], \"table_file\": \"x.csv\"}"));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("materials.m1.index"), std::string::npos);
    EXPECT_NE(v[0].find("ambiguous"), std::string::npos);
}

TEST(Config, KParAndAngleAreAmbiguous) {
    std::string s = kMinimal;
    s.insert(s.rfind('}'), ", \"pump\": {\"lambda_nm\": 700, \"k_par_rad_per_nm\": [0, 1e-3], \"incidence_deg\": 5}");
    EXPECT_TRUE(mentions(violations(s), "ambiguous"));
}

TEST(Config, UnknownKeysRejected) {
    std::string s = kMinimal;
    s.insert(s.rfind('}'), ", \"colour\": \"blue\"");
    const auto v = violations(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], "colour: unknown key");
    EXPECT_TRUE(mentions(violations(patched("\"periods\": 4", "\"periods\": 4, \"period\": 3")), "structure.period"));
}

TEST(Config, AllViolationsReported) {
    std::string s = patched("\"thickness_nm\": 80", "\"thickness_nm\": -1");
    s = s.replace(s.find("\"m2\", "), 6, "\"nope\", ");
    s.insert(s.rfind('}'), ", \"threads\": -2, \"fourier_window\": 0, \"band\": {\"axes\": \"polar\"}");
    const auto v = violations(s);
    EXPECT_GE(v.size(), 5u);
    for (const char* f : {"structure.layer_b.thickness_nm", "structure.layer_b.material", "threads", "fourier_window",
                          "band.axes"})
        EXPECT_TRUE(mentions(v, f)) << f;
}

TEST(Config, TypeErrors) {
    EXPECT_TRUE(mentions(violations(patched("\"periods\": 4", "\"periods\": 4.5")), "structure.periods"));
    EXPECT_TRUE(mentions(violations(patched("{\"constant\": 1.5}", "{\"constant\": 0.5}")), ">= 1"));
    EXPECT_TRUE(mentions(violations(patched("\"periods\": 4", "\"periods\": 4, \"layers\": 11")), "structure.layers"));
}

TEST(Config, SignalMustBeLongerThanPump) {
    std::string s = kMinimal;
    s.insert(s.rfind('}'), ", \"pump\": {\"lambda_nm\": 900}, \"process\": {\"lambda_signal_nm\": 800}");
    EXPECT_TRUE(mentions(violations(s), "process.lambda_signal_nm"));
}

TEST(Config, SyntaxAndMissingFile) {
    const auto v = violations("{ \"materials\": ");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rfind("syntax", 0), 0u);
    EXPECT_THROW(parse_config("/nonexistent/run.cfg"), ConfigError);
}

TEST(Config, MissingTableFileIsAConfigError) {
    const auto v = violations(patched("{\"constant\": 1.5}", "{\"table_file\": \"/nonexistent/n.csv\"}"));
    EXPECT_TRUE(mentions(v, "materials.m1.index"));
}

TEST(Config, RelativeTableFileResolvesNextToConfig) {
    const auto dir = std::filesystem::temp_directory_path() / "blochpdc_cfg_test";
    std::filesystem::create_directories(dir);
    std::filesystem::copy_file(fixture::source_path("data/al0.4ga0.6as.csv"), dir / "n.csv",
                               std::filesystem::copy_options::overwrite_existing);
    {
        std::ofstream f(dir / "run.cfg");
        f << patched("{\"constant\": 1.5}", "{\"table_file\": \"n.csv\"}");
    }
    const auto c = parse_config(dir / "run.cfg");
    EXPECT_GT(c.structure.material_a.dispersion(1500), 3.0);
    std::filesystem::remove_all(dir);
}
