#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "rptiga/case.hpp"
#include "rptiga/presets.hpp"

using namespace rptiga;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');) out.push_back(f);
    return out;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rptiga_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "case.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(RPTIGA_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

json static_case() {
    return json::parse(R"({
        "geometry": {"shape": "square", "a": 1.0},
        "thickness": {"a_over_h": 10},
        "material": {"ceramic": "Al2O3", "metal": "Al", "scheme": "rule-of-mixture", "n": 1},
        "shear_model": "model1",
        "boundary": "SSSS",
        "load": {"type": "sinusoidal", "q0": 1.0},
        "analysis": {"type": "static"},
        "report": "ceramic-bending"
    })");
}

}  // namespace

TEST(Config, DefaultsMatchTheStandardMesh) {
    const CaseConfig c = case_from_json(json::object({{"load", {{"type", "uniform"}}}}));
    EXPECT_EQ(c.degree, 3);
    EXPECT_EQ(c.elements, 11);
    EXPECT_EQ(c.z_count, 101);
    EXPECT_EQ(c.boundary, "SSSS");
}

TEST(Config, RoundTripsThroughEcho) {
    for (const Preset& p : presets()) {
        for (const PresetCase& pc : p.cases) {
            const json echo = case_to_json(pc.config);
            EXPECT_EQ(case_to_json(case_from_json(echo)), echo) << pc.label;
        }
        if (p.sweep) EXPECT_EQ(case_to_json(case_from_json(case_to_json(*p.sweep))), case_to_json(*p.sweep));
    }
    json custom = static_case();
    custom["material"]["ceramic"] = {{"E", 3e11}, {"nu", 0.25}, {"rho", 3000}};
    custom["material"]["n"] = "metal";
    const json echo = case_to_json(case_from_json(custom));
    EXPECT_EQ(echo["material"]["ceramic"]["E"], 3e11);
    EXPECT_EQ(echo["material"]["n"], "metal");
}

TEST(Config, ValidationErrors) {
    auto rejects = [](json j, const std::string& needle) {
        try {
            validate(case_from_json(j));
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
            return;
        }
        ADD_FAILURE() << "accepted: " << j.dump();
    };
    json j = static_case();
    j["analysis"] = {{"type", "buckle"}, {"modes", 2}};
    rejects(j, "missing prestress");
    j = static_case();
    j.erase("load");
    rejects(j, "needs a load");
    j = static_case();
    j["material"]["n"] = -1;
    rejects(j, "power index");
    j = static_case();
    j["boundary"] = "SSQS";
    rejects(j, "edge condition");
    j = static_case();
    j["shear_model"] = "mindlin";
    rejects(j, "shear model");
    j = static_case();
    j["degree"] = 1;
    rejects(j, "degree");
    j = static_case();
    j["thickness"] = {{"h_over_r", 0.1}};
    rejects(j, "a_over_h");
    j = static_case();
    j["material"]["metal"] = "Ti";
    rejects(j, "material preset");
    j = static_case();
    j["elements"] = "many";
    rejects(j, "malformed");
    j = static_case();
    j["analysis"] = {{"type", "vibrate"}};
    j["material"]["ceramic"] = "SiC";  // no density
    rejects(j, "densities");
}

TEST(Run, StaticSchemaAndDeterminism) {
    const CaseConfig c = case_from_json(static_case());
    const std::string a = results_csv(c, run_case(c)), b = results_csv(c, run_case(c));
    EXPECT_EQ(a, b);
    const auto rows = lines(a);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "w_bar,sigma_x_bar,w_center,sigma_x");
    EXPECT_NE(rows[1].find("e-01"), std::string::npos);  // %.6e formatting
}

TEST(Run, VibrationRowsAscend) {
    json j = static_case();
    j["material"] = {{"ceramic", "ZrO2-1"}, {"metal", "Al"}, {"scheme", "mori-tanaka"}, {"n", 1}};
    j["analysis"] = {{"type", "vibrate"}, {"modes", 10}};
    j["report"] = "frequency";
    j["elements"] = 7;
    const CaseConfig c = case_from_json(j);
    const auto rows = lines(results_csv(c, run_case(c)));
    ASSERT_EQ(rows.size(), 11u);
    EXPECT_EQ(rows[0], "mode,omega,omega_bar");
    double last = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double w = std::stod(fields(rows[i])[2]);
        EXPECT_GE(w, last);
        last = w;
        EXPECT_EQ(fields(rows[i])[0], std::to_string(i));
    }
}

TEST(Sweep, ModelAxisCoversAllShearFunctions) {
    json j = static_case();
    j["elements"] = 6;
    j["sweep"] = {{"axis", "model"}, {"values", {"reddy", "karama", "arya", "nguyen-xuan", "model1", "model2"}}};
    const auto rows = lines(sweep_csv(case_from_json(j)));
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0], "axis,value,w_bar,sigma_x_bar,w_center,sigma_x");
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(fields(rows[i]).size(), 6u);
}

TEST(Sweep, MeshAxisReportsRelativeChange) {
    json j = static_case();
    j["sweep"] = {{"axis", "mesh"}, {"values", {4, 6, 8}}};
    const auto rows = lines(sweep_csv(case_from_json(j)));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(fields(rows[0]).back(), "rel_change");
    EXPECT_EQ(fields(rows[1]).size(), 6u);  // empty trailing change on the first row
    EXPECT_LT(std::stod(fields(rows[3])[6]), 1e-3);
    j["sweep"] = {{"axis", "colour"}, {"values", {1}}};
    EXPECT_THROW(sweep_csv(case_from_json(j)), ConfigError);
    j["sweep"] = {{"axis", "mesh"}, {"values", json::array()}};
    EXPECT_THROW(sweep_csv(case_from_json(j)), ConfigError);
}

TEST(Profile, SurfaceRowsHaveNoTransverseShear) {
    json j = static_case();
    j["thickness"] = {{"a_over_h", 4}};
    for (double n : {1.0, 10.0}) {
        j["material"]["n"] = n;
        const CaseConfig c = case_from_json(j);
        const auto rows = lines(profile_csv(run_profile(c), c.thickness()));
        ASSERT_EQ(rows.size(), 102u);
        EXPECT_EQ(rows[0], "z_over_h,sigma_x,sigma_y,tau_xy,tau_xz,tau_yz");
        EXPECT_EQ(fields(rows[1])[0], "-5.000000e-01");
        EXPECT_EQ(fields(rows[101])[0], "5.000000e-01");
        EXPECT_LT(std::abs(std::stod(fields(rows[1])[4])), 1e-9);
        EXPECT_LT(std::abs(std::stod(fields(rows[101])[4])), 1e-9);
    }
}

TEST(Presets, CoverEveryReferenceCase) {
    std::set<std::string> ids;
    for (const Preset& p : presets()) ids.insert(p.id);
    for (const char* id : {"table3", "table4", "table5", "table6", "table7", "thin-buckling", "convergence", "locking"})
        EXPECT_TRUE(ids.count(id)) << id;
    EXPECT_EQ(preset("table3").cases.size(), 27u);
    EXPECT_EQ(preset("table4").cases.size(), 42u);
    EXPECT_EQ(preset("table5").cases.size(), 14u);
    EXPECT_EQ(preset("table6").cases.size(), 6u);
    EXPECT_EQ(preset("table7").cases.size(), 40u);
    for (const char* label : {"table3/model1/n=1/a_h=4", "table3/model2/n=1/a_h=4", "table3/model1/n=10/a_h=10",
                              "table3/reddy/n=4/a_h=100", "table4/SSSS/model1/n=1", "table4/CCCC/model1/n=ceramic",
                              "table4/SFSF/model1/n=metal", "table5/model2/n=1", "table5/model1/n=0",
                              "table6/model1/a_h=10", "table7/model1/n=0/h_R=0.1", "table7/model1/n=2/h_R=0.2",
                              "table7/model2/n=5/h_R=0.25", "thin-buckling/model1/h_R=0.01"})
        EXPECT_NO_THROW(preset_case(label)) << label;
    for (const Preset& p : presets())
        for (const PresetCase& pc : p.cases) {
            EXPECT_NO_THROW(validate(pc.config)) << pc.label;
            EXPECT_FALSE(pc.expected.empty()) << pc.label;
        }
    EXPECT_NEAR(preset_case("thin-buckling/model1/h_R=0.01").expected[0].value, 14.6820, 1e-4);
    EXPECT_THROW(preset("table9"), ConfigError);
}

TEST(Binary, RunWritesResultsAndEcho) {
    const fs::path dir = scratch("run");
    const fs::path cfg = write_config(dir, static_case());
    ASSERT_EQ(cli("run " + cfg.string() + " -o " + (dir / "out").string()), 0);
    const std::string first = slurp(dir / "out" / "results.csv");
    EXPECT_EQ(lines(first).size(), 2u);
    ASSERT_TRUE(fs::exists(dir / "out" / "config.echo.json"));
    // the echo re-runs to byte-identical results
    ASSERT_EQ(cli("run " + (dir / "out" / "config.echo.json").string() + " -o " + (dir / "again").string()), 0);
    EXPECT_EQ(slurp(dir / "again" / "results.csv"), first);
    EXPECT_EQ(slurp(dir / "again" / "config.echo.json"), slurp(dir / "out" / "config.echo.json"));
}

TEST(Binary, ExitCodes) {
    const fs::path dir = scratch("codes");
    json j = static_case();
    j["analysis"] = {{"type", "buckle"}};
    EXPECT_EQ(cli("run " + write_config(dir, j).string() + " -o " + (dir / "o").string()), 2);
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_EQ(cli("run " + (dir / "bad.json").string() + " -o " + (dir / "o").string()), 2);
    EXPECT_EQ(cli("run " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(cli("frobnicate"), 2);
    EXPECT_EQ(cli("presets run table9 -o " + (dir / "o").string()), 2);
    j = static_case();
    j["boundary"] = "FFFF";
    EXPECT_EQ(cli("run " + write_config(dir, j).string() + " -o " + (dir / "o").string()), 3);
    EXPECT_EQ(cli("sweep " + write_config(dir, static_case()).string() + " -o " + (dir / "o").string()), 2);
}

TEST(Binary, ProfileWritesChart) {
    const fs::path dir = scratch("profile");
    json j = static_case();
    j["profile"] = {{"station", {0.5, 0.5}}, {"z_count", 11}};
    ASSERT_EQ(cli("profile " + write_config(dir, j).string() + " -o " + dir.string()), 0);
    EXPECT_EQ(lines(slurp(dir / "results.csv")).size(), 12u);
    EXPECT_NE(slurp(dir / "profile.svg").find("<svg"), std::string::npos);
}

TEST(Binary, PresetsListAndRun) {
    const fs::path dir = scratch("presets");
    EXPECT_EQ(cli("presets list"), 0);
    ASSERT_EQ(cli("presets run thin-buckling -o " + dir.string()), 0);
    const auto rows = lines(slurp(dir / "results.csv"));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "case,quantity,computed,expected,rel_error");
    EXPECT_LT(std::stod(fields(rows[1])[4]), 0.01);
}
