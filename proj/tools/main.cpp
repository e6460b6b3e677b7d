// Command-line front end: run, sweep, profile and preset execution.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rptiga/case.hpp"
#include "rptiga/presets.hpp"

namespace fs = std::filesystem;
using namespace rptiga;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

CaseConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    CaseConfig c = case_from_json(j);
    validate(c);
    return c;
}

void prepare_output(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
}

void write_echo(const fs::path& out, const json& j) { write_file(out / "config.echo.json", j.dump(2) + "\n"); }

void cmd_run(const fs::path& config, const fs::path& out) {
    const CaseConfig c = load_config(config);
    prepare_output(out);
    write_echo(out, case_to_json(c));
    const PlateModel model = build_model(c);
    const CaseResult r = run_case(c, model);
    write_file(out / "results.csv", results_csv(c, r));
    if (c.grid > 1 && c.analysis == AnalysisKind::Static) write_file(out / "grid.csv", grid_csv(r.solution, model, c.grid));
}

void cmd_sweep(const fs::path& config, const fs::path& out) {
    const CaseConfig c = load_config(config);
    if (c.sweep_axis.empty() || c.sweep_values.empty())
        throw ConfigError("sweep needs a sweep section with an axis and a nonempty values list");
    prepare_output(out);
    write_echo(out, case_to_json(c));
    write_file(out / "results.csv", sweep_csv(c));
}

void cmd_profile(const fs::path& config, const fs::path& out) {
    const CaseConfig c = load_config(config);
    if (c.analysis != AnalysisKind::Static) throw ConfigError("profile needs a static analysis");
    prepare_output(out);
    write_echo(out, case_to_json(c));
    const StressProfile p = run_profile(c);
    write_file(out / "results.csv", profile_csv(p, c.thickness()));
    write_file(out / "profile.svg", profile_svg(p, c.thickness()));
}

void cmd_presets_list() {
    for (const Preset& p : presets()) {
        const std::size_t n = p.sweep ? p.sweep->sweep_values.size() : p.cases.size();
        std::printf("%-14s %3zu %s  %s\n", p.id.c_str(), n, p.sweep ? "sweep" : "cases", p.description.c_str());
    }
}

void cmd_presets_run(const std::string& id, const fs::path& out) {
    const Preset& p = preset(id);
    prepare_output(out);
    json echo;
    if (p.sweep) {
        echo = case_to_json(*p.sweep);
    } else {
        echo = json::array();
        for (const PresetCase& c : p.cases) echo.push_back({{"label", c.label}, {"config", case_to_json(c.config)}});
    }
    write_echo(out, echo);
    write_file(out / "results.csv", run_preset(p));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Isogeometric refined-plate analysis of functionally graded plates"};
    app.require_subcommand(1);

    fs::path config, out = "out";
    std::string preset_id;

    auto add_case_options = [&](CLI::App* sub) {
        sub->add_option("config", config, "case configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out, "output directory")->capture_default_str();
    };
    CLI::App* run = app.add_subcommand("run", "solve one case");
    add_case_options(run);
    CLI::App* sweep = app.add_subcommand("sweep", "solve a case over the values of one axis");
    add_case_options(sweep);
    CLI::App* profile = app.add_subcommand("profile", "through-thickness stresses of a static case");
    add_case_options(profile);
    CLI::App* pre = app.add_subcommand("presets", "shipped benchmark case sets");
    pre->require_subcommand(1);
    CLI::App* pre_list = pre->add_subcommand("list", "list preset ids");
    CLI::App* pre_run = pre->add_subcommand("run", "run a preset against its reference values");
    pre_run->add_option("id", preset_id, "preset id")->required();
    pre_run->add_option("-o,--out", out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed()) cmd_run(config, out);
        else if (sweep->parsed()) cmd_sweep(config, out);
        else if (profile->parsed()) cmd_profile(config, out);
        else if (pre_list->parsed()) cmd_presets_list();
        else if (pre_run->parsed()) cmd_presets_run(preset_id, out);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error [config]: %s\n", e.what());
        return kExitConfig;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "error [solve]: %s\n", e.what());
        return kExitSolver;
    } catch (const Error& e) {
        std::fprintf(stderr, "error [compute]: %s\n", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [io]: %s\n", e.what());
        return kExitSolver;
    }
}
