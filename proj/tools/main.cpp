#include "kirchlog/experiment.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace kirchlog;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Flags {
    std::string config;
    std::optional<long long> seed;
    std::string out = "out";
    std::optional<int> gridN;
    bool quiet = false;
};

ExperimentConfig load(const Flags& f) {
    ConfigMap map = f.config.empty() ? ConfigMap{} : load_config_file(f.config);
    if (f.seed) map.set("seed", std::to_string(*f.seed));
    if (f.gridN) map.set("grid.N", std::to_string(*f.gridN));
    return build_config(map);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string digest(const std::string& cmd, const json& j) {
    if (cmd == "constants") {
        const auto& c = j["constants"];
        return "S = " + fmt(c["S"]) + ", S1 = " + fmt(c["S1"]) + ", betaGN = " + fmt(c["betaGN"]) +
               ", theta = " + fmt(c["theta"]);
    }
    if (cmd == "well") return "d = " + fmt(j["d"]);
    if (cmd == "ground-state")
        return "J* = " + fmt(j["JStar"]) + ", residual = " + fmt(j["stationarityResidual"]);
    if (cmd == "classify") {
        const auto& c = j["classification"];
        return "regime " + c["regime"].get<std::string>() + " (J0 = " + fmt(c["J0"]) +
               ", I0 = " + fmt(c["I0"]) + ", d = " + fmt(c["d"]) + ")";
    }
    if (cmd == "simulate")
        return "regime " + j["classification"]["regime"].get<std::string>() + ", outcome " +
               j["outcome"]["kind"].get<std::string>();
    if (cmd == "sweep") return std::to_string(j["cells"].size()) + " cells";
    return "";
}

void report_failure(const std::string& cmd, const Flags& f, const std::exception& e,
                    const char* type) {
    json diag{{"status", "error"}, {"command", cmd}, {"type", type}, {"message", e.what()}};
    std::cerr << diag.dump(2) << '\n';
    try {
        std::filesystem::create_directories(f.out);
        std::ofstream(std::filesystem::path(f.out) / "error.json") << diag.dump(2) << '\n';
    } catch (...) {
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Potential-well laboratory for a pseudo-parabolic Kirchhoff equation with "
                 "logarithmic source"};
    app.require_subcommand(1);
    app.set_version_flag("--version", library_version());

    Flags flags;
    app.add_option("--config", flags.config, "configuration file (key = value or JSON)")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", flags.seed, "random seed (overrides the config)");
    app.add_option("--out", flags.out, "output directory")->capture_default_str();
    app.add_option("--grid-n", flags.gridN, "number of interior grid nodes (overrides the config)");
    app.add_flag("--quiet", flags.quiet, "print nothing on success");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"constants", "estimate the discrete embedding constants"},
        {"well", "compute the well depth d and the curve d(delta)"},
        {"ground-state", "compute and polish the ground state"},
        {"classify", "classify the configured initial data"},
        {"simulate", "evolve the configured initial data and check the bounds"},
        {"sweep", "run a parameter sweep and write the phase map"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    ExperimentConfig cfg;
    try {
        cfg = load(flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        json report;
        if (cmd == "constants")
            report = cmd_constants(cfg, flags.out);
        else if (cmd == "well")
            report = cmd_well(cfg, flags.out);
        else if (cmd == "ground-state")
            report = cmd_ground_state(cfg, flags.out);
        else if (cmd == "classify")
            report = cmd_classify(cfg, flags.out);
        else if (cmd == "simulate")
            report = cmd_simulate(cfg, flags.out);
        else
            report = cmd_sweep(cfg, flags.out);
        if (!flags.quiet) std::cout << cmd << ": " << digest(cmd, report) << " -> " << flags.out << '\n';
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        report_failure(cmd, flags, e, "numerical");
        return kExitRuntime;
    } catch (const std::exception& e) {
        report_failure(cmd, flags, e, "internal");
        return kExitRuntime;
    }
    return 0;
}
