#include <charconv>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "gsa/config.hpp"
#include "gsa/errors.hpp"
#include "gsa/runner.hpp"
#include "gsa/scenarios.hpp"

namespace {

struct Args {
    std::string config_path;
    std::string scenario;
    std::vector<std::string> settings;
    std::optional<std::string> output;
    std::optional<double> dt;
    std::optional<double> horizon;
    bool check = false;
    bool quiet = false;
    int jobs = 1;
};

gsa::RunConfig load(const Args& a) {
    if (!a.config_path.empty() && !a.scenario.empty())
        throw gsa::ConfigError("--scenario", "give either --config or --scenario, not both");
    gsa::RunConfig config;
    if (!a.config_path.empty()) {
        config = gsa::load_config(a.config_path);
    } else if (!a.scenario.empty()) {
        config.scenario = a.scenario;
        gsa::scenario_info(a.scenario);
    } else {
        throw gsa::ConfigError("--config", "a config file (--config) or a scenario id (--scenario) is required");
    }
    for (const auto& s : a.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw gsa::ConfigError("--set", "expected NAME=VALUE, got '" + s + "'");
        const auto name = s.substr(0, eq);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(s.substr(eq + 1), &used);
            if (used != s.size() - eq - 1) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw gsa::ConfigError("--set " + name, "expected a number");
        }
        config.parameters[name] = value;
    }
    gsa::validate_config(config, config.integration);
    return config;
}

gsa::RunnerOptions runner_options(const Args& a) {
    gsa::RunnerOptions o;
    o.output = a.output;
    o.dt = a.dt;
    o.horizon = a.horizon;
    o.check = a.check;
    o.quiet = a.quiet;
    o.jobs = a.jobs;
    return o;
}

void list_scenarios() {
    for (const auto& s : gsa::scenario_catalog()) {
        std::cout << s.id << "  " << s.title << "\n";
        for (const auto& [k, v] : s.defaults) {
            char buf[32];
            const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
            std::cout << "    " << k << " = " << std::string_view(buf, end) << "\n";
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-excitation dynamics of giant superatoms on tight-binding waveguides"};
    app.require_subcommand(1);
    Args args;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "YAML run configuration")->check(CLI::ExistingFile);
        cmd->add_option("--scenario", args.scenario, "built-in scenario id (instead of --config)");
        cmd->add_option("--set", args.settings, "override a scenario parameter, NAME=VALUE (repeatable)");
    };
    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--output", args.output, "output directory (default: config, then $GSA_OUTPUT_DIR)");
        cmd->add_option("--dt", args.dt, "integration step override");
        cmd->add_option("--horizon", args.horizon, "simulated duration override");
        cmd->add_flag("--check", args.check, "exit nonzero when an acceptance criterion fails");
        cmd->add_flag("--quiet", args.quiet, "suppress the per-run log line");
    };

    auto* run = app.add_subcommand("run", "run one configuration and write its report");
    add_common(run);
    add_run_flags(run);
    auto* sweep = app.add_subcommand("sweep", "run every grid point of a configuration's sweep axes");
    add_common(sweep);
    add_run_flags(sweep);
    sweep->add_option("--jobs", args.jobs, "grid points run in parallel")->check(CLI::PositiveNumber);
    auto* list = app.add_subcommand("list-scenarios", "list built-in scenarios and their default parameters");
    auto* validate = app.add_subcommand("validate", "parse and validate a configuration without running it");
    add_common(validate);
    validate->add_flag("--quiet", args.quiet, "print nothing on success");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? gsa::kExitOk : gsa::kExitConfigError;
    }

    try {
        if (list->parsed()) {
            list_scenarios();
            return gsa::kExitOk;
        }
        const auto config = load(args);
        if (validate->parsed()) {
            if (!args.quiet) std::cout << gsa::serialize_config(config);
            return gsa::kExitOk;
        }
        if (run->parsed()) return gsa::run_command(config, runner_options(args), std::cerr);
        if (sweep->parsed()) return gsa::sweep_command(config, runner_options(args), std::cerr);
    } catch (const gsa::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return gsa::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gsa::kExitRuntimeError;
    }
    return gsa::kExitOk;
}
