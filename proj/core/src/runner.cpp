#include "gsa/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "gsa/errors.hpp"
#include "gsa/observables.hpp"
#include "gsa/report.hpp"
#include "gsa/state_io.hpp"

namespace gsa {

namespace fs = std::filesystem;

RunOptions effective_options(const RunConfig& config, const RunnerOptions& options) {
    RunOptions o = config.integration;
    if (options.dt) o.dt = options.dt;
    if (options.horizon) o.horizon = options.horizon;
    if (o.dt && !(*o.dt > 0.0)) throw ConfigError("--dt", "must be positive");
    if (o.horizon && !(*o.horizon > 0.0)) throw ConfigError("--horizon", "must be positive");
    return o;
}

std::string output_directory(const RunConfig& config, const RunnerOptions& options) {
    if (options.output) return *options.output;
    if (config.output.directory) return *config.output.directory;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return "gsa-output";
}

ScenarioReport run_custom(const RunConfig& config, const RunOptions& options) {
    validate_config(config, options);
    const auto& s = *config.system;
    const AssembledSystem sys(s.build());
    const auto& basis = sys.basis();

    ScenarioReport r;
    r.scenario = "custom";
    r.input["scenario"] = "custom";
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    r.input["integration"] = {{"dt", opt(options.dt)},
                              {"horizon", opt(options.horizon)},
                              {"sample_interval", opt(options.sample_interval)}};

    std::vector<std::pair<AtomRef, std::complex<double>>> pattern;
    for (const auto& a : s.initial_state) pattern.push_back({a.atom, a.value});
    const auto init = sys.make_state(pattern, s.initial_time);

    auto& series = r.series;
    std::vector<AtomPattern> targets;
    for (const auto& o : s.observables) {
        series.add(o.name);
        AtomPattern t;
        for (const auto& a : o.target) t.push_back({a.atom, a.value});
        targets.push_back(std::move(t));
    }

    PropagationOptions popts;
    if (options.dt) popts.dt = *options.dt;
    popts.sample_interval = options.sample_interval.value_or(0.0);
    const double t_end = s.initial_time + *options.horizon;
    const auto result = propagate(sys, init, t_end, popts,
                                  [&](const SystemState& st, const std::vector<AbsorbedProbability>& absorbed) {
                                      series.time.push_back(st.time);
                                      for (std::size_t i = 0; i < s.observables.size(); ++i) {
                                          const auto& o = s.observables[i];
                                          double v = 0.0;
                                          if (o.kind == "fidelity") v = fidelity(basis, st, targets[i]);
                                          else if (o.kind == "population")
                                              v = std::norm(st.amplitudes[static_cast<Eigen::Index>(basis.atom_index(o.atoms[0]))]);
                                          else if (o.kind == "coherence_re")
                                              v = coherence(basis, st, o.atoms[0], o.atoms[1]).real();
                                          else if (o.kind == "coherence_im")
                                              v = coherence(basis, st, o.atoms[0], o.atoms[1]).imag();
                                          else if (o.kind == "superatom_population")
                                              v = superatom_amplitudes(basis, st, o.gsa).squaredNorm();
                                          else if (o.kind == "atom_population") v = atom_population(basis, st);
                                          else if (o.kind == "field_population") v = field_population(basis, st, o.waveguide);
                                          else if (o.kind == "left_fraction")
                                              v = directional_fractions(basis, st, o.waveguide, o.pivot).left;
                                          else if (o.kind == "right_fraction")
                                              v = directional_fractions(basis, st, o.waveguide, o.pivot).right;
                                          else if (o.kind == "absorbed_left")
                                              v = absorbed[basis.chain_position(o.waveguide)].left;
                                          else if (o.kind == "absorbed_right")
                                              v = absorbed[basis.chain_position(o.waveguide)].right;
                                          else if (o.kind == "norm") v = st.norm();
                                          series.values[i].push_back(v);
                                      }
                                  });

    r.metrics["t_start"] = s.initial_time;
    r.metrics["t_end"] = result.final_state.time;
    r.metrics["dt"] = options.dt.value_or(sys.default_dt());
    r.metrics["steps"] = result.steps;
    r.metrics["final_norm"] = result.final_state.norm();
    r.metrics["basis_size"] = basis.size();
    for (std::size_t i = 0; i < s.observables.size(); ++i) {
        const auto& v = series.values[i];
        r.metrics["final_" + s.observables[i].name] = v.back();
    }
    for (const auto& c : s.checks) {
        const auto& v = series.column(c.observable);
        double value = v.back();
        if (c.statistic == "min") value = *std::min_element(v.begin(), v.end());
        if (c.statistic == "max") value = *std::max_element(v.begin(), v.end());
        bool ok = false;
        if (c.relation == ">=") ok = value >= c.threshold;
        if (c.relation == "<=") ok = value <= c.threshold;
        if (c.relation == ">") ok = value > c.threshold;
        if (c.relation == "<") ok = value < c.threshold;
        r.criteria.push_back({c.id, 0, c.statistic + " of " + c.observable, value, c.relation, c.threshold, ok});
    }
    r.basis = basis;
    r.final_state = result.final_state;
    return r;
}

ScenarioReport execute(const RunConfig& config, const RunOptions& options) {
    if (config.is_custom()) return run_custom(config, options);
    return run_scenario(config.scenario, config.parameters, options);
}

namespace {

struct Outcome {
    ScenarioReport report;
    double seconds = 0.0;
};

Outcome timed_execute(const RunConfig& config, const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out{execute(config, options), 0.0};
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::string summary_line(const std::string& label, const Outcome& o, const std::string& path) {
    std::size_t passed = 0;
    for (const auto& c : o.report.criteria) passed += c.passed;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f", o.seconds);
    std::ostringstream line;
    line << label << ": " << (o.report.passed() ? "PASS" : "FAIL") << " (" << passed << "/"
         << o.report.criteria.size() << " criteria) in " << secs << " s -> " << path;
    for (const auto& c : o.report.criteria)
        if (!c.passed) line << "\n  failed " << c.id << ": " << c.value << " " << c.relation << " " << c.threshold;
    return line.str();
}

void budget_warning(const RunConfig& config, const Outcome& o, std::ostream& log) {
    if (config.is_custom()) return;
    const double budget = scenario_info(config.scenario).budget_seconds;
    if (o.seconds > budget)
        log << "warning: " << config.scenario << " took " << o.seconds << " s, over its soft budget of " << budget
            << " s\n";
}

std::string write_outputs(const std::string& dir, const RunConfig& config, const ScenarioReport& report) {
    const auto path = write_report(dir, report);
    write_file_atomic((fs::path(dir) / "config.yaml").string(), serialize_config(config));
    if (config.output.state_dump && report.final_state && report.basis) {
        std::ostringstream bin(std::ios::binary);
        write_state(bin, *report.basis, *report.final_state);
        write_file_atomic((fs::path(dir) / "state.bin").string(), bin.str());
    }
    return path;
}

}  // namespace

int run_command(const RunConfig& config, const RunnerOptions& options, std::ostream& log) {
    const auto opts = effective_options(config, options);
    validate_config(config, opts);
    const auto dir = output_directory(config, options);
    const auto outcome = timed_execute(config, opts);
    const auto path = write_outputs(dir, config, outcome.report);
    if (!options.quiet) log << summary_line(config.scenario, outcome, path) << "\n";
    budget_warning(config, outcome, log);
    return options.check && !outcome.report.passed() ? kExitCheckFailed : kExitOk;
}

int sweep_command(const RunConfig& config, const RunnerOptions& options, std::ostream& log) {
    if (config.sweep.empty()) throw ConfigError("sweep", "the config defines no sweep axes");
    const auto points = expand_sweep(config);
    std::vector<RunOptions> opts;
    for (const auto& p : points) {
        opts.push_back(effective_options(p.config, options));
        validate_config(p.config, opts.back());
    }
    const auto dir = output_directory(config, options);
    const int width = std::max<int>(4, static_cast<int>(std::to_string(points.size()).size()));

    std::vector<std::optional<Outcome>> outcomes(points.size());
    std::vector<std::string> paths(points.size());
    std::vector<std::string> errors(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        while (true) {
            const auto i = next++;
            if (i >= points.size()) return;
            char name[32];
            std::snprintf(name, sizeof name, "point_%0*zu", width, i);
            try {
                auto outcome = timed_execute(points[i].config, opts[i]);
                paths[i] = std::string(name) + "/report.json";
                write_outputs((fs::path(dir) / name).string(), points[i].config, outcome.report);
                std::lock_guard lock(log_mutex);
                if (!options.quiet) log << summary_line(name, outcome, (fs::path(dir) / paths[i]).string()) << "\n";
                budget_warning(config, outcome, log);
                outcomes[i] = std::move(outcome);
            } catch (const std::exception& e) {
                std::lock_guard lock(log_mutex);
                errors[i] = e.what();
                log << name << ": ERROR " << e.what() << "\n";
            }
        }
    };
    const int jobs = std::clamp(options.jobs, 1, static_cast<int>(points.size()));
    std::vector<std::thread> threads;
    for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    nlohmann::ordered_json index;
    index["scenario"] = config.scenario;
    auto axes = nlohmann::ordered_json::array();
    for (const auto& a : config.sweep) axes.push_back(a.path);
    index["axes"] = axes;
    auto entries = nlohmann::ordered_json::array();
    std::ostringstream csv;
    csv << "index";
    for (const auto& a : config.sweep) csv << ',' << a.path;
    csv << ",report,passed\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        nlohmann::ordered_json e;
        e["index"] = i;
        nlohmann::ordered_json coords;
        for (std::size_t a = 0; a < config.sweep.size(); ++a) coords[config.sweep[a].path] = points[i].coordinates[a];
        e["coordinates"] = coords;
        const bool ok = outcomes[i] && outcomes[i]->report.passed();
        all_ok = all_ok && ok;
        if (outcomes[i]) {
            e["report"] = paths[i];
            e["passed"] = ok;
        } else {
            e["error"] = errors[i];
        }
        entries.push_back(e);
        csv << i;
        for (double v : points[i].coordinates) csv << ',' << format_double(v);
        csv << ',' << paths[i] << ',' << (ok ? "true" : "false") << '\n';
    }
    index["points"] = entries;
    write_file_atomic((fs::path(dir) / "index.json").string(), index.dump(2) + "\n");
    write_file_atomic((fs::path(dir) / "index.csv").string(), csv.str());
    if (std::any_of(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); }))
        return kExitRuntimeError;
    return options.check && !all_ok ? kExitCheckFailed : kExitOk;
}

}  // namespace gsa
