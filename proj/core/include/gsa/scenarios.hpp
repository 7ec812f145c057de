#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsa/dynamics.hpp"

namespace gsa {

/// Scalar scenario parameters by name. Energies are in units of the scenario's reference
/// coupling g, times in units of 1/g.
using ParameterSet = std::map<std::string, double>;

/// Integration overrides; unset fields take the scenario defaults.
struct RunOptions {
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<double> sample_interval;
    bool operator==(const RunOptions&) const = default;
};

/// One pass/fail check. `acceptance` names the acceptance criterion the check feeds.
struct Criterion {
    std::string id;
    int acceptance = 0;
    std::string description;
    double value = 0.0;
    std::string relation;  // ">=", "<=", ">", "<"
    double threshold = 0.0;
    bool passed = false;
};

struct TimeSeries {
    std::vector<std::string> names;
    std::vector<double> time;
    std::vector<std::vector<double>> values;  // values[observable][sample]

    std::size_t add(std::string name);
    const std::vector<double>& column(const std::string& name) const;
};

/// A named table of numbers written next to the report (field profiles, density matrices).
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ScenarioReport {
    std::string scenario;
    nlohmann::ordered_json input;    // parameters and integration overrides, enough to re-run
    nlohmann::ordered_json metrics;  // derived numbers
    TimeSeries series;
    std::map<std::string, Table> tables;
    std::vector<Criterion> criteria;
    std::vector<std::string> warnings;
    // Final state of the main propagation, when the scenario has one.
    std::optional<Basis> basis;
    std::optional<SystemState> final_state;

    bool passed() const;
    const Criterion& criterion(const std::string& id) const;
    nlohmann::ordered_json to_json() const;
};

struct ScenarioInfo {
    std::string id;
    std::string title;
    ParameterSet defaults;
    double default_horizon;  // 0: derived from the parameters
    double default_sample_interval;
    double budget_seconds;   // soft wall-clock budget
};

const std::vector<ScenarioInfo>& scenario_catalog();
/// Throws ConfigError for an unknown id.
const ScenarioInfo& scenario_info(const std::string& id);

/// Defaults overlaid with `overrides`; unknown names are ConfigErrors.
ParameterSet resolve_parameters(const std::string& id, const ParameterSet& overrides);

ScenarioReport run_scenario(const std::string& id, const ParameterSet& overrides = {},
                            const RunOptions& options = {});

/// Dark and bright entangled states of a pair superatom with two coupling points.
ScenarioReport run_s1_dark_states(const ParameterSet& overrides = {}, const RunOptions& options = {});
/// Decoherence-free transfer (detuning 0) or swap (detuning 2J) between braided pair superatoms.
ScenarioReport run_s2_df_transfer(const ParameterSet& overrides = {}, const RunOptions& options = {});
/// Giant-atom excitation injected into the left edge state of an SSH superatom.
ScenarioReport run_s3_ssh_injection(const ParameterSet& overrides = {}, const RunOptions& options = {});
/// Chiral pitch-catch transfer of an entangled state between separate superatoms.
ScenarioReport run_s4_chiral_transfer(const ParameterSet& overrides = {}, const RunOptions& options = {});
/// Opposite-direction routing of the two dressed components into a W-class state.
ScenarioReport run_s5_w_state(const ParameterSet& overrides = {}, const RunOptions& options = {});
/// Effective lattice of entangled dressed states: ballistic spread and Bloch revival.
ScenarioReport run_s6_entanglement_lattice(const ParameterSet& overrides = {}, const RunOptions& options = {});
/// Band-selective emission of a trimer superatom coupled to two waveguides.
ScenarioReport run_s7_dual_waveguide(const ParameterSet& overrides = {}, const RunOptions& options = {});

/// Exact dense propagation e^{-iHt} v for a Hermitian matrix.
Eigen::VectorXcd dense_evolve(const Eigen::MatrixXcd& hamiltonian, const Eigen::VectorXcd& initial, double t);

}  // namespace gsa
