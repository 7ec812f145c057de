#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "gsa/dynamics.hpp"
#include "gsa/scenarios.hpp"

namespace gsa {

struct AmplitudeConfig {
    AtomRef atom;
    std::complex<double> value;
    bool operator==(const AmplitudeConfig&) const = default;
};

/// Superatom as written in a config: `type` is single, pair, trimer, ssh or custom.
struct SuperatomConfig {
    std::string id;
    std::string type;
    std::vector<double> frequencies;
    double J = 0.0;
    int cells = 0;
    double J1 = 0.0;
    double J2 = 0.0;
    std::vector<std::vector<double>> couplings;

    SuperatomSpec build() const;
    bool operator==(const SuperatomConfig&) const = default;
};

struct CouplingConfig {
    CouplingPoint point;
    bool propagating = false;  // every dressed mode reaching this point must lie inside the band
    bool operator==(const CouplingConfig&) const = default;
};

/// Schedule as written in a config; absorb ramps name an emit partner and the delay tau.
struct ScheduleConfig {
    std::string id;
    ScheduleKind kind = ScheduleKind::Constant;
    double g_max = 1.0;
    double beta = 0.0;
    double t_ref = 0.0;
    double epsilon = 1e-3;
    std::string partner;
    double tau = 0.0;
    bool operator==(const ScheduleConfig&) const = default;
};

/// Observable recorded at every sample of a custom run.
///   fidelity (target), population (atoms[0]), coherence_re / coherence_im (atoms[0], atoms[1]),
///   superatom_population (gsa), atom_population, field_population (waveguide),
///   left_fraction / right_fraction (waveguide, pivot), absorbed_left / absorbed_right (waveguide), norm.
struct ObservableConfig {
    std::string name;
    std::string kind;
    std::vector<AtomRef> atoms;
    std::string gsa;
    std::string waveguide;
    double pivot = 0.0;
    std::vector<AmplitudeConfig> target;
    bool operator==(const ObservableConfig&) const = default;
};

/// Pass/fail check on a recorded observable: statistic is min, max or final.
struct CheckConfig {
    std::string id;
    std::string observable;
    std::string statistic;
    std::string relation;
    double threshold = 0.0;
    bool operator==(const CheckConfig&) const = default;
};

struct CustomSystemConfig {
    std::vector<ChainSpec> chains;
    std::vector<SuperatomConfig> superatoms;
    std::vector<CouplingConfig> couplings;
    std::vector<ScheduleConfig> schedules;
    double initial_time = 0.0;
    std::vector<AmplitudeConfig> initial_state;
    std::vector<ObservableConfig> observables;
    std::vector<CheckConfig> checks;

    SystemDescription build() const;
    bool operator==(const CustomSystemConfig&) const = default;
};

struct OutputConfig {
    std::optional<std::string> directory;
    bool state_dump = false;
    bool operator==(const OutputConfig&) const = default;
};

struct SweepAxis {
    std::string path;
    std::vector<double> values;
    bool operator==(const SweepAxis&) const = default;
};

struct RunConfig {
    std::string scenario;  // a catalogue id, or "custom"
    ParameterSet parameters;
    RunOptions integration;
    OutputConfig output;
    std::vector<SweepAxis> sweep;
    std::optional<CustomSystemConfig> system;

    bool is_custom() const { return scenario == "custom"; }
    bool operator==(const RunConfig&) const = default;
};

/// Parses and fully validates a YAML run configuration. Unknown keys, missing keys and type errors
/// raise ConfigError with the offending path; physically inconsistent systems raise PhysicsViolation.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// YAML text that parses back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

/// Checks a config against the effective integration options (light cone, band membership, references).
void validate_config(const RunConfig& config, const RunOptions& effective);

struct SweepPoint {
    std::vector<double> coordinates;  // one value per sweep axis
    RunConfig config;                 // the config with the values applied and no sweep
};

/// Cartesian product of the sweep axes, first axis slowest.
std::vector<SweepPoint> expand_sweep(const RunConfig& config);

}  // namespace gsa
