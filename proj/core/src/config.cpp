#include "gsa/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gsa/errors.hpp"
#include "gsa/superatom.hpp"

namespace gsa {

namespace {

// ---------------------------------------------------------------------------------------------
// Reading

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_map(const YAML::Node& n, const std::string& path) {
    if (!n.IsMap()) throw ConfigError(path, "expected a mapping");
}

void require_sequence(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) throw ConfigError(path, "expected a list");
}

void check_keys(const YAML::Node& n, const std::string& path, const std::vector<std::string>& allowed,
                const std::vector<std::string>& required = {}) {
    require_map(n, path);
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw ConfigError(join(path, key), "unknown key (allowed: " + list + ")");
        }
    }
    std::string missing;
    for (const auto& r : required)
        if (!n[r]) missing += (missing.empty() ? "" : ", ") + r;
    if (!missing.empty())
        throw ConfigError(path.empty() ? "<document>" : path, "missing required key(s): " + missing);
}

double number(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path, "expected a number");
    const auto text = n.Scalar();
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        try {
            v = n.as<double>();
        } catch (const YAML::Exception&) {
            throw ConfigError(path, "expected a number, got '" + text + "'");
        }
    }
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

int integer(const YAML::Node& n, const std::string& path) {
    const double v = number(n, path);
    if (v != std::round(v) || std::abs(v) > 1e9) throw ConfigError(path, "expected an integer");
    return static_cast<int>(v);
}

std::string text(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path, "expected a string");
    return n.Scalar();
}

bool flag(const YAML::Node& n, const std::string& path) {
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path, "expected true or false");
    }
}

std::vector<double> numbers(const YAML::Node& n, const std::string& path) {
    require_sequence(n, path);
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], index(path, i)));
    return out;
}

AtomRef atom_ref(const YAML::Node& n, const std::string& path) {
    check_keys(n, path, {"gsa", "atom"}, {"gsa", "atom"});
    return {text(n["gsa"], join(path, "gsa")), integer(n["atom"], join(path, "atom"))};
}

std::vector<AmplitudeConfig> amplitudes(const YAML::Node& n, const std::string& path) {
    require_sequence(n, path);
    std::vector<AmplitudeConfig> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const auto p = index(path, i);
        check_keys(n[i], p, {"gsa", "atom", "re", "im"}, {"gsa", "atom"});
        AmplitudeConfig a;
        a.atom = {text(n[i]["gsa"], join(p, "gsa")), integer(n[i]["atom"], join(p, "atom"))};
        const double re = n[i]["re"] ? number(n[i]["re"], join(p, "re")) : 0.0;
        const double im = n[i]["im"] ? number(n[i]["im"], join(p, "im")) : 0.0;
        a.value = {re, im};
        out.push_back(a);
    }
    return out;
}

ChainSpec read_chain(const YAML::Node& n, const std::string& path) {
    check_keys(n, path, {"id", "sites", "first_site", "hopping", "band_center", "boundary"}, {"id", "sites", "hopping"});
    ChainSpec c;
    c.id = text(n["id"], join(path, "id"));
    c.num_sites = integer(n["sites"], join(path, "sites"));
    if (n["first_site"]) c.first_site = integer(n["first_site"], join(path, "first_site"));
    c.hopping = number(n["hopping"], join(path, "hopping"));
    if (n["band_center"]) c.band_center = number(n["band_center"], join(path, "band_center"));
    if (const auto b = n["boundary"]) {
        const auto bp = join(path, "boundary");
        check_keys(b, bp, {"type", "width", "strength"}, {"type"});
        const auto type = text(b["type"], join(bp, "type"));
        if (type == "hard-wall") {
            if (b["width"] || b["strength"]) throw ConfigError(bp, "a hard wall takes no width or strength");
        } else if (type == "absorbing") {
            c.boundary = Boundary::absorbing();
            if (b["width"]) c.boundary.width = integer(b["width"], join(bp, "width"));
            if (b["strength"]) c.boundary.strength = number(b["strength"], join(bp, "strength"));
        } else {
            throw ConfigError(join(bp, "type"), "expected hard-wall or absorbing");
        }
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(path, e.what());
    }
    return c;
}

SuperatomConfig read_superatom(const YAML::Node& n, const std::string& path) {
    require_map(n, path);
    if (!n["type"]) throw ConfigError(path, "missing required key(s): type");
    SuperatomConfig s;
    s.type = text(n["type"], join(path, "type"));
    if (s.type == "single" || s.type == "pair" || s.type == "trimer")
        check_keys(n, path, {"id", "type", "frequencies", "J"}, {"id", "frequencies"});
    else if (s.type == "ssh")
        check_keys(n, path, {"id", "type", "frequencies", "cells", "J1", "J2"}, {"id", "cells", "J1", "J2"});
    else if (s.type == "custom")
        check_keys(n, path, {"id", "type", "frequencies", "couplings"}, {"id", "frequencies", "couplings"});
    else
        throw ConfigError(join(path, "type"), "expected single, pair, trimer, ssh or custom");
    s.id = text(n["id"], join(path, "id"));
    if (n["frequencies"]) s.frequencies = numbers(n["frequencies"], join(path, "frequencies"));
    if (n["J"]) s.J = number(n["J"], join(path, "J"));
    if (n["cells"]) s.cells = integer(n["cells"], join(path, "cells"));
    if (n["J1"]) s.J1 = number(n["J1"], join(path, "J1"));
    if (n["J2"]) s.J2 = number(n["J2"], join(path, "J2"));
    if (n["couplings"]) {
        const auto cp = join(path, "couplings");
        require_sequence(n["couplings"], cp);
        for (std::size_t i = 0; i < n["couplings"].size(); ++i)
            s.couplings.push_back(numbers(n["couplings"][i], index(cp, i)));
    }
    try {
        s.build().validate();
    } catch (const ConfigError& e) {
        throw ConfigError(path, e.what());
    }
    return s;
}

CouplingConfig read_coupling(const YAML::Node& n, const std::string& path) {
    check_keys(n, path, {"gsa", "atom", "waveguide", "site", "amplitude", "phase", "schedule", "propagating"},
               {"gsa", "atom", "waveguide", "site", "amplitude"});
    CouplingConfig c;
    c.point.atom = {text(n["gsa"], join(path, "gsa")), integer(n["atom"], join(path, "atom"))};
    c.point.waveguide = text(n["waveguide"], join(path, "waveguide"));
    c.point.site = integer(n["site"], join(path, "site"));
    c.point.amplitude = number(n["amplitude"], join(path, "amplitude"));
    if (c.point.amplitude < 0.0) throw ConfigError(join(path, "amplitude"), "must be >= 0");
    if (n["phase"]) c.point.phase = number(n["phase"], join(path, "phase"));
    if (n["schedule"]) c.point.schedule = text(n["schedule"], join(path, "schedule"));
    if (n["propagating"]) c.propagating = flag(n["propagating"], join(path, "propagating"));
    return c;
}

ScheduleConfig read_schedule(const YAML::Node& n, const std::string& path) {
    require_map(n, path);
    if (!n["kind"]) throw ConfigError(path, "missing required key(s): kind");
    ScheduleConfig s;
    const auto kind = text(n["kind"], join(path, "kind"));
    if (kind == "constant") {
        s.kind = ScheduleKind::Constant;
        check_keys(n, path, {"id", "kind", "g_max"}, {"id"});
    } else if (kind == "emit-ramp") {
        s.kind = ScheduleKind::EmitRamp;
        check_keys(n, path, {"id", "kind", "g_max", "beta", "t_ref", "epsilon"}, {"id", "beta"});
    } else if (kind == "absorb-ramp") {
        s.kind = ScheduleKind::AbsorbRamp;
        check_keys(n, path, {"id", "kind", "partner", "tau"}, {"id", "partner", "tau"});
    } else {
        throw ConfigError(join(path, "kind"), "expected constant, emit-ramp or absorb-ramp");
    }
    s.id = text(n["id"], join(path, "id"));
    if (n["g_max"]) s.g_max = number(n["g_max"], join(path, "g_max"));
    if (n["beta"]) s.beta = number(n["beta"], join(path, "beta"));
    if (n["t_ref"]) s.t_ref = number(n["t_ref"], join(path, "t_ref"));
    if (n["epsilon"]) s.epsilon = number(n["epsilon"], join(path, "epsilon"));
    if (n["partner"]) s.partner = text(n["partner"], join(path, "partner"));
    if (n["tau"]) s.tau = number(n["tau"], join(path, "tau"));
    return s;
}

ObservableConfig read_observable(const YAML::Node& n, const std::string& path) {
    require_map(n, path);
    if (!n["kind"] || !n["name"]) throw ConfigError(path, "missing required key(s): name, kind");
    ObservableConfig o;
    o.name = text(n["name"], join(path, "name"));
    o.kind = text(n["kind"], join(path, "kind"));
    const auto& k = o.kind;
    if (k == "fidelity") {
        check_keys(n, path, {"name", "kind", "target"}, {"target"});
        o.target = amplitudes(n["target"], join(path, "target"));
    } else if (k == "population") {
        check_keys(n, path, {"name", "kind", "atom"}, {"atom"});
        o.atoms.push_back(atom_ref(n["atom"], join(path, "atom")));
    } else if (k == "coherence_re" || k == "coherence_im") {
        check_keys(n, path, {"name", "kind", "atoms"}, {"atoms"});
        const auto ap = join(path, "atoms");
        require_sequence(n["atoms"], ap);
        if (n["atoms"].size() != 2) throw ConfigError(ap, "expected exactly two atoms");
        for (std::size_t i = 0; i < 2; ++i) o.atoms.push_back(atom_ref(n["atoms"][i], index(ap, i)));
    } else if (k == "superatom_population") {
        check_keys(n, path, {"name", "kind", "gsa"}, {"gsa"});
        o.gsa = text(n["gsa"], join(path, "gsa"));
    } else if (k == "atom_population" || k == "norm") {
        check_keys(n, path, {"name", "kind"});
    } else if (k == "field_population" || k == "absorbed_left" || k == "absorbed_right") {
        check_keys(n, path, {"name", "kind", "waveguide"}, {"waveguide"});
        o.waveguide = text(n["waveguide"], join(path, "waveguide"));
    } else if (k == "left_fraction" || k == "right_fraction") {
        check_keys(n, path, {"name", "kind", "waveguide", "pivot"}, {"waveguide", "pivot"});
        o.waveguide = text(n["waveguide"], join(path, "waveguide"));
        o.pivot = number(n["pivot"], join(path, "pivot"));
    } else {
        throw ConfigError(join(path, "kind"), "unknown observable kind '" + k + "'");
    }
    return o;
}

CheckConfig read_check(const YAML::Node& n, const std::string& path) {
    check_keys(n, path, {"id", "observable", "statistic", "relation", "threshold"},
               {"id", "observable", "statistic", "relation", "threshold"});
    CheckConfig c{text(n["id"], join(path, "id")), text(n["observable"], join(path, "observable")),
                  text(n["statistic"], join(path, "statistic")), text(n["relation"], join(path, "relation")),
                  number(n["threshold"], join(path, "threshold"))};
    if (c.statistic != "min" && c.statistic != "max" && c.statistic != "final")
        throw ConfigError(join(path, "statistic"), "expected min, max or final");
    if (c.relation != ">=" && c.relation != "<=" && c.relation != ">" && c.relation != "<")
        throw ConfigError(join(path, "relation"), "expected one of >=, <=, >, <");
    return c;
}

template <typename T, typename F>
std::vector<T> read_list(const YAML::Node& n, const std::string& path, F reader) {
    require_sequence(n, path);
    std::vector<T> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(reader(n[i], index(path, i)));
    return out;
}

RunConfig from_yaml(const YAML::Node& doc) {
    if (!doc || doc.IsNull() || (doc.IsMap() && doc.size() == 0))
        throw ConfigError("<document>", "empty configuration; required key(s): scenario (one of s1..s7 or custom)");
    require_map(doc, "<document>");
    if (!doc["scenario"]) throw ConfigError("<document>", "missing required key(s): scenario");
    RunConfig c;
    c.scenario = text(doc["scenario"], "scenario");
    if (c.is_custom())
        check_keys(doc, "", {"scenario", "system", "initial_state", "observables", "checks", "integration", "sampling",
                             "output", "sweep"},
                   {"system", "initial_state", "integration"});
    else
        check_keys(doc, "", {"scenario", "parameters", "integration", "sampling", "output", "sweep"});

    if (const auto p = doc["parameters"]) {
        require_map(p, "parameters");
        ParameterSet overrides;
        for (const auto& kv : p) {
            const auto key = kv.first.as<std::string>();
            overrides[key] = number(kv.second, join("parameters", key));
        }
        resolve_parameters(c.scenario, overrides);
        c.parameters = overrides;
    } else if (!c.is_custom()) {
        scenario_info(c.scenario);
    }
    if (const auto n = doc["integration"]) {
        check_keys(n, "integration", {"dt", "horizon"});
        if (n["dt"]) c.integration.dt = number(n["dt"], "integration.dt");
        if (n["horizon"]) c.integration.horizon = number(n["horizon"], "integration.horizon");
        if (c.integration.dt && !(*c.integration.dt > 0.0)) throw ConfigError("integration.dt", "must be positive");
        if (c.integration.horizon && !(*c.integration.horizon > 0.0))
            throw ConfigError("integration.horizon", "must be positive");
    }
    if (const auto n = doc["sampling"]) {
        check_keys(n, "sampling", {"interval"}, {"interval"});
        c.integration.sample_interval = number(n["interval"], "sampling.interval");
        if (!(*c.integration.sample_interval > 0.0)) throw ConfigError("sampling.interval", "must be positive");
    }
    if (const auto n = doc["output"]) {
        check_keys(n, "output", {"directory", "state_dump"});
        if (n["directory"]) c.output.directory = text(n["directory"], "output.directory");
        if (n["state_dump"]) c.output.state_dump = flag(n["state_dump"], "output.state_dump");
    }
    if (const auto n = doc["sweep"]) {
        c.sweep = read_list<SweepAxis>(n, "sweep", [](const YAML::Node& a, const std::string& p) {
            check_keys(a, p, {"path", "values"}, {"path", "values"});
            SweepAxis axis{text(a["path"], join(p, "path")), numbers(a["values"], join(p, "values"))};
            if (axis.values.empty()) throw ConfigError(join(p, "values"), "must not be empty");
            return axis;
        });
    }
    if (c.is_custom()) {
        if (!c.integration.horizon) throw ConfigError("integration", "missing required key(s): horizon");
        CustomSystemConfig s;
        const auto sys = doc["system"];
        check_keys(sys, "system", {"chains", "superatoms", "couplings", "schedules"}, {"chains", "superatoms"});
        s.chains = read_list<ChainSpec>(sys["chains"], "system.chains", read_chain);
        s.superatoms = read_list<SuperatomConfig>(sys["superatoms"], "system.superatoms", read_superatom);
        if (sys["couplings"]) s.couplings = read_list<CouplingConfig>(sys["couplings"], "system.couplings", read_coupling);
        if (sys["schedules"]) s.schedules = read_list<ScheduleConfig>(sys["schedules"], "system.schedules", read_schedule);
        const auto init = doc["initial_state"];
        check_keys(init, "initial_state", {"time", "amplitudes"}, {"amplitudes"});
        if (init["time"]) s.initial_time = number(init["time"], "initial_state.time");
        s.initial_state = amplitudes(init["amplitudes"], "initial_state.amplitudes");
        if (doc["observables"]) s.observables = read_list<ObservableConfig>(doc["observables"], "observables", read_observable);
        if (doc["checks"]) s.checks = read_list<CheckConfig>(doc["checks"], "checks", read_check);
        c.system = std::move(s);
    }
    validate_config(c, c.integration);
    return c;
}

// ---------------------------------------------------------------------------------------------
// Writing

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

YAML::Node num(double v) { return YAML::Node(shortest(v)); }

YAML::Node amplitude_node(const AmplitudeConfig& a) {
    YAML::Node n;
    n["gsa"] = a.atom.gsa;
    n["atom"] = a.atom.atom;
    n["re"] = num(a.value.real());
    n["im"] = num(a.value.imag());
    return n;
}

YAML::Node atom_node(const AtomRef& a) {
    YAML::Node n;
    n["gsa"] = a.gsa;
    n["atom"] = a.atom;
    return n;
}

YAML::Node numbers_node(const std::vector<double>& v) {
    YAML::Node n(YAML::NodeType::Sequence);
    for (double x : v) n.push_back(num(x));
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
}

YAML::Node to_yaml(const RunConfig& c, bool with_sweep) {
    YAML::Node doc;
    doc["scenario"] = c.scenario;
    if (!c.parameters.empty()) {
        YAML::Node p(YAML::NodeType::Map);
        for (const auto& [k, v] : c.parameters) p[k] = num(v);
        doc["parameters"] = p;
    }
    if (c.system) {
        const auto& s = *c.system;
        YAML::Node sys;
        for (const auto& ch : s.chains) {
            YAML::Node n;
            n["id"] = ch.id;
            n["sites"] = ch.num_sites;
            n["first_site"] = ch.first_site;
            n["hopping"] = num(ch.hopping);
            n["band_center"] = num(ch.band_center);
            YAML::Node b;
            if (ch.boundary.kind == BoundaryKind::HardWall) {
                b["type"] = "hard-wall";
            } else {
                b["type"] = "absorbing";
                b["width"] = ch.boundary.width;
                b["strength"] = num(ch.boundary.strength);
            }
            n["boundary"] = b;
            sys["chains"].push_back(n);
        }
        for (const auto& g : s.superatoms) {
            YAML::Node n;
            n["id"] = g.id;
            n["type"] = g.type;
            if (!g.frequencies.empty()) n["frequencies"] = numbers_node(g.frequencies);
            if (g.type == "pair" || g.type == "trimer") n["J"] = num(g.J);
            if (g.type == "ssh") {
                n["cells"] = g.cells;
                n["J1"] = num(g.J1);
                n["J2"] = num(g.J2);
            }
            if (g.type == "custom")
                for (const auto& row : g.couplings) n["couplings"].push_back(numbers_node(row));
            sys["superatoms"].push_back(n);
        }
        for (const auto& cp : s.couplings) {
            YAML::Node n;
            n["gsa"] = cp.point.atom.gsa;
            n["atom"] = cp.point.atom.atom;
            n["waveguide"] = cp.point.waveguide;
            n["site"] = cp.point.site;
            n["amplitude"] = num(cp.point.amplitude);
            n["phase"] = num(cp.point.phase);
            if (cp.point.schedule) n["schedule"] = *cp.point.schedule;
            if (cp.propagating) n["propagating"] = true;
            sys["couplings"].push_back(n);
        }
        for (const auto& sc : s.schedules) {
            YAML::Node n;
            n["id"] = sc.id;
            n["kind"] = to_string(sc.kind);
            if (sc.kind == ScheduleKind::AbsorbRamp) {
                n["partner"] = sc.partner;
                n["tau"] = num(sc.tau);
            } else {
                n["g_max"] = num(sc.g_max);
                if (sc.kind == ScheduleKind::EmitRamp) {
                    n["beta"] = num(sc.beta);
                    n["t_ref"] = num(sc.t_ref);
                    n["epsilon"] = num(sc.epsilon);
                }
            }
            sys["schedules"].push_back(n);
        }
        doc["system"] = sys;
        YAML::Node init;
        init["time"] = num(s.initial_time);
        for (const auto& a : s.initial_state) init["amplitudes"].push_back(amplitude_node(a));
        doc["initial_state"] = init;
        for (const auto& o : s.observables) {
            YAML::Node n;
            n["name"] = o.name;
            n["kind"] = o.kind;
            if (o.kind == "fidelity")
                for (const auto& a : o.target) n["target"].push_back(amplitude_node(a));
            if (o.kind == "population") n["atom"] = atom_node(o.atoms.at(0));
            if (o.kind == "coherence_re" || o.kind == "coherence_im")
                for (const auto& a : o.atoms) n["atoms"].push_back(atom_node(a));
            if (!o.gsa.empty()) n["gsa"] = o.gsa;
            if (!o.waveguide.empty()) n["waveguide"] = o.waveguide;
            if (o.kind == "left_fraction" || o.kind == "right_fraction") n["pivot"] = num(o.pivot);
            doc["observables"].push_back(n);
        }
        for (const auto& ch : s.checks) {
            YAML::Node n;
            n["id"] = ch.id;
            n["observable"] = ch.observable;
            n["statistic"] = ch.statistic;
            n["relation"] = ch.relation;
            n["threshold"] = num(ch.threshold);
            doc["checks"].push_back(n);
        }
    }
    if (c.integration.dt || c.integration.horizon) {
        YAML::Node n(YAML::NodeType::Map);
        if (c.integration.dt) n["dt"] = num(*c.integration.dt);
        if (c.integration.horizon) n["horizon"] = num(*c.integration.horizon);
        doc["integration"] = n;
    }
    if (c.integration.sample_interval) doc["sampling"]["interval"] = num(*c.integration.sample_interval);
    if (c.output.directory || c.output.state_dump) {
        YAML::Node n(YAML::NodeType::Map);
        if (c.output.directory) n["directory"] = *c.output.directory;
        if (c.output.state_dump) n["state_dump"] = true;
        doc["output"] = n;
    }
    if (with_sweep)
        for (const auto& axis : c.sweep) {
            YAML::Node n;
            n["path"] = axis.path;
            n["values"] = numbers_node(axis.values);
            doc["sweep"].push_back(n);
        }
    return doc;
}

std::string emit(const YAML::Node& doc) {
    YAML::Emitter out;
    out << doc;
    return std::string(out.c_str()) + "\n";
}

/// Sets a scalar at a dotted path with optional [i] list indices, creating missing map keys.
void set_path(YAML::Node root, const std::string& path, double value) {
    std::vector<std::string> tokens;
    std::string current;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const char ch = path[i];
        if (ch == '.') {
            if (!current.empty()) tokens.push_back(current);
            current.clear();
        } else if (ch == '[') {
            if (!current.empty()) tokens.push_back(current);
            const auto close = path.find(']', i);
            if (close == std::string::npos) throw ConfigError("sweep", "malformed path '" + path + "'");
            tokens.push_back(path.substr(i, close - i + 1));
            current.clear();
            i = close;
        } else {
            current += ch;
        }
    }
    if (!current.empty()) tokens.push_back(current);
    if (tokens.empty()) throw ConfigError("sweep", "empty path");

    std::vector<YAML::Node> chain{root};
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const auto& tok = tokens[t];
        YAML::Node node = chain.back();
        const bool last = t + 1 == tokens.size();
        if (tok.front() == '[') {
            const auto idx = std::stoul(tok.substr(1, tok.size() - 2));
            if (!node.IsSequence() || idx >= node.size())
                throw ConfigError("sweep", "path '" + path + "' does not exist");
            if (last) node[idx] = num(value);
            else chain.push_back(node[idx]);
        } else {
            if (!node.IsMap() && !node.IsNull()) throw ConfigError("sweep", "path '" + path + "' does not exist");
            if (last) {
                node[tok] = num(value);
            } else {
                if (!node[tok]) node[tok] = YAML::Node(YAML::NodeType::Map);
                chain.push_back(node[tok]);
            }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Public interface

SuperatomSpec SuperatomConfig::build() const {
    auto need = [&](std::size_t n) {
        if (frequencies.size() != n)
            throw ConfigError("frequencies", "a " + type + " superatom takes " + std::to_string(n) + " frequencies");
    };
    if (type == "single") {
        need(1);
        return SuperatomSpec::single(id, frequencies[0]);
    }
    if (type == "pair") {
        need(2);
        return SuperatomSpec::pair(id, frequencies[0], frequencies[1], J);
    }
    if (type == "trimer") {
        need(1);
        return SuperatomSpec::trimer(id, frequencies[0], J);
    }
    if (type == "ssh") {
        if (frequencies.size() > 1) throw ConfigError("frequencies", "an ssh superatom takes at most one frequency");
        return SuperatomSpec::ssh(id, cells, J1, J2, frequencies.empty() ? 0.0 : frequencies[0]);
    }
    if (type == "custom") {
        const auto n = static_cast<Eigen::Index>(frequencies.size());
        if (couplings.size() != frequencies.size())
            throw ConfigError("couplings", "expected one row per atom");
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = couplings[static_cast<std::size_t>(i)];
            if (row.size() != frequencies.size()) throw ConfigError("couplings", "expected a square matrix");
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
        }
        return SuperatomSpec::custom(id, frequencies, m);
    }
    throw ConfigError("type", "unknown superatom type '" + type + "'");
}

SystemDescription CustomSystemConfig::build() const {
    SystemDescription d;
    d.chains = chains;
    for (const auto& s : superatoms) d.superatoms.push_back(s.build());
    for (const auto& c : couplings) d.couplings.push_back(c.point);
    for (std::size_t i = 0; i < schedules.size(); ++i) {
        const auto& s = schedules[i];
        const auto path = "system.schedules[" + std::to_string(i) + "]";
        switch (s.kind) {
            case ScheduleKind::Constant: d.schedules.push_back(Schedule::constant(s.id, s.g_max)); break;
            case ScheduleKind::EmitRamp:
                d.schedules.push_back(Schedule::emit_ramp(s.id, s.g_max, s.beta, s.t_ref, s.epsilon));
                break;
            case ScheduleKind::AbsorbRamp: {
                const auto it = std::find_if(schedules.begin(), schedules.end(),
                                             [&](const ScheduleConfig& e) { return e.id == s.partner; });
                if (it == schedules.end() || it->kind != ScheduleKind::EmitRamp)
                    throw ConfigError(path + ".partner", "'" + s.partner + "' is not an emit-ramp schedule");
                const auto emit = Schedule::emit_ramp(it->id, it->g_max, it->beta, it->t_ref, it->epsilon);
                d.schedules.push_back(Schedule::absorb_partner(s.id, emit, s.tau));
                break;
            }
        }
    }
    return d;
}

RunConfig parse_config(const std::string& text) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError("<document>", std::string("malformed YAML: ") + e.what());
    }
    try {
        return from_yaml(doc);
    } catch (const YAML::Exception& e) {
        throw ConfigError("<document>", std::string("malformed configuration: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) { return emit(to_yaml(config, true)); }

void validate_config(const RunConfig& config, const RunOptions& effective) {
    if (!config.is_custom()) {
        resolve_parameters(config.scenario, config.parameters);
        return;
    }
    if (!config.system) throw ConfigError("system", "a custom run needs a system");
    const auto& s = *config.system;
    SystemDescription d;
    try {
        d = s.build();
    } catch (const ConfigError& e) {
        throw ConfigError("system", e.what());
    }
    std::optional<AssembledSystem> sys;
    try {
        sys.emplace(d);
    } catch (const PhysicsViolation&) {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError("system", e.what());
    }
    const auto& basis = sys->basis();

    // Every dressed mode that reaches a propagating coupling point must be able to propagate.
    for (std::size_t i = 0; i < s.couplings.size(); ++i) {
        const auto& c = s.couplings[i];
        if (!c.propagating) continue;
        const auto& gsa = *std::find_if(d.superatoms.begin(), d.superatoms.end(),
                                        [&](const SuperatomSpec& g) { return g.id == c.point.atom.gsa; });
        const auto& chain = d.chains[basis.chain_position(c.point.waveguide)];
        for (const auto& mode : dressed_modes(gsa, c.point.atom.atom)) {
            if (std::abs(mode.overlap) < 1e-12) continue;
            try {
                wavevector_of(chain, mode.frequency);
            } catch (const OutOfBand& e) {
                throw PhysicsViolation("system.couplings[" + std::to_string(i) + "]",
                                       std::string("OutOfBand: ") + e.what() +
                                           "; move the mode into the band of '" + chain.id +
                                           "' or drop 'propagating'");
            }
        }
    }

    // Hard-wall waveguides must hold the light cone of the run.
    const double horizon = effective.horizon.value_or(0.0);
    if (!(horizon > 0.0)) throw ConfigError("integration.horizon", "a custom run needs a positive horizon");
    for (const auto& chain : d.chains) {
        int lo = chain.last_site(), hi = chain.first_site;
        for (const auto& c : d.couplings)
            if (c.waveguide == chain.id) {
                lo = std::min(lo, c.site);
                hi = std::max(hi, c.site);
            }
        if (lo > hi) lo = hi = chain.first_site + chain.num_sites / 2;
        try {
            validate_light_cone(chain, horizon, lo, hi);
        } catch (const PhysicsViolation& e) {
            throw PhysicsViolation("system.chains", e.what());
        }
    }

    // Initial state, observables and checks must reference existing atoms, waveguides and names.
    std::vector<std::pair<AtomRef, std::complex<double>>> pattern;
    for (std::size_t i = 0; i < s.initial_state.size(); ++i) {
        try {
            basis.atom_index(s.initial_state[i].atom);
        } catch (const ConfigError& e) {
            throw ConfigError("initial_state.amplitudes[" + std::to_string(i) + "]", e.what());
        }
        pattern.push_back({s.initial_state[i].atom, s.initial_state[i].value});
    }
    try {
        sys->make_state(pattern, s.initial_time);
    } catch (const ConfigError& e) {
        throw ConfigError("initial_state", e.what());
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < s.observables.size(); ++i) {
        const auto& o = s.observables[i];
        const auto path = "observables[" + std::to_string(i) + "]";
        if (!names.insert(o.name).second) throw ConfigError(path + ".name", "duplicate observable '" + o.name + "'");
        try {
            for (const auto& a : o.atoms) basis.atom_index(a);
            for (const auto& a : o.target) basis.atom_index(a.atom);
            if (!o.gsa.empty()) basis.superatom_range(o.gsa);
            if (!o.waveguide.empty()) basis.chain_position(o.waveguide);
        } catch (const ConfigError& e) {
            throw ConfigError(path, e.what());
        }
        if (o.kind == "fidelity") {
            double n2 = 0.0;
            for (const auto& a : o.target) n2 += std::norm(a.value);
            if (std::abs(n2 - 1.0) > 1e-9) throw ConfigError(path + ".target", "target must be normalised");
        }
    }
    for (std::size_t i = 0; i < s.checks.size(); ++i)
        if (!names.count(s.checks[i].observable))
            throw ConfigError("checks[" + std::to_string(i) + "].observable",
                              "unknown observable '" + s.checks[i].observable + "'");
}

std::vector<SweepPoint> expand_sweep(const RunConfig& config) {
    std::vector<SweepPoint> points;
    if (config.sweep.empty()) {
        RunConfig c = config;
        points.push_back({{}, c});
        return points;
    }
    std::vector<std::size_t> counter(config.sweep.size(), 0);
    while (true) {
        YAML::Node doc = to_yaml(config, false);
        std::vector<double> coords;
        for (std::size_t a = 0; a < config.sweep.size(); ++a) {
            const double v = config.sweep[a].values[counter[a]];
            coords.push_back(v);
            try {
                set_path(doc, config.sweep[a].path, v);
            } catch (const ConfigError& e) {
                throw ConfigError("sweep[" + std::to_string(a) + "].path", e.what());
            }
        }
        RunConfig point;
        try {
            point = parse_config(emit(doc));
        } catch (const ConfigError& e) {
            throw ConfigError("sweep", std::string("grid point is invalid: ") + e.what());
        }
        points.push_back({coords, point});
        std::size_t a = config.sweep.size();
        while (a > 0) {
            --a;
            if (++counter[a] < config.sweep[a].values.size()) break;
            counter[a] = 0;
            if (a == 0) return points;
        }
    }
}

}  // namespace gsa
