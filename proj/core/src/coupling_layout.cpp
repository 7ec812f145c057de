#include "gsa/coupling_layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gsa/errors.hpp"

namespace gsa {

namespace {

// Emit-ramp profile relative to g_max, u measured from the end of the ramp.
double ramp_shape(double beta, double u) {
    if (u >= 0.0) return 1.0;
    const double e = std::exp(beta * u);
    return e / (2.0 - e);
}

double midpoint(std::span<const int> sites) {
    if (sites.empty()) throw ConfigError("", "coupling set must not be empty");
    const auto [lo, hi] = std::minmax_element(sites.begin(), sites.end());
    return 0.5 * (static_cast<double>(*lo) + static_cast<double>(*hi));
}

}  // namespace

Schedule Schedule::constant(std::string id, double g_max) {
    Schedule s;
    s.id = std::move(id);
    s.kind = ScheduleKind::Constant;
    s.g_max = g_max;
    return s;
}

Schedule Schedule::emit_ramp(std::string id, double g_max, double beta, double t_ref,
                             double epsilon) {
    Schedule s;
    s.id = std::move(id);
    s.kind = ScheduleKind::EmitRamp;
    s.g_max = g_max;
    s.beta = beta;
    s.t_ref = t_ref;
    s.epsilon = epsilon;
    return s;
}

Schedule Schedule::absorb_partner(std::string id, const Schedule& emit, double tau) {
    if (emit.kind != ScheduleKind::EmitRamp)
        throw ConfigError("schedule '" + id + "'", "absorb partner must be an emit ramp");
    Schedule s = emit;
    s.id = std::move(id);
    s.kind = ScheduleKind::AbsorbRamp;
    s.t_ref = emit.t_ref + tau;
    s.partner = emit.id;
    return s;
}

void Schedule::validate() const {
    const std::string where = "schedule '" + id + "'";
    if (!(g_max > 0.0)) throw ConfigError(where, "g_max must be > 0");
    if (kind == ScheduleKind::Constant) return;
    if (!(beta > 0.0)) throw ConfigError(where, "beta must be > 0");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError(where, "epsilon must lie in (0, 1)");
    if (!std::isfinite(t_ref)) throw ConfigError(where, "t_ref must be finite");
}

double Schedule::truncation_time() const {
    if (kind == ScheduleKind::Constant) return -std::numeric_limits<double>::infinity();
    // e^{beta u} / (2 - e^{beta u}) = eps  <=>  e^{beta u} = 2 eps / (1 + eps)
    const double u = std::log(2.0 * epsilon / (1.0 + epsilon)) / beta;
    return kind == ScheduleKind::EmitRamp ? t_ref + u : t_ref - u;
}

double schedule_value(const Schedule& s, double t) {
    double shape = 1.0;
    switch (s.kind) {
        case ScheduleKind::Constant:
            return s.g_max;
        case ScheduleKind::EmitRamp:
            shape = ramp_shape(s.beta, t - s.t_ref);
            break;
        case ScheduleKind::AbsorbRamp:
            shape = ramp_shape(s.beta, s.t_ref - t);
            break;
    }
    return shape < s.epsilon ? 0.0 : s.g_max * shape;
}

double propagation_time(const ChainSpec& chain, double mode_freq, std::span<const int> emitter_sites,
                        std::span<const int> receiver_sites) {
    const double v = group_velocity(chain, mode_freq);
    return std::abs(midpoint(receiver_sites) - midpoint(emitter_sites)) / v;
}

LayoutTopology classify_topology(std::array<int, 2> a, std::array<int, 2> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a[0] == b[0] || a[0] == b[1] || a[1] == b[0] || a[1] == b[1])
        return LayoutTopology::Overlapping;
    if (a[1] < b[0] || b[1] < a[0]) return LayoutTopology::Separate;
    if ((a[0] < b[0] && b[1] < a[1]) || (b[0] < a[0] && a[1] < b[1])) return LayoutTopology::Nested;
    return LayoutTopology::Braided;
}

const char* to_string(LayoutTopology topology) {
    switch (topology) {
        case LayoutTopology::Braided: return "braided";
        case LayoutTopology::Separate: return "separate";
        case LayoutTopology::Nested: return "nested";
        case LayoutTopology::Overlapping: return "overlapping";
    }
    return "?";
}

const char* to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Constant: return "constant";
        case ScheduleKind::EmitRamp: return "emit";
        case ScheduleKind::AbsorbRamp: return "absorb";
    }
    return "?";
}

}  // namespace gsa
