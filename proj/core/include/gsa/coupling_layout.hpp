#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>

#include "gsa/bath_lattice.hpp"

namespace gsa {

/// An atom addressed by its superatom id and its position inside that superatom.
struct AtomRef {
    std::string gsa;
    int atom = 0;
    bool operator==(const AtomRef&) const = default;
};

/// One atom-waveguide contact.
///
/// The coupling enters the Hamiltonian as <atom|H|site> = amplitude * e^{i phase} * s(t) / g_max,
/// where s is the attached schedule (absent: constant, s / g_max = 1).
struct CouplingPoint {
    AtomRef atom;
    std::string waveguide;
    int site = 0;
    double amplitude = 0.0;
    double phase = 0.0;
    std::optional<std::string> schedule;

    std::complex<double> coefficient() const { return std::polar(amplitude, phase); }
    bool operator==(const CouplingPoint&) const = default;
};

enum class ScheduleKind { Constant, EmitRamp, AbsorbRamp };

/// Time profile of a coupling amplitude.
///
/// Emit ramps follow g_max e^{beta u} / (2 - e^{beta u}) for u = t - t_ref < 0 and g_max
/// afterwards. Values below epsilon * g_max are clamped to zero. Absorb ramps are the exact
/// mirror image g(t) = emit(t_ref - t), with t_ref = emitter t_ref + tau.
struct Schedule {
    std::string id;
    ScheduleKind kind = ScheduleKind::Constant;
    double g_max = 1.0;
    double beta = 0.0;
    double t_ref = 0.0;
    double epsilon = 1e-3;
    std::string partner;  // emit partner of an absorb ramp

    static Schedule constant(std::string id, double g_max);
    static Schedule emit_ramp(std::string id, double g_max, double beta, double t_ref,
                              double epsilon = 1e-3);
    /// Time-reversed partner of `emit`, with the ramp-down starting `tau` after emit.t_ref.
    static Schedule absorb_partner(std::string id, const Schedule& emit, double tau);

    void validate() const;

    /// Time at which the ramp reaches epsilon * g_max (emit: first nonzero; absorb: last nonzero).
    /// Constant schedules return -infinity.
    double truncation_time() const;

    bool operator==(const Schedule&) const = default;
};

/// Coupling amplitude g(t) in [0, g_max].
double schedule_value(const Schedule& schedule, double t);

/// Midpoint-to-midpoint distance between the two coupling sets divided by the group velocity
/// at mode_freq. Throws OutOfBand.
double propagation_time(const ChainSpec& chain, double mode_freq, std::span<const int> emitter_sites,
                        std::span<const int> receiver_sites);

enum class LayoutTopology { Braided, Separate, Nested, Overlapping };

/// Relative ordering of two two-point layouts on the same waveguide.
LayoutTopology classify_topology(std::array<int, 2> a, std::array<int, 2> b);

const char* to_string(LayoutTopology topology);
const char* to_string(ScheduleKind kind);

}  // namespace gsa
