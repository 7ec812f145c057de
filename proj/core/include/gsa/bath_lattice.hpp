#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace gsa {

/// Relative margin below the band edge that still counts as "inside the band".
inline constexpr double kBandEdgeTolerance = 1e-9;

/// Default absorbing layer: width in sites and peak imaginary potential in units of the hopping.
inline constexpr int kDefaultAbsorberWidth = 60;
inline constexpr double kDefaultAbsorberStrength = 1.0;

enum class BoundaryKind { HardWall, Absorbing };

struct Boundary {
    BoundaryKind kind = BoundaryKind::HardWall;
    int width = 0;          // sites per side
    double strength = 0.0;  // peak potential, in units of the hopping

    static Boundary hard_wall() { return {}; }
    static Boundary absorbing(int width = kDefaultAbsorberWidth,
                              double strength = kDefaultAbsorberStrength) {
        return {BoundaryKind::Absorbing, width, strength};
    }
    bool operator==(const Boundary&) const = default;
};

/// A finite 1D tight-binding waveguide.
///
/// Sites carry logical coordinates `first_site .. first_site + num_sites - 1`; storage
/// index 0 corresponds to `first_site`, so negative coordinates are allowed.
struct ChainSpec {
    std::string id = "w";
    int num_sites = 0;
    int first_site = 0;
    double hopping = 1.0;
    double band_center = 0.0;
    Boundary boundary{};

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    int last_site() const { return first_site + num_sites - 1; }
    bool contains(int site) const { return site >= first_site && site <= last_site(); }
    std::size_t storage_index(int site) const;
    int logical_site(std::size_t index) const { return first_site + static_cast<int>(index); }

    /// Imaginary absorbing potential V >= 0 at a storage index (the Hamiltonian carries -iV).
    /// Quartic ramp over the boundary layer, zero in the interior and for hard walls.
    double absorbing_potential(std::size_t index) const;

    double band_min() const { return band_center - 2.0 * hopping; }
    double band_max() const { return band_center + 2.0 * hopping; }
    bool in_band(double omega) const;

    bool operator==(const ChainSpec&) const = default;
};

/// band_center + 2 xi cos(k).
double dispersion(const ChainSpec& chain, double k);

/// k in (0, pi) with dispersion(k) = omega. Throws OutOfBand outside the open band.
double wavevector_of(const ChainSpec& chain, double omega);

/// |d omega / d k| at the in-band frequency omega, in sites per unit time.
double group_velocity(const ChainSpec& chain, double omega);

/// Density of states per site, 1 / (pi sqrt(4 xi^2 - (omega - center)^2)).
double density_of_states(const ChainSpec& chain, double omega);

/// Infinite-chain retarded Green's function <n + d|(omega + i0+ - H)^{-1}|n> = -i e^{-ik|d|} / (2 xi sin k).
/// With positive hopping the group velocity is -2 xi sin k, so e^{-ik|d|} is the outgoing wave.
std::complex<double> retarded_greens_function(const ChainSpec& chain, double omega, int separation);

/// Hard-wall chains must hold the light cone of a run of length `horizon`: at least
/// 1.1 * xi * horizon sites beyond each end of the coupling span [span_min, span_max].
/// Throws PhysicsViolation otherwise. Absorbing chains are not checked.
void validate_light_cone(const ChainSpec& chain, double horizon, int span_min, int span_max);

}  // namespace gsa
