#include "gsa/bath_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsa/errors.hpp"

namespace gsa {

void ChainSpec::validate() const {
    const std::string where = "chain '" + id + "'";
    if (num_sites < 3) throw ConfigError(where, "num_sites must be >= 3");
    if (!(hopping > 0.0) || !std::isfinite(hopping)) throw ConfigError(where, "hopping must be > 0");
    if (!std::isfinite(band_center)) throw ConfigError(where, "band_center must be finite");
    if (boundary.kind == BoundaryKind::Absorbing) {
        if (boundary.width <= 0) throw ConfigError(where, "absorbing width must be positive");
        if (4 * boundary.width >= num_sites)
            throw ConfigError(where, "absorbing width must be < num_sites / 4");
        if (!(boundary.strength > 0.0)) throw ConfigError(where, "absorbing strength must be > 0");
    }
}

std::size_t ChainSpec::storage_index(int site) const {
    if (!contains(site))
        throw ConfigError("chain '" + id + "'", "site " + std::to_string(site) + " outside [" +
                                                    std::to_string(first_site) + ", " +
                                                    std::to_string(last_site()) + "]");
    return static_cast<std::size_t>(site - first_site);
}

double ChainSpec::absorbing_potential(std::size_t index) const {
    if (boundary.kind != BoundaryKind::Absorbing) return 0.0;
    const auto i = static_cast<long>(index);
    const long n = num_sites;
    const long w = boundary.width;
    const long depth = std::max({w - i, i - (n - 1 - w), 0L});
    if (depth == 0) return 0.0;
    const double x = static_cast<double>(depth) / static_cast<double>(w);
    return boundary.strength * hopping * x * x * x * x;
}

bool ChainSpec::in_band(double omega) const {
    return std::abs(omega - band_center) <= 2.0 * hopping * (1.0 - kBandEdgeTolerance);
}

namespace {

void require_in_band(const ChainSpec& chain, double omega) {
    if (!std::isfinite(omega) || !chain.in_band(omega))
        throw OutOfBand("frequency " + std::to_string(omega) + " outside the band [" +
                        std::to_string(chain.band_min()) + ", " + std::to_string(chain.band_max()) +
                        "] of chain '" + chain.id + "'");
}

}  // namespace

double dispersion(const ChainSpec& chain, double k) {
    return chain.band_center + 2.0 * chain.hopping * std::cos(k);
}

double wavevector_of(const ChainSpec& chain, double omega) {
    require_in_band(chain, omega);
    return std::acos((omega - chain.band_center) / (2.0 * chain.hopping));
}

double group_velocity(const ChainSpec& chain, double omega) {
    return 2.0 * chain.hopping * std::sin(wavevector_of(chain, omega));
}

double density_of_states(const ChainSpec& chain, double omega) {
    require_in_band(chain, omega);
    const double detuning = omega - chain.band_center;
    const double four_xi2 = 4.0 * chain.hopping * chain.hopping;
    return 1.0 / (std::numbers::pi * std::sqrt(four_xi2 - detuning * detuning));
}

std::complex<double> retarded_greens_function(const ChainSpec& chain, double omega, int separation) {
    const double k = wavevector_of(chain, omega);
    const double distance = std::abs(static_cast<double>(separation));
    const std::complex<double> i{0.0, 1.0};
    return -i * std::exp(-i * (k * distance)) / (2.0 * chain.hopping * std::sin(k));
}

void validate_light_cone(const ChainSpec& chain, double horizon, int span_min, int span_max) {
    if (chain.boundary.kind != BoundaryKind::HardWall) return;
    const double margin = 1.1 * chain.hopping * horizon;
    const double left = span_min - chain.first_site;
    const double right = chain.last_site() - span_max;
    if (left < margin || right < margin) {
        const double needed = 1.1 * (2.0 * chain.hopping * horizon + (span_max - span_min));
        throw PhysicsViolation(
            "chain '" + chain.id + "'",
            "light-cone overflow: reflections from the hard walls reach the coupling region within "
            "the horizon; use >= " + std::to_string(static_cast<long>(std::ceil(needed))) +
                " sites centred on the coupling span, or an absorbing boundary");
    }
}

}  // namespace gsa
