#include "gsa/observables.hpp"

#include <cmath>

#include "gsa/errors.hpp"

namespace gsa {

double fidelity(const Basis& basis, const SystemState& state, const AtomPattern& target) {
    double norm2 = 0.0;
    std::complex<double> overlap{};
    for (const auto& [atom, amp] : target) {
        norm2 += std::norm(amp);
        overlap += std::conj(amp) * state.amplitudes[static_cast<Eigen::Index>(basis.atom_index(atom))];
    }
    if (std::abs(norm2 - 1.0) > 1e-9) throw ConfigError("target", "fidelity target must be normalised");
    return std::abs(overlap);
}

std::complex<double> coherence(const Basis& basis, const SystemState& state, const AtomRef& l,
                               const AtomRef& l_prime) {
    const auto a = state.amplitudes[static_cast<Eigen::Index>(basis.atom_index(l))];
    const auto b = state.amplitudes[static_cast<Eigen::Index>(basis.atom_index(l_prime))];
    return a * std::conj(b);
}

Eigen::VectorXcd superatom_amplitudes(const Basis& basis, const SystemState& state, const std::string& gsa) {
    const auto [first, count] = basis.superatom_range(gsa);
    return state.amplitudes.segment(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
}

double atom_population(const Basis& basis, const SystemState& state) {
    return state.amplitudes.head(static_cast<Eigen::Index>(basis.num_atoms())).squaredNorm();
}

std::vector<double> field_intensity(const Basis& basis, const SystemState& state, const std::string& waveguide) {
    const auto& chain = basis.chains()[basis.chain_position(waveguide)];
    const auto offset = basis.chain_offset(waveguide);
    std::vector<double> out(static_cast<std::size_t>(chain.num_sites));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(state.amplitudes[static_cast<Eigen::Index>(offset + i)]);
    return out;
}

double field_population(const Basis& basis, const SystemState& state, const std::string& waveguide) {
    const auto& chain = basis.chains()[basis.chain_position(waveguide)];
    return state.amplitudes.segment(static_cast<Eigen::Index>(basis.chain_offset(waveguide)), chain.num_sites)
        .squaredNorm();
}

DirectionalFractions directional_fractions(const Basis& basis, const SystemState& state,
                                           const std::string& waveguide, double pivot) {
    const auto& chain = basis.chains()[basis.chain_position(waveguide)];
    const auto intensity = field_intensity(basis, state, waveguide);
    DirectionalFractions f;
    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < intensity.size(); ++i) {
        const double x = chain.logical_site(i);
        if (x < pivot) left += intensity[i];
        else if (x > pivot) right += intensity[i];
        f.total += intensity[i];
    }
    if (f.total > 0.0) {
        f.empty = false;
        f.left = left / f.total;
        f.right = right / f.total;
    }
    return f;
}

Eigen::MatrixXcd density_matrix_atoms(const Basis& basis, const SystemState& state,
                                      const std::vector<AtomRef>& atoms) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t i = 0; i < atoms.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = state.amplitudes[static_cast<Eigen::Index>(basis.atom_index(atoms[i]))];
    return v * v.adjoint();
}

double participation_ratio(const Eigen::VectorXcd& amplitudes) {
    const double total = amplitudes.squaredNorm();
    if (total == 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& a : amplitudes) sum += std::pow(std::norm(a) / total, 2);
    return 1.0 / sum;
}

std::complex<double> energy(const AssembledSystem& system, const SystemState& state) {
    Eigen::VectorXcd h;
    system.apply(state.time, state.amplitudes, h);
    return state.amplitudes.dot(h);
}

}  // namespace gsa
