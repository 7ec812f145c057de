#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gsa/coupling_layout.hpp"
#include "gsa/dynamics.hpp"

namespace gsa {

/// Sparse amplitude pattern over atoms.
using AtomPattern = std::vector<std::pair<AtomRef, std::complex<double>>>;

/// |sum_l conj(target_l) c_l|, without renormalising the atomic amplitudes. The target must be
/// normalised over its support.
double fidelity(const Basis& basis, const SystemState& state, const AtomPattern& target);

/// c_l conj(c_l').
std::complex<double> coherence(const Basis& basis, const SystemState& state, const AtomRef& l,
                               const AtomRef& l_prime);

/// Amplitudes of every atom of one superatom.
Eigen::VectorXcd superatom_amplitudes(const Basis& basis, const SystemState& state, const std::string& gsa);

/// sum |c|^2 over all atoms.
double atom_population(const Basis& basis, const SystemState& state);

/// |a_n|^2 for every site of a waveguide, ascending logical coordinate.
std::vector<double> field_intensity(const Basis& basis, const SystemState& state, const std::string& waveguide);

/// sum |a_n|^2 over a waveguide.
double field_population(const Basis& basis, const SystemState& state, const std::string& waveguide);

struct DirectionalFractions {
    double left = 0.0;   // fraction strictly left of the pivot
    double right = 0.0;  // fraction strictly right of the pivot
    double total = 0.0;  // field population of the waveguide
    bool empty = true;   // no field: both fractions are reported as 0
};

/// Field population strictly left and right of `pivot`, normalised by the waveguide total.
DirectionalFractions directional_fractions(const Basis& basis, const SystemState& state,
                                           const std::string& waveguide, double pivot);

/// rho = v v^dagger over the amplitudes of the listed atoms.
Eigen::MatrixXcd density_matrix_atoms(const Basis& basis, const SystemState& state,
                                      const std::vector<AtomRef>& atoms);

/// 1 / sum p_m^2 for the normalised distribution p_m = |v_m|^2 / sum |v|^2.
double participation_ratio(const Eigen::VectorXcd& amplitudes);

/// <psi|H(t)|psi>.
std::complex<double> energy(const AssembledSystem& system, const SystemState& state);

}  // namespace gsa
