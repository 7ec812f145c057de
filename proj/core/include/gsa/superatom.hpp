#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gsa/bath_lattice.hpp"
#include "gsa/coupling_layout.hpp"

namespace gsa {

enum class Topology { Single, Pair, Trimer, Ssh, Custom };

/// Internal structure of a giant superatom: bare atom frequencies (detunings from the reference
/// band centre) and a symmetric real coupling matrix with zero diagonal.
struct SuperatomSpec {
    std::string id = "A";
    std::vector<double> frequencies;
    Eigen::MatrixXd couplings;
    Topology topology = Topology::Custom;
    // SSH parameters; meaningful only for Topology::Ssh.
    int ssh_cells = 0;
    double ssh_intra = 0.0;
    double ssh_inter = 0.0;

    static SuperatomSpec single(std::string id, double omega);
    static SuperatomSpec pair(std::string id, double omega1, double omega2, double J);
    /// Linear chain of three equal atoms with nearest-neighbour coupling J.
    static SuperatomSpec trimer(std::string id, double omega0, double J);
    /// 2M atoms ordered P1, Q1, P2, Q2, ...; intracell J1, intercell J2, all at frequency omega.
    static SuperatomSpec ssh(std::string id, int cells, double J1, double J2, double omega = 0.0);
    static SuperatomSpec custom(std::string id, std::vector<double> frequencies, Eigen::MatrixXd couplings);

    std::size_t size() const { return frequencies.size(); }
    Eigen::MatrixXd hamiltonian() const;
    void validate() const;
};

enum class Chirality { Left, Right, None, Mixed };
enum class ModeTag { Bulk, LeftEdge, RightEdge };

/// Eigenmode of an isolated superatom together with its waveguide-facing data.
struct DressedMode {
    int index = 0;
    double frequency = 0.0;
    Eigen::VectorXcd vector;
    int coupled_atom = 0;
    std::complex<double> overlap{};  // s: component on the waveguide-coupled atom
    ModeTag tag = ModeTag::Bulk;
    std::optional<double> effective_decay;
    std::optional<Chirality> chirality;
};

/// Exact diagonalisation, eigenvalue-ascending. Each eigenvector has its first nonzero component
/// real positive. `coupled_atom` selects which component is reported as the overlap s.
std::vector<DressedMode> dressed_modes(const SuperatomSpec& gsa, int coupled_atom = 0);

/// theta in [0, pi/2) with tan(2 theta) = 2J / (omega1 - omega2). Throws Degenerate for J = 0 and
/// omega1 = omega2.
double mixing_angle(double omega1, double omega2, double J);

struct PhaseAccumulation {
    double raw = 0.0;
    double wrapped = 0.0;  // in [0, 2 pi)
};

/// k(mode_freq) * N.
PhaseAccumulation phase_accumulation(double mode_freq, const ChainSpec& chain, int separation);

/// Squared emission amplitudes into right- and left-moving waves, |sum_j c_j e^{-+ikx_j}|^2,
/// with c_j the point coefficients (excluding the overlap s).
struct EmissionWeights {
    double left = 0.0;
    double right = 0.0;
};
EmissionWeights emission_weights(double mode_freq, const ChainSpec& chain,
                                 std::span<const CouplingPoint> points);

/// Markovian population decay rate of a dressed mode into one waveguide:
///   Gamma = pi D(omega) (|sum_j c_j e^{-ikx_j}|^2 + |sum_j c_j e^{ikx_j}|^2) |s|^2,
/// i.e. 1/v_g per direction. For two equal real couplings this is 4 pi D g^2 [1 + cos(kN)] |s|^2.
/// Throws OutOfBand when the mode lies outside the band.
double effective_decay(const DressedMode& mode, const ChainSpec& chain,
                       std::span<const CouplingPoint> points);

/// Two-point closed form 4 pi D g^2 [1 + cos(kN)] |s|^2 for equal real couplings g.
double two_point_decay(double mode_freq, const ChainSpec& chain, double g, int separation,
                       std::complex<double> overlap);

/// Direction of emission for a two-point layout with phase difference `phase` placed on the
/// rightmost point, from the parity of (phase -+ k N) / pi.
Chirality predict_chirality(const DressedMode& mode, const ChainSpec& chain, double phase, int separation);

struct EdgeStates {
    DressedMode left;
    DressedMode right;
    std::array<double, 2> hybridized_eigenvalues{};  // the two raw eigenvalues closest to zero
};

/// Sublattice-resolved edge modes of an SSH superatom. Throws NotTopological unless J1 < J2
/// and M >= 2.
EdgeStates ssh_edge_states(const SuperatomSpec& gsa, int coupled_atom = 0);

/// Bath-mediated coupling between two resonant dressed modes,
///   conj(s_A) s_B sum_{i in A, j in B} c_i conj(c_j) G(omega, x_i - x_j).
/// Real part: exchange coupling; imaginary part: collective dissipation. With A == B this is the
/// mode self-energy, whose imaginary part is -Gamma/2.
std::complex<double> effective_unit_coupling(const DressedMode& mode_a, std::span<const CouplingPoint> points_a,
                                             const DressedMode& mode_b, std::span<const CouplingPoint> points_b,
                                             const ChainSpec& chain);

const char* to_string(Chirality c);

}  // namespace gsa
