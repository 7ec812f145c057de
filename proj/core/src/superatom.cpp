#include "gsa/superatom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsa/errors.hpp"

namespace gsa {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kParityTolerance = 1e-9;
constexpr double kResonanceTolerance = 1e-9;

// Rotate v so that its first component with magnitude above tol is real positive.
void fix_sign(Eigen::VectorXcd& v) {
    const double tol = 1e-12 * v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > tol) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            v[i] = std::abs(v[i]);
            return;
        }
    }
}

// Is x within tolerance of an odd multiple of pi?
bool odd_multiple_of_pi(double x) {
    const double m = x / kPi;
    const double nearest = std::round(m);
    if (std::abs(x - nearest * kPi) > kParityTolerance) return false;
    return std::fmod(std::abs(nearest), 2.0) == 1.0;
}

std::complex<double> directional_sum(double k, std::span<const CouplingPoint> points, double sign) {
    std::complex<double> sum{};
    for (const auto& p : points)
        sum += p.coefficient() * std::polar(1.0, sign * k * static_cast<double>(p.site));
    return sum;
}

void require_same_atom(std::span<const CouplingPoint> points) {
    for (const auto& p : points)
        if (!(p.atom == points.front().atom) || p.waveguide != points.front().waveguide)
            throw ConfigError("", "coupling points must attach the same atom to the same waveguide");
}

}  // namespace

SuperatomSpec SuperatomSpec::single(std::string id, double omega) {
    return custom(std::move(id), {omega}, Eigen::MatrixXd::Zero(1, 1));
}

SuperatomSpec SuperatomSpec::pair(std::string id, double omega1, double omega2, double J) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 1) = c(1, 0) = J;
    auto s = custom(std::move(id), {omega1, omega2}, c);
    s.topology = Topology::Pair;
    return s;
}

SuperatomSpec SuperatomSpec::trimer(std::string id, double omega0, double J) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
    c(0, 1) = c(1, 0) = J;
    c(1, 2) = c(2, 1) = J;
    auto s = custom(std::move(id), {omega0, omega0, omega0}, c);
    s.topology = Topology::Trimer;
    return s;
}

SuperatomSpec SuperatomSpec::ssh(std::string id, int cells, double J1, double J2, double omega) {
    const int n = 2 * cells;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (int l = 0; l < cells; ++l) {
        c(2 * l, 2 * l + 1) = c(2 * l + 1, 2 * l) = J1;
        if (l + 1 < cells) c(2 * l + 1, 2 * l + 2) = c(2 * l + 2, 2 * l + 1) = J2;
    }
    auto s = custom(std::move(id), std::vector<double>(static_cast<std::size_t>(n), omega), c);
    s.topology = Topology::Ssh;
    s.ssh_cells = cells;
    s.ssh_intra = J1;
    s.ssh_inter = J2;
    return s;
}

SuperatomSpec SuperatomSpec::custom(std::string id, std::vector<double> frequencies,
                                    Eigen::MatrixXd couplings) {
    SuperatomSpec s;
    s.id = std::move(id);
    s.frequencies = std::move(frequencies);
    s.couplings = std::move(couplings);
    s.topology = s.frequencies.size() == 1 ? Topology::Single : Topology::Custom;
    return s;
}

Eigen::MatrixXd SuperatomSpec::hamiltonian() const {
    Eigen::MatrixXd h = couplings;
    for (std::size_t l = 0; l < frequencies.size(); ++l) h(l, l) = frequencies[l];
    return h;
}

void SuperatomSpec::validate() const {
    const std::string where = "superatom '" + id + "'";
    const auto n = static_cast<Eigen::Index>(frequencies.size());
    if (n == 0) throw ConfigError(where, "at least one atom is required");
    if (couplings.rows() != n || couplings.cols() != n)
        throw ConfigError(where, "coupling matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(frequencies[static_cast<std::size_t>(i)]))
            throw ConfigError(where, "frequencies must be finite");
        if (couplings(i, i) != 0.0) throw ConfigError(where, "coupling diagonal must be zero");
        for (Eigen::Index j = 0; j < n; ++j)
            if (couplings(i, j) != couplings(j, i)) throw ConfigError(where, "couplings must be symmetric");
    }
    if (topology == Topology::Ssh) {
        if (ssh_cells < 1 || n != 2 * ssh_cells) throw ConfigError(where, "ssh superatom needs 2M atoms");
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) {
                double expected = 0.0;
                if (j == i + 1) expected = (i % 2 == 0) ? ssh_intra : ssh_inter;
                if (couplings(i, j) != expected)
                    throw ConfigError(where, "ssh couplings must be J1 within and J2 between cells");
            }
    }
}

std::vector<DressedMode> dressed_modes(const SuperatomSpec& gsa, int coupled_atom) {
    gsa.validate();
    if (coupled_atom < 0 || static_cast<std::size_t>(coupled_atom) >= gsa.size())
        throw ConfigError("superatom '" + gsa.id + "'", "coupled atom index out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gsa.hamiltonian());
    std::vector<DressedMode> modes;
    modes.reserve(gsa.size());
    for (Eigen::Index n = 0; n < solver.eigenvalues().size(); ++n) {
        DressedMode m;
        m.index = static_cast<int>(n);
        m.frequency = solver.eigenvalues()[n];
        m.vector = solver.eigenvectors().col(n).cast<std::complex<double>>();
        fix_sign(m.vector);
        m.coupled_atom = coupled_atom;
        m.overlap = m.vector[coupled_atom];
        modes.push_back(std::move(m));
    }
    return modes;
}

double mixing_angle(double omega1, double omega2, double J) {
    if (J == 0.0 && omega1 == omega2) throw Degenerate("mixing angle undefined for J = 0 and equal frequencies");
    // atan2 keeps theta in [0, pi/2) for J >= 0 and picks the branch matching the '+' state.
    double theta = 0.5 * std::atan2(2.0 * J, omega1 - omega2);
    if (theta < 0.0) theta += 0.5 * kPi;
    return theta;
}

PhaseAccumulation phase_accumulation(double mode_freq, const ChainSpec& chain, int separation) {
    if (separation < 0) throw ConfigError("", "separation must be >= 0");
    PhaseAccumulation p;
    p.raw = wavevector_of(chain, mode_freq) * static_cast<double>(separation);
    p.wrapped = std::fmod(p.raw, 2.0 * kPi);
    return p;
}

EmissionWeights emission_weights(double mode_freq, const ChainSpec& chain,
                                 std::span<const CouplingPoint> points) {
    const double k = wavevector_of(chain, mode_freq);
    return {std::norm(directional_sum(k, points, +1.0)), std::norm(directional_sum(k, points, -1.0))};
}

double effective_decay(const DressedMode& mode, const ChainSpec& chain,
                       std::span<const CouplingPoint> points) {
    require_same_atom(points);
    const auto w = emission_weights(mode.frequency, chain, points);
    return kPi * density_of_states(chain, mode.frequency) * (w.left + w.right) * std::norm(mode.overlap);
}

double two_point_decay(double mode_freq, const ChainSpec& chain, double g, int separation,
                       std::complex<double> overlap) {
    const double phi = wavevector_of(chain, mode_freq) * static_cast<double>(separation);
    return 4.0 * kPi * density_of_states(chain, mode_freq) * g * g * (1.0 + std::cos(phi)) *
           std::norm(overlap);
}

Chirality predict_chirality(const DressedMode& mode, const ChainSpec& chain, double phase, int separation) {
    const double phi = wavevector_of(chain, mode.frequency) * static_cast<double>(separation);
    if (std::abs(mode.overlap) == 0.0) return Chirality::None;
    // right-moving amplitude ~ 1 + e^{i(phase - phi)}, left-moving ~ 1 + e^{i(phase + phi)}
    const bool right_dark = odd_multiple_of_pi(phase - phi);
    const bool left_dark = odd_multiple_of_pi(phase + phi);
    if (right_dark && left_dark) return Chirality::None;
    if (right_dark) return Chirality::Left;
    if (left_dark) return Chirality::Right;
    return Chirality::Mixed;
}

EdgeStates ssh_edge_states(const SuperatomSpec& gsa, int coupled_atom) {
    gsa.validate();
    if (gsa.topology != Topology::Ssh) throw ConfigError("superatom '" + gsa.id + "'", "not an SSH superatom");
    if (!(gsa.ssh_intra < gsa.ssh_inter) || gsa.ssh_cells < 2)
        throw NotTopological("SSH superatom '" + gsa.id + "' requires J1 < J2 and M >= 2");

    const Eigen::MatrixXd h = gsa.hamiltonian();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    const auto& evals = solver.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(evals.size()));
    for (Eigen::Index i = 0; i < evals.size(); ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(evals[a]) < std::abs(evals[b]); });
    const Eigen::Index e0 = std::min(order[0], order[1]);
    const Eigen::Index e1 = std::max(order[0], order[1]);

    // Projector onto the near-zero pair, restricted to one sublattice; its dominant eigenvector is
    // the edge mode living on that sublattice.
    Eigen::MatrixXd basis(h.rows(), 2);
    basis.col(0) = solver.eigenvectors().col(e0);
    basis.col(1) = solver.eigenvectors().col(e1);
    const Eigen::MatrixXd projector = basis * basis.transpose();

    auto sublattice_mode = [&](int parity, ModeTag tag) {
        Eigen::MatrixXd restricted = projector;
        for (Eigen::Index i = 0; i < h.rows(); ++i) {
            if (i % 2 != parity) {
                restricted.row(i).setZero();
                restricted.col(i).setZero();
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sub(restricted);
        DressedMode m;
        m.vector = sub.eigenvectors().col(h.rows() - 1).cast<std::complex<double>>();
        fix_sign(m.vector);
        m.frequency = (m.vector.adjoint() * h.cast<std::complex<double>>() * m.vector)(0, 0).real();
        m.index = static_cast<int>(parity == 0 ? e0 : e1);
        m.coupled_atom = coupled_atom;
        m.overlap = m.vector[coupled_atom];
        m.tag = tag;
        return m;
    };

    EdgeStates edges;
    edges.left = sublattice_mode(0, ModeTag::LeftEdge);
    edges.right = sublattice_mode(1, ModeTag::RightEdge);
    edges.hybridized_eigenvalues = {evals[e0], evals[e1]};
    return edges;
}

std::complex<double> effective_unit_coupling(const DressedMode& mode_a, std::span<const CouplingPoint> points_a,
                                             const DressedMode& mode_b, std::span<const CouplingPoint> points_b,
                                             const ChainSpec& chain) {
    require_same_atom(points_a);
    require_same_atom(points_b);
    const double scale = std::max({1.0, std::abs(mode_a.frequency), chain.hopping});
    if (std::abs(mode_a.frequency - mode_b.frequency) > kResonanceTolerance * scale)
        throw NotResonant("modes at " + std::to_string(mode_a.frequency) + " and " +
                          std::to_string(mode_b.frequency) + " are not resonant");
    const double omega = 0.5 * (mode_a.frequency + mode_b.frequency);
    std::complex<double> sum{};
    for (const auto& pa : points_a)
        for (const auto& pb : points_b)
            sum += pa.coefficient() * std::conj(pb.coefficient()) *
                   retarded_greens_function(chain, omega, pa.site - pb.site);
    return std::conj(mode_a.overlap) * mode_b.overlap * sum;
}

const char* to_string(Chirality c) {
    switch (c) {
        case Chirality::Left: return "left";
        case Chirality::Right: return "right";
        case Chirality::None: return "none";
        case Chirality::Mixed: return "mixed";
    }
    return "?";
}

}  // namespace gsa
