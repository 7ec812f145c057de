#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "gsa/bath_lattice.hpp"
#include "gsa/coupling_layout.hpp"
#include "gsa/superatom.hpp"

namespace gsa {

struct SystemDescription {
    std::vector<ChainSpec> chains;
    std::vector<SuperatomSpec> superatoms;
    std::vector<CouplingPoint> couplings;
    std::vector<Schedule> schedules;
};

/// Single-excitation basis: all atoms in superatom declaration order, then the sites of every
/// waveguide in declaration order and ascending logical coordinate. This ordering is part of
/// the on-disk state format.
class Basis {
public:
    Basis() = default;
    explicit Basis(const SystemDescription& description);

    std::size_t size() const { return size_; }
    std::size_t num_atoms() const { return atoms_.size(); }
    const std::vector<AtomRef>& atoms() const { return atoms_; }
    const std::vector<ChainSpec>& chains() const { return chains_; }

    std::size_t atom_index(const AtomRef& atom) const;
    /// Index of the first atom of a superatom, and its atom count.
    std::pair<std::size_t, std::size_t> superatom_range(const std::string& gsa) const;
    std::size_t chain_position(const std::string& chain) const;
    std::size_t chain_offset(const std::string& chain) const;
    std::size_t site_index(const std::string& chain, int site) const;

    /// Human-readable ordering contract and its 64-bit FNV-1a hash.
    const std::string& contract() const { return contract_; }
    std::uint64_t hash() const;

private:
    std::vector<AtomRef> atoms_;
    std::vector<std::string> gsa_ids_;
    std::vector<std::size_t> gsa_offsets_;
    std::vector<ChainSpec> chains_;
    std::vector<std::size_t> chain_offsets_;
    std::size_t size_ = 0;
    std::string contract_;
};

struct SystemState {
    double time = 0.0;
    Eigen::VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }
};

/// Validated system with a fast structured matrix-vector product.
///
/// Matrix elements: atom frequencies and superatom couplings on the atom block; band centre
/// minus i V(x) on the diagonal of each waveguide and the hopping between neighbours; and
/// <atom|H|site> = g e^{i phi} s(t) / g_max for every coupling point (conjugate on the other side).
class AssembledSystem {
public:
    explicit AssembledSystem(SystemDescription description);

    const SystemDescription& description() const { return description_; }
    const Basis& basis() const { return basis_; }

    /// True when no waveguide carries an absorbing layer.
    bool hermitian() const { return hermitian_; }

    Eigen::SparseMatrix<std::complex<double>> assemble(double t) const;

    /// y = (H(t) - shift) x.
    void apply(double t, const Eigen::VectorXcd& x, Eigen::VectorXcd& y, double shift = 0.0) const;

    /// Gershgorin bounds of the Hermitian part with every coupling at full strength.
    std::pair<double, double> spectral_bounds() const;
    double max_hopping() const;
    /// Largest admissible step, 0.02 / xi_max.
    double max_dt() const { return 0.02 / max_hopping(); }
    /// Default step: 0.04 over the spectral half-width, never above max_dt().
    double default_dt() const;

    /// Earliest time at which every emit ramp is nonzero (start of a scheduled run), or 0.
    double ramp_start() const;

    /// Initial state with the given atomic amplitudes (renormalised) at time t.
    SystemState make_state(const std::vector<std::pair<AtomRef, std::complex<double>>>& pattern,
                           double t = 0.0) const;

private:
    struct Term {
        std::size_t atom;
        std::size_t site;
        std::complex<double> coefficient;
        int schedule;  // -1: constant
    };
    struct ChainBlock {
        std::size_t offset;
        std::size_t size;
        double hopping;
        double center;
        std::vector<double> absorber;  // V >= 0 per site
    };

    void coupling_scales(double t, std::vector<double>& scales) const;

    SystemDescription description_;
    Basis basis_;
    bool hermitian_ = true;
    Eigen::MatrixXd atom_block_;
    std::vector<ChainBlock> chains_;
    std::vector<Term> terms_;
};

struct AbsorbedProbability {
    double left = 0.0;
    double right = 0.0;
};

struct PropagationOptions {
    double dt = 0.0;               // 0: AssembledSystem::default_dt()
    double sample_interval = 0.0;  // 0: observe only the start and end
    bool check_norm = true;
    double norm_tolerance = 1e-6;
};

struct PropagationResult {
    SystemState final_state;
    std::vector<AbsorbedProbability> absorbed;  // per waveguide, declaration order
    std::size_t steps = 0;
};

using Observer = std::function<void(const SystemState&, const std::vector<AbsorbedProbability>&)>;

/// Fixed-step classical Runge-Kutta integration of i d|psi>/dt = H(t)|psi> from initial.time to
/// t_end. The observer sees the state at initial.time, at every multiple of sample_interval and at
/// t_end. Identical inputs give bit-identical trajectories. Throws NormDrift when a Hermitian
/// run loses or gains more than norm_tolerance of norm.
PropagationResult propagate(const AssembledSystem& system, const SystemState& initial, double t_end,
                            const PropagationOptions& options = {}, const Observer& observer = {});

}  // namespace gsa
