#include "gsa/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "gsa/errors.hpp"

namespace gsa {

// ---------------------------------------------------------------------------------------------
// Basis

Basis::Basis(const SystemDescription& d) {
    std::ostringstream contract;
    contract.precision(17);
    contract << "gsa-basis-v1;";
    for (const auto& g : d.superatoms) {
        gsa_ids_.push_back(g.id);
        gsa_offsets_.push_back(atoms_.size());
        contract << "gsa:" << g.id << ":" << g.size() << ";";
        for (std::size_t l = 0; l < g.size(); ++l) atoms_.push_back({g.id, static_cast<int>(l)});
    }
    gsa_offsets_.push_back(atoms_.size());
    size_ = atoms_.size();
    for (const auto& c : d.chains) {
        chains_.push_back(c);
        chain_offsets_.push_back(size_);
        size_ += static_cast<std::size_t>(c.num_sites);
        contract << "chain:" << c.id << ":" << c.first_site << ":" << c.num_sites << ";";
    }
    contract_ = contract.str();
}

std::size_t Basis::atom_index(const AtomRef& atom) const {
    const auto [first, count] = superatom_range(atom.gsa);
    if (atom.atom < 0 || static_cast<std::size_t>(atom.atom) >= count)
        throw ConfigError("", "atom index " + std::to_string(atom.atom) + " out of range for superatom '" +
                                  atom.gsa + "'");
    return first + static_cast<std::size_t>(atom.atom);
}

std::pair<std::size_t, std::size_t> Basis::superatom_range(const std::string& gsa) const {
    for (std::size_t i = 0; i < gsa_ids_.size(); ++i)
        if (gsa_ids_[i] == gsa) return {gsa_offsets_[i], gsa_offsets_[i + 1] - gsa_offsets_[i]};
    throw ConfigError("", "unknown superatom '" + gsa + "'");
}

std::size_t Basis::chain_position(const std::string& chain) const {
    for (std::size_t i = 0; i < chains_.size(); ++i)
        if (chains_[i].id == chain) return i;
    throw ConfigError("", "unknown waveguide '" + chain + "'");
}

std::size_t Basis::chain_offset(const std::string& chain) const {
    return chain_offsets_[chain_position(chain)];
}

std::size_t Basis::site_index(const std::string& chain, int site) const {
    const auto pos = chain_position(chain);
    return chain_offsets_[pos] + chains_[pos].storage_index(site);
}

std::uint64_t Basis::hash() const {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : contract_) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------------------------
// AssembledSystem

namespace {

template <typename T, typename Key>
void require_unique(const std::vector<T>& items, Key key, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& item : items)
        if (!seen.insert(key(item)).second) throw ConfigError(what, "duplicate id '" + key(item) + "'");
}

}  // namespace

AssembledSystem::AssembledSystem(SystemDescription description) : description_(std::move(description)) {
    auto& d = description_;
    require_unique(d.chains, [](const ChainSpec& c) { return c.id; }, "chains");
    require_unique(d.superatoms, [](const SuperatomSpec& s) { return s.id; }, "superatoms");
    require_unique(d.schedules, [](const Schedule& s) { return s.id; }, "schedules");
    for (const auto& c : d.chains) c.validate();
    for (const auto& s : d.superatoms) s.validate();
    for (const auto& s : d.schedules) s.validate();

    basis_ = Basis(d);

    const auto n_atoms = static_cast<Eigen::Index>(basis_.num_atoms());
    atom_block_ = Eigen::MatrixXd::Zero(n_atoms, n_atoms);
    for (const auto& s : d.superatoms) {
        const auto first = static_cast<Eigen::Index>(basis_.superatom_range(s.id).first);
        const auto n = static_cast<Eigen::Index>(s.size());
        atom_block_.block(first, first, n, n) = s.hamiltonian();
    }

    for (const auto& c : d.chains) {
        ChainBlock block{basis_.chain_offset(c.id), static_cast<std::size_t>(c.num_sites), c.hopping,
                         c.band_center, {}};
        block.absorber.resize(block.size);
        for (std::size_t i = 0; i < block.size; ++i) block.absorber[i] = c.absorbing_potential(i);
        if (c.boundary.kind == BoundaryKind::Absorbing) hermitian_ = false;
        chains_.push_back(std::move(block));
    }

    std::set<std::tuple<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < d.couplings.size(); ++i) {
        const auto& p = d.couplings[i];
        const std::string where = "couplings[" + std::to_string(i) + "]";
        try {
            Term term{};
            term.atom = basis_.atom_index(p.atom);
            const auto& chain = d.chains[basis_.chain_position(p.waveguide)];
            if (!chain.contains(p.site))
                throw ConfigError("", "site " + std::to_string(p.site) + " outside waveguide '" + chain.id + "'");
            if (chain.absorbing_potential(chain.storage_index(p.site)) != 0.0)
                throw ConfigError("", "site " + std::to_string(p.site) + " lies inside an absorbing layer");
            term.site = basis_.site_index(p.waveguide, p.site);
            if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude) || !std::isfinite(p.phase))
                throw ConfigError("", "amplitude must be finite and >= 0");
            term.coefficient = p.coefficient();
            term.schedule = -1;
            if (p.schedule) {
                const auto it = std::find_if(d.schedules.begin(), d.schedules.end(),
                                             [&](const Schedule& s) { return s.id == *p.schedule; });
                if (it == d.schedules.end()) throw ConfigError("", "unknown schedule '" + *p.schedule + "'");
                term.schedule = static_cast<int>(it - d.schedules.begin());
            }
            if (!seen.insert({term.atom, term.site}).second)
                throw ConfigError("", "more than one coupling point for the same atom and site");
            terms_.push_back(term);
        } catch (const ConfigError& e) {
            throw ConfigError(where, e.what());
        }
    }
}

void AssembledSystem::coupling_scales(double t, std::vector<double>& scales) const {
    scales.resize(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const int s = terms_[i].schedule;
        if (s < 0) {
            scales[i] = 1.0;
        } else {
            const auto& sched = description_.schedules[static_cast<std::size_t>(s)];
            scales[i] = schedule_value(sched, t) / sched.g_max;
        }
    }
}

Eigen::SparseMatrix<std::complex<double>> AssembledSystem::assemble(double t) const {
    using Triplet = Eigen::Triplet<std::complex<double>>;
    std::vector<Triplet> triplets;
    const auto n_atoms = atom_block_.rows();
    for (Eigen::Index i = 0; i < n_atoms; ++i)
        for (Eigen::Index j = 0; j < n_atoms; ++j)
            if (atom_block_(i, j) != 0.0 || i == j) triplets.emplace_back(i, j, atom_block_(i, j));
    for (const auto& c : chains_) {
        for (std::size_t i = 0; i < c.size; ++i) {
            const auto row = static_cast<Eigen::Index>(c.offset + i);
            triplets.emplace_back(row, row, std::complex<double>(c.center, -c.absorber[i]));
            if (i + 1 < c.size) {
                triplets.emplace_back(row, row + 1, c.hopping);
                triplets.emplace_back(row + 1, row, c.hopping);
            }
        }
    }
    std::vector<double> scales;
    coupling_scales(t, scales);
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& term = terms_[k];
        const auto value = term.coefficient * scales[k];
        triplets.emplace_back(static_cast<Eigen::Index>(term.atom), static_cast<Eigen::Index>(term.site), value);
        triplets.emplace_back(static_cast<Eigen::Index>(term.site), static_cast<Eigen::Index>(term.atom),
                              std::conj(value));
    }
    const auto n = static_cast<Eigen::Index>(basis_.size());
    Eigen::SparseMatrix<std::complex<double>> h(n, n);
    h.setFromTriplets(triplets.begin(), triplets.end());
    return h;
}

void AssembledSystem::apply(double t, const Eigen::VectorXcd& x, Eigen::VectorXcd& y, double shift) const {
    y.resize(x.size());
    const auto n_atoms = atom_block_.rows();
    for (Eigen::Index i = 0; i < n_atoms; ++i) {
        std::complex<double> acc = -shift * x[i];
        for (Eigen::Index j = 0; j < n_atoms; ++j) acc += atom_block_(i, j) * x[j];
        y[i] = acc;
    }
    for (const auto& c : chains_) {
        const std::complex<double>* xs = x.data() + c.offset;
        std::complex<double>* ys = y.data() + c.offset;
        const double xi = c.hopping;
        const double diag = c.center - shift;
        const std::size_t n = c.size;
        ys[0] = std::complex<double>(diag, -c.absorber[0]) * xs[0] + xi * xs[1];
        for (std::size_t i = 1; i + 1 < n; ++i)
            ys[i] = std::complex<double>(diag, -c.absorber[i]) * xs[i] + xi * (xs[i - 1] + xs[i + 1]);
        ys[n - 1] = std::complex<double>(diag, -c.absorber[n - 1]) * xs[n - 1] + xi * xs[n - 2];
    }
    for (const auto& term : terms_) {
        double scale = 1.0;
        if (term.schedule >= 0) {
            const auto& sched = description_.schedules[static_cast<std::size_t>(term.schedule)];
            scale = schedule_value(sched, t) / sched.g_max;
        }
        if (scale == 0.0) continue;
        const auto value = term.coefficient * scale;
        y[static_cast<Eigen::Index>(term.atom)] += value * x[static_cast<Eigen::Index>(term.site)];
        y[static_cast<Eigen::Index>(term.site)] += std::conj(value) * x[static_cast<Eigen::Index>(term.atom)];
    }
}

std::pair<double, double> AssembledSystem::spectral_bounds() const {
    const auto n_atoms = static_cast<std::size_t>(atom_block_.rows());
    std::vector<double> atom_radius(n_atoms, 0.0);
    for (std::size_t i = 0; i < n_atoms; ++i)
        for (std::size_t j = 0; j < n_atoms; ++j)
            if (i != j) atom_radius[i] += std::abs(atom_block_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    std::vector<double> site_extra(basis_.size(), 0.0);
    for (const auto& term : terms_) {
        atom_radius[term.atom] += std::abs(term.coefficient);
        site_extra[term.site] += std::abs(term.coefficient);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n_atoms; ++i) {
        const double w = atom_block_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        lo = std::min(lo, w - atom_radius[i]);
        hi = std::max(hi, w + atom_radius[i]);
    }
    for (const auto& c : chains_) {
        double extra = 0.0;
        for (std::size_t i = 0; i < c.size; ++i) extra = std::max(extra, site_extra[c.offset + i]);
        lo = std::min(lo, c.center - 2.0 * c.hopping - extra);
        hi = std::max(hi, c.center + 2.0 * c.hopping + extra);
    }
    if (!std::isfinite(lo)) return {0.0, 0.0};
    return {lo, hi};
}

double AssembledSystem::max_hopping() const {
    double xi = 0.0;
    for (const auto& c : chains_) xi = std::max(xi, c.hopping);
    if (xi == 0.0) {
        const auto [lo, hi] = spectral_bounds();
        xi = std::max(0.5 * (hi - lo), 1.0);
    }
    return xi;
}

double AssembledSystem::default_dt() const {
    const auto [lo, hi] = spectral_bounds();
    const double half_width = 0.5 * (hi - lo);
    const double dt = max_dt();
    return half_width > 0.0 ? std::min(dt, 0.04 / half_width) : dt;
}

double AssembledSystem::ramp_start() const {
    double start = std::numeric_limits<double>::infinity();
    for (const auto& term : terms_) {
        if (term.schedule < 0) continue;
        const auto& s = description_.schedules[static_cast<std::size_t>(term.schedule)];
        if (s.kind == ScheduleKind::EmitRamp) start = std::min(start, s.truncation_time());
    }
    return std::isfinite(start) ? start : 0.0;
}

SystemState AssembledSystem::make_state(const std::vector<std::pair<AtomRef, std::complex<double>>>& pattern,
                                        double t) const {
    SystemState state;
    state.time = t;
    state.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_.size()));
    for (const auto& [atom, amp] : pattern) state.amplitudes[static_cast<Eigen::Index>(basis_.atom_index(atom))] += amp;
    const double n = state.amplitudes.norm();
    if (n == 0.0) throw ConfigError("initial_state", "initial state must not vanish");
    state.amplitudes /= n;
    return state;
}

// ---------------------------------------------------------------------------------------------
// Propagation

namespace {

class Rk4Stepper {
public:
    Rk4Stepper(const AssembledSystem& system, double shift)
        : system_(system), shift_(shift) {}

    // Advances psi (in the frame rotating at `shift`) from t to t + h.
    void step(double t, double h, Eigen::VectorXcd& psi) {
        const std::complex<double> minus_i{0.0, -1.0};
        const auto n = psi.size();
        k1_.resize(n);
        k2_.resize(n);
        k3_.resize(n);
        k4_.resize(n);
        tmp_.resize(n);

        system_.apply(t, psi, k1_, shift_);
        k1_ *= minus_i;
        tmp_ = psi + (0.5 * h) * k1_;
        system_.apply(t + 0.5 * h, tmp_, k2_, shift_);
        k2_ *= minus_i;
        tmp_ = psi + (0.5 * h) * k2_;
        system_.apply(t + 0.5 * h, tmp_, k3_, shift_);
        k3_ *= minus_i;
        tmp_ = psi + h * k3_;
        system_.apply(t + h, tmp_, k4_, shift_);
        k4_ *= minus_i;
        psi += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

private:
    const AssembledSystem& system_;
    double shift_;
    Eigen::VectorXcd k1_, k2_, k3_, k4_, tmp_;
};

struct AbsorberSide {
    std::size_t chain;
    bool left;
    std::vector<std::pair<std::size_t, double>> sites;  // basis index, V
};

std::vector<AbsorberSide> absorber_sides(const AssembledSystem& system) {
    std::vector<AbsorberSide> sides;
    const auto& basis = system.basis();
    for (std::size_t c = 0; c < basis.chains().size(); ++c) {
        const auto& chain = basis.chains()[c];
        if (chain.boundary.kind != BoundaryKind::Absorbing) continue;
        const auto offset = basis.chain_offset(chain.id);
        AbsorberSide left{c, true, {}}, right{c, false, {}};
        const auto half = static_cast<std::size_t>(chain.num_sites) / 2;
        for (std::size_t i = 0; i < static_cast<std::size_t>(chain.num_sites); ++i) {
            const double v = chain.absorbing_potential(i);
            if (v == 0.0) continue;
            (i < half ? left : right).sites.emplace_back(offset + i, v);
        }
        sides.push_back(std::move(left));
        sides.push_back(std::move(right));
    }
    return sides;
}

// d/dt of the absorbed probability, 2 sum V |psi|^2, per side.
void absorption_rates(const std::vector<AbsorberSide>& sides, const Eigen::VectorXcd& psi,
                      std::vector<double>& rates) {
    rates.assign(sides.size(), 0.0);
    for (std::size_t s = 0; s < sides.size(); ++s) {
        double r = 0.0;
        for (const auto& [idx, v] : sides[s].sites) r += v * std::norm(psi[static_cast<Eigen::Index>(idx)]);
        rates[s] = 2.0 * r;
    }
}

}  // namespace

PropagationResult propagate(const AssembledSystem& system, const SystemState& initial, double t_end,
                            const PropagationOptions& options, const Observer& observer) {
    const auto n = static_cast<Eigen::Index>(system.basis().size());
    if (initial.amplitudes.size() != n)
        throw ConfigError("state", "state dimension does not match the basis");
    if (!(t_end >= initial.time)) throw ConfigError("t_end", "t_end must not precede the initial time");
    if (std::abs(initial.amplitudes.norm() - 1.0) > 1e-10)
        throw ConfigError("state", "initial state must be normalised");
    const double dt_max = system.max_dt();
    double dt = options.dt > 0.0 ? options.dt : system.default_dt();
    if (dt > dt_max * (1.0 + 1e-12))
        throw ConfigError("dt", "dt = " + std::to_string(dt) + " exceeds dt_max = 0.02/xi_max = " +
                                    std::to_string(dt_max));

    const auto [lo, hi] = system.spectral_bounds();
    const double shift = 0.5 * (lo + hi);
    const double t0 = initial.time;
    const bool check_norm = options.check_norm && system.hermitian();

    Rk4Stepper stepper(system, shift);
    const auto sides = absorber_sides(system);
    std::vector<double> rate_before, rate_after;
    std::vector<double> absorbed_side(sides.size(), 0.0);

    PropagationResult result;
    result.absorbed.assign(system.basis().chains().size(), {});

    // psi is carried in the frame rotating at `shift`; the physical state is e^{-i shift (t - t0)} psi.
    Eigen::VectorXcd psi = initial.amplitudes;
    SystemState snapshot;

    auto collect_absorbed = [&] {
        for (std::size_t s = 0; s < sides.size(); ++s) {
            auto& a = result.absorbed[sides[s].chain];
            (sides[s].left ? a.left : a.right) = absorbed_side[s];
        }
    };
    auto emit = [&](double t) {
        snapshot.time = t;
        snapshot.amplitudes = std::polar(1.0, -shift * (t - t0)) * psi;
        if (check_norm && std::abs(psi.norm() - 1.0) > options.norm_tolerance)
            throw NormDrift("norm drifted to " + std::to_string(psi.norm()) + " at t = " + std::to_string(t) +
                            "; reduce dt");
        collect_absorbed();
        if (observer) observer(snapshot, result.absorbed);
    };

    std::vector<double> sample_times;
    if (options.sample_interval > 0.0) {
        for (std::size_t i = 1;; ++i) {
            const double t = t0 + static_cast<double>(i) * options.sample_interval;
            if (t >= t_end - 1e-12 * std::max(1.0, std::abs(t_end))) break;
            sample_times.push_back(t);
        }
    }
    sample_times.push_back(t_end);

    emit(t0);
    if (!sides.empty()) absorption_rates(sides, psi, rate_before);
    double t_seg = t0;
    for (double t_next : sample_times) {
        const double span = t_next - t_seg;
        if (span > 0.0) {
            const auto steps = static_cast<std::size_t>(std::ceil(span / dt * (1.0 - 1e-12)));
            const double h = span / static_cast<double>(steps);
            for (std::size_t s = 0; s < steps; ++s) {
                const double t = t_seg + static_cast<double>(s) * h;
                stepper.step(t, h, psi);
                if (!sides.empty()) {
                    absorption_rates(sides, psi, rate_after);
                    for (std::size_t k = 0; k < sides.size(); ++k)
                        absorbed_side[k] += 0.5 * h * (rate_before[k] + rate_after[k]);
                    std::swap(rate_before, rate_after);
                }
            }
            result.steps += steps;
        }
        t_seg = t_next;
        emit(t_next);
    }
    result.final_state = snapshot;
    return result;
}

}  // namespace gsa
