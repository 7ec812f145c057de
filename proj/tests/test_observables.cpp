#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gsa/errors.hpp"
#include "gsa/observables.hpp"

using namespace gsa;
using std::numbers::sqrt2;
using cd = std::complex<double>;

namespace {

AssembledSystem two_pairs() {
    SystemDescription d;
    ChainSpec c;
    c.id = "w";
    c.num_sites = 11;
    c.first_site = -5;
    d.chains = {c};
    d.superatoms = {SuperatomSpec::pair("A", 0, 0, 1), SuperatomSpec::pair("B", 0, 0, 1)};
    return AssembledSystem(d);
}

SystemState zero_state(const AssembledSystem& s) {
    SystemState st;
    st.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.basis().size()));
    return st;
}

}  // namespace

TEST_CASE("fidelity") {
    const auto s = two_pairs();
    const AtomPattern bell = {{{"B", 0}, 1.0 / sqrt2}, {{"B", 1}, 1.0 / sqrt2}};
    const AtomPattern anti = {{{"B", 0}, 1.0 / sqrt2}, {{"B", 1}, -1.0 / sqrt2}};
    auto st = s.make_state(bell);
    CHECK(fidelity(s.basis(), st, bell) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity(s.basis(), st, anti) < 1e-16);
    st = s.make_state({{{"A", 0}, 1.0}});
    CHECK(fidelity(s.basis(), st, bell) == 0.0);
    // Leakage into the field lowers the fidelity; atomic amplitudes are not renormalised.
    st = zero_state(s);
    st.amplitudes[2] = st.amplitudes[3] = 0.5;
    st.amplitudes[static_cast<Eigen::Index>(s.basis().site_index("w", 0))] = 1.0 / sqrt2;
    CHECK(fidelity(s.basis(), st, bell) == doctest::Approx(1.0 / sqrt2).epsilon(1e-15));
    // A global phase does not matter.
    st.amplitudes *= std::polar(1.0, 0.9);
    CHECK(fidelity(s.basis(), st, bell) == doctest::Approx(1.0 / sqrt2).epsilon(1e-15));
    CHECK_THROWS_AS(fidelity(s.basis(), st, {{{"B", 0}, 1.0}, {{"B", 1}, 1.0}}), ConfigError);
}

TEST_CASE("coherence") {
    const auto s = two_pairs();
    auto st = s.make_state({{{"A", 0}, 1.0}, {{"A", 1}, 1.0}});
    CHECK(coherence(s.basis(), st, {"A", 0}, {"A", 1}).real() == doctest::Approx(0.5));
    st = s.make_state({{{"A", 0}, 1.0}, {{"A", 1}, -1.0}});
    CHECK(coherence(s.basis(), st, {"A", 0}, {"A", 1}).real() == doctest::Approx(-0.5));
    st = s.make_state({{{"A", 0}, 1.0}, {{"A", 1}, cd(0.0, 1.0)}});
    const auto c = coherence(s.basis(), st, {"A", 0}, {"A", 1});
    CHECK(c.imag() == doctest::Approx(-0.5));
    CHECK(coherence(s.basis(), st, {"A", 1}, {"A", 0}) == std::conj(c));
}

TEST_CASE("populations and field intensity") {
    const auto s = two_pairs();
    auto st = zero_state(s);
    st.amplitudes[1] = 0.6;
    st.amplitudes[static_cast<Eigen::Index>(s.basis().site_index("w", -5))] = 0.8;
    CHECK(atom_population(s.basis(), st) == doctest::Approx(0.36));
    CHECK(field_population(s.basis(), st, "w") == doctest::Approx(0.64));
    const auto I = field_intensity(s.basis(), st, "w");
    REQUIRE(I.size() == 11);
    CHECK(I[0] == doctest::Approx(0.64));
    CHECK(superatom_amplitudes(s.basis(), st, "A")[1] == cd(0.6));
}

TEST_CASE("directional fractions") {
    const auto s = two_pairs();
    auto st = s.make_state({{{"A", 0}, 1.0}});
    const auto none = directional_fractions(s.basis(), st, "w", 0.0);
    CHECK(none.empty);
    CHECK(none.left == 0.0);
    CHECK(none.right == 0.0);

    st = zero_state(s);
    st.amplitudes[static_cast<Eigen::Index>(s.basis().site_index("w", -3))] = 0.5;
    st.amplitudes[static_cast<Eigen::Index>(s.basis().site_index("w", 1))] = 0.5;
    st.amplitudes[static_cast<Eigen::Index>(s.basis().site_index("w", 4))] = std::sqrt(0.5);
    const auto f = directional_fractions(s.basis(), st, "w", 1.0);
    CHECK_FALSE(f.empty);
    CHECK(f.total == doctest::Approx(1.0));
    CHECK(f.left == doctest::Approx(0.25));
    CHECK(f.right == doctest::Approx(0.5));
}

TEST_CASE("density matrix over atoms") {
    const auto s = two_pairs();
    auto st = s.make_state({{{"A", 0}, 1.0}, {{"A", 1}, 1.0}});
    const auto rho = density_matrix_atoms(s.basis(), st, {{"A", 0}, {"A", 1}});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(std::abs(rho(i, j) - 0.5) < 1e-15);
    st = s.make_state({{{"B", 1}, 1.0}});
    const auto one = density_matrix_atoms(s.basis(), st, {{"A", 0}, {"A", 1}, {"B", 0}, {"B", 1}});
    CHECK(one(3, 3) == cd(1.0));
    CHECK(one.cwiseAbs().sum() == doctest::Approx(1.0));
    CHECK(std::abs(one.trace() - 1.0) < 1e-15);
}

TEST_CASE("participation ratio") {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    v[3] = 1.0;
    CHECK(participation_ratio(v) == 1.0);
    v.setConstant(cd(0.0, 0.2));
    CHECK(participation_ratio(v) == doctest::Approx(8.0));
    v.setZero();
    v[0] = 1.0;
    v[1] = 1.0;
    CHECK(participation_ratio(v) == doctest::Approx(2.0));
}

TEST_CASE("energy of an eigenstate") {
    const auto s = two_pairs();
    const auto st = s.make_state({{{"A", 0}, 1.0}, {{"A", 1}, -1.0}});
    CHECK(energy(s, st).real() == doctest::Approx(-1.0));
    CHECK(std::abs(energy(s, st).imag()) < 1e-15);
}
