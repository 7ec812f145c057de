#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "gsa/bath_lattice.hpp"
#include "gsa/errors.hpp"
#include "support/oracles.hpp"

using namespace gsa;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

ChainSpec chain(double xi, double center = 0.0) {
    ChainSpec c;
    c.num_sites = 11;
    c.hopping = xi;
    c.band_center = center;
    return c;
}

}  // namespace

TEST_CASE("dispersion") {
    CHECK(dispersion(chain(1.0), 0.0) == doctest::Approx(2.0));
    CHECK(std::abs(dispersion(chain(1.0), pi / 2)) < 1e-15);
    CHECK(dispersion(chain(1.0), pi / 4) == doctest::Approx(sqrt2).epsilon(1e-15));
    CHECK(dispersion(chain(1.0, 3.0), pi / 2) == doctest::Approx(3.0));
}

TEST_CASE("wavevector_of") {
    CHECK(wavevector_of(chain(1.0), sqrt2) == doctest::Approx(pi / 4).epsilon(1e-14));
    CHECK(wavevector_of(chain(1.0), -sqrt2) == doctest::Approx(3 * pi / 4).epsilon(1e-14));
    CHECK_THROWS_AS(wavevector_of(chain(1.0), 2.5), OutOfBand);
    CHECK_THROWS_AS(wavevector_of(chain(1.0), 2.0), OutOfBand);
    CHECK_THROWS_AS(wavevector_of(chain(1.0), -2.0), OutOfBand);
}

TEST_CASE("dispersion and wavevector_of round trip inside the band") {
    for (double xi : {0.5, 1.0, 12.5}) {
        const auto c = chain(xi, 0.3);
        for (int i = 1; i < 1000; ++i) {
            const double omega = c.band_min() + (c.band_max() - c.band_min()) * i / 1000.0;
            CHECK(std::abs(dispersion(c, wavevector_of(c, omega)) - omega) <= 1e-12 * xi);
        }
    }
}

TEST_CASE("group_velocity") {
    CHECK(group_velocity(chain(1.0), 0.0) == doctest::Approx(2.0));
    CHECK(group_velocity(chain(12.5), sqrt2 * 12.5) == doctest::Approx(12.5 * sqrt2).epsilon(1e-14));
    CHECK(group_velocity(chain(1.0), 2.0 - 1e-8) < 1e-3);
    // Finite-difference derivative of the dispersion.
    const auto c = chain(2.0);
    for (double k : {0.3, 1.1, 2.4}) {
        const double h = 1e-6;
        const double numeric = std::abs(dispersion(c, k + h) - dispersion(c, k - h)) / (2 * h);
        CHECK(group_velocity(c, dispersion(c, k)) == doctest::Approx(numeric).epsilon(1e-8));
    }
}

TEST_CASE("density of states against an eigenvalue histogram") {
    CHECK(density_of_states(chain(1.0), 0.0) == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-15));
    CHECK(density_of_states(chain(15.0), sqrt2 * 15) == doctest::Approx(1.0 / (pi * 15 * sqrt2)).epsilon(1e-14));
    CHECK_THROWS_AS(density_of_states(chain(1.0), 2.0), OutOfBand);

    const double h0 = oracle::histogram_dos(1.0, 0.0, 1000000, 0.01);
    CHECK(density_of_states(chain(1.0), 0.0) == doctest::Approx(h0).epsilon(1e-3));
    const double h1 = oracle::histogram_dos(15.0, sqrt2 * 15, 1000000, 0.15);
    CHECK(density_of_states(chain(15.0), sqrt2 * 15) == doctest::Approx(h1).epsilon(1e-3));
}

TEST_CASE("density of states is normalised over the open band") {
    for (double xi : {1.0, 15.0}) {
        const auto c = chain(xi, 0.7);
        const double delta = 4e-9 * xi;
        boost::math::quadrature::tanh_sinh<double> integrator;
        const double inner = integrator.integrate([&](double w) { return density_of_states(c, w); },
                                                  c.band_min() + delta, c.band_max() - delta);
        // Exact mass of the two slivers excluded by the band-edge tolerance.
        const double slivers = 2.0 * std::acos(1.0 - delta / (2.0 * xi)) / pi;
        CHECK(std::abs(inner + slivers - 1.0) <= 1e-6);
        CHECK(slivers < 1e-4);
    }
}

TEST_CASE("retarded Green's function examples") {
    const auto c = chain(1.0);
    const auto g0 = retarded_greens_function(c, 0.0, 0);
    CHECK(g0.real() == doctest::Approx(0.0));
    CHECK(g0.imag() == doctest::Approx(-0.5).epsilon(1e-15));
    const auto g2 = retarded_greens_function(c, 0.0, 2);
    CHECK(std::abs(g2 - std::complex<double>(0.0, 0.5)) < 1e-15);
    const auto g4 = retarded_greens_function(c, sqrt2, 4);
    CHECK(std::abs(g4 - std::complex<double>(0.0, 1.0 / sqrt2)) < 1e-15);
}

TEST_CASE("Green's function is even in the separation") {
    const auto c = chain(1.3, 0.2);
    for (double omega : {-2.0, -0.7, 0.2, 1.9, 2.5})
        for (int d = 0; d <= 20; ++d)
            CHECK(retarded_greens_function(c, omega, d) == retarded_greens_function(c, omega, -d));
}

TEST_CASE("Green's function against finite-chain inversion") {
    for (double xi : {1.0, 2.5}) {
        const auto c = chain(xi);
        for (double w : {0.0, 0.5, -1.0, sqrt2, -sqrt2, 1.8}) {
            const double omega = w * xi;
            const auto column = oracle::finite_chain_green(xi, omega, 20);
            for (int d = 0; d <= 20; ++d) {
                const auto exact = column[static_cast<std::size_t>(d)];
                const auto analytic = retarded_greens_function(c, omega, d);
                INFO("xi=" << xi << " omega=" << omega << " d=" << d);
                CHECK(std::abs(analytic - exact) <= 1e-3 / xi);
            }
        }
    }
}

TEST_CASE("chain validation and storage mapping") {
    ChainSpec c;
    c.num_sites = 5;
    c.first_site = -2;
    c.validate();
    CHECK(c.storage_index(-2) == 0);
    CHECK(c.storage_index(2) == 4);
    CHECK(c.logical_site(3) == 1);
    CHECK_THROWS_AS(c.storage_index(3), ConfigError);

    ChainSpec bad = c;
    bad.hopping = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.num_sites = 2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.boundary = Boundary::absorbing(2, 1.0);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("absorbing potential ramps quartically into both layers") {
    ChainSpec c;
    c.num_sites = 100;
    c.hopping = 2.0;
    c.boundary = Boundary::absorbing(10, 0.5);
    CHECK(c.absorbing_potential(0) == doctest::Approx(1.0));
    CHECK(c.absorbing_potential(99) == doctest::Approx(1.0));
    CHECK(c.absorbing_potential(5) == doctest::Approx(1.0 * std::pow(0.5, 4)));
    CHECK(c.absorbing_potential(10) == 0.0);
    CHECK(c.absorbing_potential(50) == 0.0);
    CHECK(c.absorbing_potential(89) == 0.0);
    c.boundary = Boundary::hard_wall();
    CHECK(c.absorbing_potential(0) == 0.0);
}

TEST_CASE("light cone validation") {
    ChainSpec c;
    c.num_sites = 301;
    c.first_site = -150;
    c.hopping = 1.0;
    CHECK_NOTHROW(validate_light_cone(c, 100.0, 0, 4));
    CHECK_THROWS_AS(validate_light_cone(c, 200.0, 0, 4), PhysicsViolation);
    c.boundary = Boundary::absorbing();
    CHECK_NOTHROW(validate_light_cone(c, 1e6, 0, 4));
}
