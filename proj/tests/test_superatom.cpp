#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <tuple>
#include <vector>

#include "gsa/errors.hpp"
#include "gsa/superatom.hpp"
#include "support/oracles.hpp"

using namespace gsa;
using std::numbers::pi;
using std::numbers::sqrt2;
using cd = std::complex<double>;

namespace {

ChainSpec chain(double xi) {
    ChainSpec c;
    c.num_sites = 11;
    c.hopping = xi;
    return c;
}

CouplingPoint point(const std::string& gsa, int site, double g, double phase = 0.0) {
    CouplingPoint p;
    p.atom = {gsa, 0};
    p.waveguide = "w";
    p.site = site;
    p.amplitude = g;
    p.phase = phase;
    return p;
}

double overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return std::abs(a.dot(b)); }

}  // namespace

TEST_CASE("dressed modes of a degenerate pair") {
    const double J = 0.8;
    const auto modes = dressed_modes(SuperatomSpec::pair("A", 0.0, 0.0, J));
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].frequency == doctest::Approx(-J).epsilon(1e-14));
    CHECK(modes[1].frequency == doctest::Approx(J).epsilon(1e-14));
    Eigen::VectorXcd plus(2), minus(2);
    plus << 1.0 / sqrt2, 1.0 / sqrt2;
    minus << 1.0 / sqrt2, -1.0 / sqrt2;
    CHECK((modes[1].vector - plus).norm() < 1e-14);
    CHECK((modes[0].vector - minus).norm() < 1e-14);
    CHECK(modes[1].overlap.real() == doctest::Approx(1.0 / sqrt2));
}

TEST_CASE("dressed modes of a trimer") {
    const double w0 = 0.3, J = 1.1;
    const auto modes = dressed_modes(SuperatomSpec::trimer("T", w0, J));
    REQUIRE(modes.size() == 3);
    CHECK(modes[0].frequency == doctest::Approx(w0 - sqrt2 * J).epsilon(1e-14));
    CHECK(modes[1].frequency == doctest::Approx(w0).epsilon(1e-14));
    CHECK(modes[2].frequency == doctest::Approx(w0 + sqrt2 * J).epsilon(1e-14));
    Eigen::VectorXcd minus(3), zero(3), plus(3);
    minus << 0.5, -sqrt2 / 2, 0.5;
    zero << -1.0 / sqrt2, 0.0, 1.0 / sqrt2;
    plus << 0.5, sqrt2 / 2, 0.5;
    CHECK(overlap(modes[0].vector, minus) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(overlap(modes[1].vector, zero) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(overlap(modes[2].vector, plus) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single atom") {
    const auto modes = dressed_modes(SuperatomSpec::single("S", 0.7));
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].frequency == 0.7);
    CHECK(modes[0].vector[0] == cd(1.0));
}

TEST_CASE("first nonzero eigenvector component is real positive") {
    std::mt19937 rng(7);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 20; ++trial) {
        const int size = 2 + trial % 5;
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(size, size);
        std::vector<double> f;
        for (int i = 0; i < size; ++i) {
            f.push_back(n(rng));
            for (int j = i + 1; j < size; ++j) c(i, j) = c(j, i) = n(rng);
        }
        for (const auto& m : dressed_modes(SuperatomSpec::custom("X", f, c))) {
            Eigen::Index first = 0;
            while (std::abs(m.vector[first]) < 1e-12) ++first;
            CHECK(m.vector[first].imag() == 0.0);
            CHECK(m.vector[first].real() > 0.0);
        }
    }
}

TEST_CASE("dressed modes are orthonormal and reconstruct the Hamiltonian") {
    std::mt19937 rng(11);
    std::normal_distribution<double> n;
    std::vector<SuperatomSpec> specs = {SuperatomSpec::pair("A", 0.1, -0.4, 0.9), SuperatomSpec::trimer("T", 0.0, 2.0),
                                        SuperatomSpec::ssh("S", 6, 0.5, 1.5)};
    for (int trial = 0; trial < 10; ++trial) {
        const int size = 2 + trial;
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(size, size);
        std::vector<double> f;
        for (int i = 0; i < size; ++i) {
            f.push_back(n(rng));
            for (int j = i + 1; j < size; ++j) c(i, j) = c(j, i) = n(rng);
        }
        specs.push_back(SuperatomSpec::custom("X", f, c));
    }
    for (const auto& spec : specs) {
        const auto modes = dressed_modes(spec);
        const auto size = static_cast<Eigen::Index>(modes.size());
        Eigen::MatrixXcd v(size, size);
        Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(size, size);
        for (Eigen::Index i = 0; i < size; ++i) {
            v.col(i) = modes[static_cast<std::size_t>(i)].vector;
            rebuilt += modes[static_cast<std::size_t>(i)].frequency * v.col(i) * v.col(i).adjoint();
        }
        const double gram_error = (v.adjoint() * v - Eigen::MatrixXcd::Identity(size, size)).cwiseAbs().maxCoeff();
        CHECK(gram_error <= 1e-12);
        const double scale = std::max(1.0, spec.couplings.cwiseAbs().maxCoeff());
        const Eigen::MatrixXcd h = spec.hamiltonian().cast<cd>();
        CHECK((rebuilt - h).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    }
}

TEST_CASE("pair eigenvalues and mixing angle") {
    for (auto [w1, w2, J] : {std::tuple{0.0, 0.0, 1.0}, {0.7, -0.3, 0.4}, {-1.2, 0.5, 2.0}, {2.0, 0.0, 1.0}}) {
        const auto modes = dressed_modes(SuperatomSpec::pair("A", w1, w2, J));
        const double mean = 0.5 * (w1 + w2);
        const double root = std::sqrt(0.25 * (w1 - w2) * (w1 - w2) + J * J);
        CHECK(std::abs(modes[1].frequency - (mean + root)) <= 1e-12 * std::max(1.0, root));
        CHECK(std::abs(modes[0].frequency - (mean - root)) <= 1e-12 * std::max(1.0, root));
        const double theta = mixing_angle(w1, w2, J);
        Eigen::VectorXcd plus(2);
        plus << std::cos(theta), std::sin(theta);
        CHECK(overlap(modes[1].vector, plus) == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(mixing_angle(0.0, 0.0, 0.5) == doctest::Approx(pi / 4));
    CHECK(mixing_angle(2.0, 0.0, 1.0) == doctest::Approx(pi / 8));
    CHECK_THROWS_AS(mixing_angle(0.0, 0.0, 0.0), Degenerate);
}

TEST_CASE("phase accumulation") {
    const auto c = chain(15.0);
    for (int N : {1, 2, 3, 4, 7}) {
        CHECK(phase_accumulation(0.0, c, N).raw == doctest::Approx(N * pi / 2).epsilon(1e-14));
        CHECK(phase_accumulation(sqrt2 * 15.0, c, N).raw == doctest::Approx(N * pi / 4).epsilon(1e-14));
        CHECK(phase_accumulation(-sqrt2 * 15.0, c, N).raw == doctest::Approx(3 * N * pi / 4).epsilon(1e-14));
    }
    const auto p = phase_accumulation(-sqrt2 * 15.0, c, 4);
    CHECK(p.wrapped == doctest::Approx(pi).epsilon(1e-14));
    CHECK_THROWS_AS(phase_accumulation(31.0, c, 2), OutOfBand);
}

TEST_CASE("effective decay examples") {
    const double xi = 12.5, g = 1.0;
    const auto c = chain(xi);
    const auto modes = dressed_modes(SuperatomSpec::pair("A", 0.0, 0.0, sqrt2 * xi));

    const std::vector<CouplingPoint> n4 = {point("A", 0, g), point("A", 4, g)};
    CHECK(effective_decay(modes[0], c, n4) <= 1e-15);
    CHECK(effective_decay(modes[1], c, n4) <= 1e-15);

    // Population decay of |+> for N = 2: 2 pi D g^2 (two directions, |s|^2 = 1/2) = g^2 sqrt(2) / xi.
    const std::vector<CouplingPoint> n2 = {point("A", 0, g), point("A", 2, g)};
    CHECK(effective_decay(modes[1], c, n2) == doctest::Approx(sqrt2 * g * g / xi).epsilon(1e-13));

    const auto single = dressed_modes(SuperatomSpec::single("A", 0.0));
    CHECK(effective_decay(single[0], c, n2) <= 1e-15);
    // A single point is never dark: 2 g^2 / v_g.
    const std::vector<CouplingPoint> one = {point("A", 0, g)};
    CHECK(effective_decay(single[0], c, one) == doctest::Approx(2 * g * g / (2 * xi)).epsilon(1e-14));

    const auto far = dressed_modes(SuperatomSpec::single("A", 3.0 * xi));
    CHECK_THROWS_AS(effective_decay(far[0], c, n2), OutOfBand);
}

TEST_CASE("effective decay reduces to the two-point closed form") {
    const double xi = 15.0;
    const auto c = chain(xi);
    for (double J : {0.3 * xi, sqrt2 * xi, 1.9 * xi}) {
        for (const auto& mode : dressed_modes(SuperatomSpec::pair("A", 0.0, 0.0, J))) {
            for (int N = 1; N <= 8; ++N) {
                for (double g : {0.5, 1.0, 2.0}) {
                    const std::vector<CouplingPoint> pts = {point("A", 0, g), point("A", N, g)};
                    const double closed = two_point_decay(mode.frequency, c, g, N, mode.overlap);
                    CHECK(std::abs(effective_decay(mode, c, pts) - closed) <= 1e-14 * std::max(1.0, closed));
                }
            }
        }
    }
}

TEST_CASE("effective decay is invariant under a global coupling phase") {
    const auto c = chain(2.0);
    const auto modes = dressed_modes(SuperatomSpec::trimer("T", 0.0, 0.9));
    std::vector<CouplingPoint> pts = {point("A", -3, 0.4, 0.2), point("A", 1, 0.7, -1.1), point("A", 6, 0.3, 2.5)};
    for (const auto& m : modes) {
        const double base = effective_decay(m, c, pts);
        for (double alpha : {0.3, 1.7, -2.9}) {
            auto rotated = pts;
            for (auto& p : rotated) p.phase += alpha;
            CHECK(std::abs(effective_decay(m, c, rotated) - base) <= 1e-14 * base);
        }
    }
}

TEST_CASE("chirality parity rule") {
    const double xi = 12.5;
    const auto c = chain(xi);
    const auto modes = dressed_modes(SuperatomSpec::pair("A", 0.0, 0.0, sqrt2 * xi));
    const auto& minus = modes[0];
    const auto& plus = modes[1];
    CHECK(predict_chirality(plus, c, pi / 2, 2) == Chirality::Right);
    CHECK(predict_chirality(minus, c, pi / 2, 2) == Chirality::Left);
    // phi = 0 with phi_nu = pi: both directions cancel.
    CHECK(predict_chirality(plus, c, 0.0, 4) == Chirality::None);
    CHECK(predict_chirality(minus, c, 0.0, 4) == Chirality::None);
    CHECK(predict_chirality(plus, c, 0.0, 2) == Chirality::Mixed);

    // The predicted direction is the only direction with a nonzero emission weight.
    const std::vector<CouplingPoint> pts = {point("A", 0, 1.0), point("A", 2, 1.0, pi / 2)};
    const auto wp = emission_weights(plus.frequency, c, pts);
    CHECK(wp.left < 1e-28);
    CHECK(wp.right == doctest::Approx(4.0));
    const auto wm = emission_weights(minus.frequency, c, pts);
    CHECK(wm.right < 1e-28);
    CHECK(wm.left == doctest::Approx(4.0));
}

TEST_CASE("darkness consistency between chirality and decay") {
    const double xi = 12.5, g = 1.0;
    const auto c = chain(xi);
    std::vector<DressedMode> modes = dressed_modes(SuperatomSpec::pair("A", 0.0, 0.0, sqrt2 * xi));
    modes.push_back(dressed_modes(SuperatomSpec::single("A", 0.0))[0]);
    int dark = 0;
    for (const auto& m : modes) {
        for (int N = 1; N <= 8; ++N) {
            for (int q = 0; q < 8; ++q) {
                const double phase = q * pi / 4;
                const std::vector<CouplingPoint> pts = {point("A", 0, g), point("A", N, g, phase)};
                const bool none = predict_chirality(m, c, phase, N) == Chirality::None;
                const bool zero = effective_decay(m, c, pts) <= 1e-12 * g * g / xi;
                CHECK(none == zero);
                dark += none;
            }
        }
    }
    CHECK(dark > 0);
}

TEST_CASE("SSH edge states") {
    const auto gsa = SuperatomSpec::ssh("S", 6, 0.5, 1.5);
    const auto edges = ssh_edge_states(gsa);
    CHECK(std::abs(edges.hybridized_eigenvalues[0]) <= 1e-2);
    CHECK(std::abs(edges.hybridized_eigenvalues[1]) <= 1e-2);

    // Against a dense diagonalisation of the 12 x 12 matrix.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(gsa.hamiltonian());
    std::vector<double> mags;
    for (Eigen::Index i = 0; i < 12; ++i) mags.push_back(std::abs(dense.eigenvalues()[i]));
    std::sort(mags.begin(), mags.end());
    CHECK(std::abs(edges.hybridized_eigenvalues[0]) == doctest::Approx(mags[0]).epsilon(1e-10));
    CHECK(mags[2] > 0.5);

    const auto& left = edges.left.vector;
    const auto& right = edges.right.vector;
    CHECK(left.norm() == doctest::Approx(1.0));
    for (Eigen::Index i = 1; i < 12; i += 2) CHECK(std::abs(left[i]) < 1e-12);
    for (Eigen::Index i = 0; i < 12; i += 2) CHECK(std::abs(right[i]) < 1e-12);
    CHECK(std::abs(left[0]) > 0.8);
    CHECK(std::abs(right[11]) > 0.8);
    CHECK(std::abs(left[2]) / std::abs(left[0]) == doctest::Approx(0.5 / 1.5).epsilon(1e-3));
    CHECK(std::abs(left.dot(right)) < 1e-12);
    CHECK(edges.left.tag == ModeTag::LeftEdge);
    CHECK(edges.right.tag == ModeTag::RightEdge);

    CHECK_THROWS_AS(ssh_edge_states(SuperatomSpec::ssh("S", 6, 1.5, 0.5)), NotTopological);
    CHECK_THROWS_AS(ssh_edge_states(SuperatomSpec::ssh("S", 1, 0.5, 1.5)), NotTopological);
}

TEST_CASE("SSH edge splitting bound") {
    for (auto [J1, J2] : {std::pair{0.5, 1.5}, {0.3, 1.0}, {0.8, 1.2}}) {
        for (int M = 2; M <= 8; ++M) {
            const auto edges = ssh_edge_states(SuperatomSpec::ssh("S", M, J1, J2));
            const double bound = 2.0 * J1 * std::pow(J1 / J2, M - 1);
            CHECK(std::abs(edges.hybridized_eigenvalues[0]) <= bound);
            CHECK(std::abs(edges.hybridized_eigenvalues[1]) <= bound);
        }
    }
}

TEST_CASE("effective coupling between braided pair superatoms") {
    const double xi = 15.0, g = 1.0;
    const auto c = chain(xi);
    const auto plus = dressed_modes(SuperatomSpec::pair("A", 0.0, 0.0, sqrt2 * xi))[1];
    const std::vector<CouplingPoint> a = {point("A", 0, g), point("A", 4, g)};
    const std::vector<CouplingPoint> b = {point("B", 1, g), point("B", 5, g)};
    const auto sigma = effective_unit_coupling(plus, a, plus, b, c);
    CHECK(std::abs(std::abs(sigma.real()) - g * g / (2 * xi)) <= 1e-6 * g * g / (2 * xi));
    CHECK(std::abs(sigma.imag()) <= 1e-6 * g);

    // Same sum with the Green's function taken from a finite-chain inversion.
    const auto column = oracle::finite_chain_green(xi, plus.frequency, 8);
    cd sum{};
    for (const auto& pa : a)
        for (const auto& pb : b)
            sum += pa.coefficient() * std::conj(pb.coefficient()) *
                   column[static_cast<std::size_t>(std::abs(pa.site - pb.site))];
    const cd from_oracle = std::conj(plus.overlap) * plus.overlap * sum;
    CHECK(std::abs(sigma - from_oracle) <= 1e-3 / xi);

    const auto minus = dressed_modes(SuperatomSpec::pair("A", 0.0, 0.0, sqrt2 * xi))[0];
    CHECK_THROWS_AS(effective_unit_coupling(plus, a, minus, b, c), NotResonant);
}

TEST_CASE("self-energy imaginary part is minus half the decay") {
    const auto c = chain(3.0);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto modes = dressed_modes(SuperatomSpec::pair("A", u(rng), u(rng), 1.0 + std::abs(u(rng))));
        std::vector<CouplingPoint> pts;
        const int count = 1 + trial % 4;
        for (int j = 0; j < count; ++j) pts.push_back(point("A", 3 * j + trial % 3, 0.2 + std::abs(u(rng)), u(rng)));
        for (const auto& m : modes) {
            if (!c.in_band(m.frequency)) continue;
            const double gamma = effective_decay(m, c, pts);
            const auto sigma = effective_unit_coupling(m, pts, m, pts, c);
            CHECK(std::abs(sigma.imag() + gamma / 2) <= 1e-9 * std::max(gamma, 1e-6));
        }
    }
}
