#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gsa/errors.hpp"
#include "gsa/scenarios.hpp"
#include "gsa/superatom.hpp"

using namespace gsa;
using std::numbers::sqrt2;

namespace {

double metric(const ScenarioReport& r, const char* name) { return r.metrics.at(name).get<double>(); }

void require_all_pass(const ScenarioReport& r, const std::vector<std::string>& except = {}) {
    for (const auto& c : r.criteria) {
        if (std::find(except.begin(), except.end(), c.id) != except.end()) continue;
        INFO(c.id << ": " << c.value << ' ' << c.relation << ' ' << c.threshold);
        CHECK(c.passed);
    }
}

}  // namespace

TEST_CASE("catalogue and parameter resolution") {
    CHECK(scenario_catalog().size() == 7);
    CHECK(scenario_info("s4").defaults.at("beta") == 0.045);
    CHECK_THROWS_AS(scenario_info("s8"), ConfigError);
    CHECK_THROWS_AS(resolve_parameters("s1", {{"typo", 1.0}}), ConfigError);
    CHECK(resolve_parameters("s1", {{"N", 2}}).at("N") == 2.0);
    CHECK(resolve_parameters("s1", {}).at("xi") == 15.0);
}

TEST_CASE("s1: the N = 4 dark state keeps its fidelity") {
    const auto r = run_s1_dark_states();
    CHECK(r.criterion("1a.min_fidelity").passed);
    CHECK(metric(r, "min_fidelity") >= 0.98);
    CHECK(metric(r, "phase_accumulation") == doctest::Approx(4 * std::numbers::pi / 4));
    CHECK(metric(r, "markov_rate") < 1e-12);
}

TEST_CASE("s1: the N = 2 state decays at the Markovian rate") {
    const auto r = run_s1_dark_states({{"N", 2}});
    CHECK(r.criterion("1b.decay_vs_markov").passed);
    const double markov = metric(r, "markov_rate");
    CHECK(metric(r, "fitted_rate") == doctest::Approx(markov).epsilon(0.1));
    // Two coupling points in phase double the single-point amplitude.
    CHECK(markov == doctest::Approx(sqrt2 / 15.0).epsilon(1e-12));
}

TEST_CASE("s1: a single atom at N = 4 is a control that decays") {
    const auto r = run_s1_dark_states({{"single_atom", 1}});
    CHECK(r.criterion("1c.control_decay").passed);
}

TEST_CASE("s2: decoherence-free transfer and swap") {
    const auto transfer = run_s2_df_transfer();
    require_all_pass(transfer);
    CHECK(std::abs(metric(transfer, "effective_coupling_re")) == doctest::Approx(1.0 / 30.0).epsilon(1e-6));
    const auto swap = run_s2_df_transfer({{"detuning_over_J", 2}});
    require_all_pass(swap);
    CHECK(swap.metrics.at("target") == "antisymmetric");
}

TEST_CASE("s3: injection into the SSH edge state") {
    const auto r = run_s3_ssh_injection();
    require_all_pass(r);
    CHECK(metric(r, "left_edge_decay_ratio") < 1.0);
}

TEST_CASE("s4: chiral pitch-catch") {
    const auto r = run_s4_chiral_transfer();
    require_all_pass(r);
    CHECK(metric(r, "tau") == doctest::Approx(100.0 / (sqrt2 * 12.5)).epsilon(1e-12));
    CHECK(r.metrics.at("predicted_chirality") == "right");
    CHECK(metric(r, "emitted_right") > 0.99 * metric(r, "emitted"));
}

TEST_CASE("s5 with only the + component reduces to the pitch-catch fidelity") {
    const auto s4 = run_s4_chiral_transfer();
    const auto s5 = run_s5_w_state({{"c_plus", 1}, {"c_minus", 0}, {"routing_runs", 0}});
    CHECK(metric(s5, "fidelity_local_phase") == doctest::Approx(metric(s4, "final_fidelity")).epsilon(1e-3));
}

TEST_CASE("s5: W-class state") {
    require_all_pass(run_s5_w_state());
}

TEST_CASE("s6: entangled dressed-state lattice") {
    const auto r = run_s6_entanglement_lattice();
    require_all_pass(r);
    CHECK(std::abs(metric(r, "xi_sel")) == doctest::Approx(1.0 / 30.0).epsilon(1e-6));
    CHECK(metric(r, "bloch_revival_error") <= 1e-6);
}

TEST_CASE("s7: band-selective emission") {
    const auto r = run_s7_dual_waveguide();
    require_all_pass(r);
    CHECK(metric(r, "omega_plus") == doctest::Approx(metric(r, "omega_plus_expected")).epsilon(1e-12));
}

TEST_CASE("reports are deterministic") {
    const auto a = run_s1_dark_states({{"N", 2}}).to_json().dump();
    const auto b = run_s1_dark_states({{"N", 2}}).to_json().dump();
    CHECK(a == b);
}
