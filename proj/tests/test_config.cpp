#include <doctest.h>

#include <filesystem>
#include <numbers>

#include "gsa/config.hpp"
#include "gsa/errors.hpp"

using namespace gsa;
namespace fs = std::filesystem;

namespace {

std::string error_path(const std::string& yaml) {
    try {
        parse_config(yaml);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<none>";
}

const char* giant_atom = R"(
scenario: custom
system:
  chains:
    - {id: w, sites: 41, first_site: -20, hopping: 1}
  superatoms:
    - {id: A, type: single, frequencies: [FREQ]}
  couplings:
    - {gsa: A, atom: 0, waveguide: w, site: 0, amplitude: 0.1, propagating: true}
initial_state:
  amplitudes:
    - {gsa: A, atom: 0, re: 1}
integration:
  horizon: HORIZON
)";

std::string giant(const std::string& freq, const std::string& horizon) {
    std::string s = giant_atom;
    s.replace(s.find("FREQ"), 4, freq);
    s.replace(s.find("HORIZON"), 7, horizon);
    return s;
}

}  // namespace

TEST_CASE("empty and incomplete documents name the missing key") {
    for (const char* text : {"", "{}", "# nothing\n"}) {
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("scenario") != std::string::npos);
        }
    }
    CHECK(error_path("parameters: {xi: 1}\n") == "<document>");
}

TEST_CASE("errors carry the path of the offending key") {
    CHECK(error_path("scenario: s1\nintegration: {dt: 0.01, horizn: 3}\n") == "integration.horizn");
    CHECK(error_path("scenario: s1\nparameters: {xi: abc}\n") == "parameters.xi");
    CHECK(error_path("scenario: s1\nsampling: {interval: -1}\n") == "sampling.interval");
    CHECK(error_path("scenario: s1\nbogus: 1\n") == "bogus");
    CHECK_THROWS_AS(parse_config("scenario: s99\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("scenario: s1\nparameters: {no_such_parameter: 1}\n"), ConfigError);
    std::string bad = giant("0", "10");
    bad.replace(bad.find("hopping"), 7, "hoping");
    CHECK(error_path(bad) == "system.chains[0].hoping");
}

TEST_CASE("bundled configs parse, and serialisation is a fixed point") {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(GSA_CONFIG_DIR)) {
        if (entry.path().extension() != ".yaml") continue;
        INFO(entry.path().filename().string());
        const auto config = load_config(entry.path().string());
        const auto text = serialize_config(config);
        const auto again = parse_config(text);
        CHECK(again == config);
        CHECK(serialize_config(again) == text);
        ++count;
    }
    CHECK(count >= 9);
}

TEST_CASE("the chiral pitch-catch config carries the reference parameters") {
    const auto c = load_config(std::string(GSA_CONFIG_DIR) + "/s4.yaml");
    CHECK(c.scenario == "s4");
    CHECK(c.parameters.at("xi") == 12.5);
    CHECK(c.parameters.at("beta") == 0.045);
    CHECK(c.parameters.at("phi") == std::numbers::pi / 2);
    CHECK(c.parameters.at("epsilon") == 1e-3);
    CHECK(c.parameters.at("N") == 2.0);
    CHECK(c.parameters.at("emitter_site") == 0.0);
    CHECK(c.parameters.at("receiver_site") == 100.0);
    CHECK(c.parameters.at("J_over_xi") == std::numbers::sqrt2);
}

TEST_CASE("physical validation of custom systems") {
    CHECK_NOTHROW(parse_config(giant("0", "5")));
    try {
        parse_config(giant("3", "5"));
        FAIL("expected PhysicsViolation");
    } catch (const PhysicsViolation& e) {
        CHECK(std::string(e.what()).find("OutOfBand") != std::string::npos);
        CHECK(e.path() == "system.couplings[0]");
    }
    CHECK_THROWS_AS(parse_config(giant("0", "100")), PhysicsViolation);
}

TEST_CASE("sweep expansion") {
    const auto c = load_config(std::string(GSA_CONFIG_DIR) + "/s4_beta_sweep.yaml");
    REQUIRE(c.sweep.size() == 1);
    const auto points = expand_sweep(c);
    REQUIRE(points.size() == 5);
    const double expected[] = {0.025, 0.035, 0.045, 0.055, 0.065};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(points[i].coordinates == std::vector<double>{expected[i]});
        CHECK(points[i].config.parameters.at("beta") == expected[i]);
        CHECK(points[i].config.sweep.empty());
        CHECK(points[i].config.parameters.size() == 1);
    }

    auto grid = parse_config("scenario: s1\nsweep:\n  - {path: parameters.g, values: [1, 2]}\n"
                             "  - {path: parameters.J_over_xi, values: [1, 1.2, 1.4]}\n");
    const auto product = expand_sweep(grid);
    REQUIRE(product.size() == 6);
    CHECK(product[0].coordinates == std::vector<double>{1, 1});
    CHECK(product[1].coordinates == std::vector<double>{1, 1.2});
    CHECK(product[5].coordinates == std::vector<double>{2, 1.4});
    grid.sweep[0].path = "parameters.nope";
    CHECK_THROWS_AS(expand_sweep(grid), ConfigError);
}
