#include <benchmark/benchmark.h>

#include <numbers>

#include "gsa/bath_lattice.hpp"
#include "gsa/dynamics.hpp"

using namespace gsa;

namespace {

SystemDescription pitch_catch(int sites) {
    SystemDescription d;
    ChainSpec c;
    c.id = "w";
    c.num_sites = sites;
    c.first_site = -sites / 2;
    c.hopping = 12.5;
    c.boundary = Boundary::absorbing(sites / 8, 1.0);
    d.chains = {c};
    const double J = std::numbers::sqrt2 * 12.5;
    d.superatoms = {SuperatomSpec::pair("A", 0, 0, J), SuperatomSpec::pair("B", 0, 0, J)};
    const auto emit = Schedule::emit_ramp("e", 1.0, 0.045, 0.0);
    d.schedules = {emit, Schedule::absorb_partner("a", emit, 100.0 / (std::numbers::sqrt2 * 12.5))};
    auto point = [](std::string gsa, int site, double phase, std::string schedule) {
        CouplingPoint p;
        p.atom = {std::move(gsa), 0};
        p.waveguide = "w";
        p.site = site;
        p.amplitude = 1.0;
        p.phase = phase;
        p.schedule = std::move(schedule);
        return p;
    };
    d.couplings = {point("A", 0, 0, "e"), point("A", 2, std::numbers::pi / 2, "e"), point("B", 100, 0, "a"),
                   point("B", 102, std::numbers::pi / 2, "a")};
    return d;
}

void BM_apply(benchmark::State& state) {
    const AssembledSystem s(pitch_catch(static_cast<int>(state.range(0))));
    const auto n = static_cast<Eigen::Index>(s.basis().size());
    Eigen::VectorXcd x = Eigen::VectorXcd::Random(n), y(n);
    for (auto _ : state) {
        s.apply(-5.0, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_apply)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_rk4_steps(benchmark::State& state) {
    const AssembledSystem s(pitch_catch(static_cast<int>(state.range(0))));
    const auto init = s.make_state({{{"A", 0}, 1.0}, {{"A", 1}, 1.0}}, s.ramp_start());
    const double dt = s.default_dt();
    for (auto _ : state) {
        const auto r = propagate(s, init, init.time + 100 * dt, {dt});
        benchmark::DoNotOptimize(r.final_state.amplitudes.data());
    }
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_rk4_steps)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_greens_function(benchmark::State& state) {
    ChainSpec c;
    c.hopping = 12.5;
    int d = 0;
    for (auto _ : state) benchmark::DoNotOptimize(retarded_greens_function(c, 10.0, d++ % 64));
}
BENCHMARK(BM_greens_function);

}  // namespace

BENCHMARK_MAIN();
