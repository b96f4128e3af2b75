#include <benchmark/benchmark.h>

#include "mqwlink/config.hpp"
#include "mqwlink/laser.hpp"
#include "mqwlink/metrics.hpp"
#include "mqwlink/optimizer.hpp"
#include "mqwlink/sim.hpp"

using namespace mqwlink;

static void BM_Rk4Step(benchmark::State& state) {
    const LaserParams p;
    const double current = 2.0 * threshold_current(p);
    Rk4Integrator integ(p, steady_state(p, current));
    const double dt = max_step(p);
    double t = 0.0;
    for (auto _ : state) {
        integ.step(current, current, current, t, dt);
        t += dt;
        benchmark::DoNotOptimize(integ.state());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Rk4Step);

static void BM_SteadyState(benchmark::State& state) {
    const LaserParams p;
    const double current = 2.0 * threshold_current(p);
    for (auto _ : state) benchmark::DoNotOptimize(steady_state(p, current));
}
BENCHMARK(BM_SteadyState);

// Default link, 100k integration steps with the PRBS drives.
static void BM_RunLink(benchmark::State& state) {
    const Config cfg;
    SimConfig sim = cfg.sim_config();
    sim.transient_skip = 0.0;
    sim.t_end = 1e5 * sim.dt;
    sim.record_stride = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_link(cfg.laser, cfg.modulator, cfg.laser_drive, cfg.modulator_drive, sim));
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_RunLink)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_EyeMetrics(benchmark::State& state) {
    const Config cfg;
    const auto s = cfg.scenario();
    const auto run = scenario_at_rate(s, 4e9);
    const auto trace = run_link(s.laser, s.modulator, run.laser_drive, run.mod_drive, run.sim);
    const PrbsNrz& clock = *as_prbs(run.mod_drive);
    for (auto _ : state) benchmark::DoNotOptimize(eye_metrics(fold_eye(trace, clock)));
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(trace.size()));
}
BENCHMARK(BM_EyeMetrics)->Unit(benchmark::kMicrosecond);

static void BM_EvaluateEye(benchmark::State& state) {
    const Config cfg;
    const auto s = cfg.scenario();
    const double rate = static_cast<double>(state.range(0)) * 1e9;
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_eye(s, rate));
}
BENCHMARK(BM_EvaluateEye)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

// Cached-laser evaluation of one operating point (modulator + eye only).
static void BM_LinkEvaluatorCached(benchmark::State& state) {
    const Config cfg;
    const LinkEvaluator eval(cfg.scenario(), cfg.metrics.decision_q);
    const auto point = make_operating_point(2e-3, 0.3, 4.0, 4e9, 1.5, 1.0);
    eval(point);
    for (auto _ : state) benchmark::DoNotOptimize(eval(point));
}
BENCHMARK(BM_LinkEvaluatorCached)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
