#include "mqwlink/sim.hpp"

#include <algorithm>
#include <cmath>

#include "mqwlink/error.hpp"
#include "mqwlink/parallel.hpp"

namespace mqwlink {

namespace {

// Tolerant integer conversion of a time ratio that should be (close to) whole.
long long steps_floor(double ratio) { return static_cast<long long>(std::floor(ratio + 1e-9)); }
long long steps_ceil(double ratio) { return static_cast<long long>(std::ceil(ratio - 1e-9)); }

}  // namespace

void SimConfig::validate(const LaserParams& p) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sim dt_s must be > 0");
    if (dt > max_step(p) * (1.0 + 1e-12)) throw ConfigError("sim dt_s must not exceed tau_p/10");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("sim t_end_s must be > 0");
    if (!(transient_skip >= 0.0 && transient_skip < t_end)) {
        throw ConfigError("sim transient_skip_s must satisfy 0 <= skip < t_end");
    }
    if (t_end / dt > 1e9) throw ConfigError("sim t_end_s/dt_s exceeds the 1e9 step guard");
    if (record_stride < 1) throw ConfigError("sim record_stride must be >= 1");
    if (!(initial_state.n >= 0.0) || !(initial_state.s >= 0.0)) {
        throw ConfigError("sim initial carrier and photon densities must be >= 0");
    }
}

double default_step(const LaserParams& p, double bit_rate) {
    double dt = max_step(p);
    if (bit_rate > 0.0) dt = std::min(dt, 1.0 / (200.0 * bit_rate));
    return dt;
}

double default_transient_skip(const LaserParams& p) { return 20.0 * p.tau_n; }

std::size_t recorded_samples(const SimConfig& cfg) {
    const long long n_end = steps_floor(cfg.t_end / cfg.dt);
    const long long n_skip = steps_ceil(cfg.transient_skip / cfg.dt);
    if (n_end < n_skip) return 0;
    return static_cast<std::size_t>((n_end - n_skip) / static_cast<long long>(cfg.record_stride)) + 1;
}

Trace run_laser(const LaserParams& p, const Waveform& drive, const SimConfig& cfg) {
    p.validate();
    validate(drive);
    cfg.validate(p);

    const long long n_end = steps_floor(cfg.t_end / cfg.dt);
    const long long n_skip = steps_ceil(cfg.transient_skip / cfg.dt);
    const auto stride = static_cast<long long>(cfg.record_stride);
    const std::size_t count = recorded_samples(cfg);

    Trace tr;
    tr.t0 = static_cast<double>(n_skip) * cfg.dt;
    tr.dt_sample = static_cast<double>(stride) * cfg.dt;
    tr.carrier_density.reserve(count);
    tr.photon_density.reserve(count);
    tr.phase.reserve(count);

    auto record = [&](const LaserState& x) {
        tr.carrier_density.push_back(x.n);
        tr.photon_density.push_back(x.s);
        tr.phase.push_back(x.phi);
    };

    Rk4Integrator integ(p, cfg.initial_state);
    double i_begin = sample(drive, 0.0);
    for (long long n = 0; n < n_end; ++n) {
        if (n >= n_skip && (n - n_skip) % stride == 0) record(integ.state());
        const double t = static_cast<double>(n) * cfg.dt;
        const double t_next = static_cast<double>(n + 1) * cfg.dt;
        const double i_mid = sample(drive, t + 0.5 * cfg.dt);
        const double i_end = sample(drive, t_next);
        integ.step(i_begin, i_mid, i_end, t, cfg.dt);
        i_begin = i_end;
    }
    if (n_end >= n_skip && (n_end - n_skip) % stride == 0) record(integ.state());

    tr.laser_power.resize(tr.size());
    std::transform(tr.photon_density.begin(), tr.photon_density.end(), tr.laser_power.begin(),
                   [&](double s) { return output_power(s, p); });
    tr.modulator_drive.assign(tr.size(), 0.0);
    tr.output_power = tr.laser_power;
    return tr;
}

Trace run_link(const LaserParams& p, const ModulatorParams& m, const Waveform& laser_drive,
               const Waveform& mod_drive, const SimConfig& cfg) {
    m.validate();
    validate(mod_drive);
    Trace tr;
    if (cfg.source == Source::constant_master) {
        p.validate();
        cfg.validate(p);
        const std::size_t count = recorded_samples(cfg);
        tr.t0 = static_cast<double>(steps_ceil(cfg.transient_skip / cfg.dt)) * cfg.dt;
        tr.dt_sample = static_cast<double>(cfg.record_stride) * cfg.dt;
        tr.carrier_density.assign(count, 0.0);
        tr.photon_density.assign(count, 0.0);
        tr.phase.assign(count, 0.0);
        tr.laser_power.assign(count, m.p_in);
    } else {
        tr = run_laser(p, laser_drive, cfg);
    }
    tr.modulator_drive.resize(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) tr.modulator_drive[i] = sample(mod_drive, tr.time(i));
    tr.output_power = modulate(tr.laser_power, tr.t0, tr.dt_sample, mod_drive, m.absorption);
    return tr;
}

std::vector<BatchResult> run_batch(const std::vector<LinkJob>& jobs, unsigned threads) {
    std::vector<BatchResult> results(jobs.size());
    parallel_for(
        jobs.size(),
        [&](std::size_t i) {
            const auto& job = jobs[i];
            try {
                results[i].trace =
                    run_link(job.laser, job.modulator, job.laser_drive, job.mod_drive, job.sim);
            } catch (const Error& e) {
                results[i].error = e.what();
            }
        },
        threads);
    return results;
}

const PrbsNrz* LinkScenario::clock() const {
    if (const auto* p = as_prbs(mod_drive)) return p;
    return as_prbs(laser_drive);
}

ScenarioRun scenario_at_rate(const LinkScenario& s, double bit_rate) {
    if (!(bit_rate > 0.0)) throw ConfigError("bit rate must be > 0");
    ScenarioRun run{with_bit_rate(s.laser_drive, bit_rate), with_bit_rate(s.mod_drive, bit_rate), {}};
    SimConfig& cfg = run.sim;
    cfg.dt = s.dt.value_or(default_step(s.laser, bit_rate));
    cfg.transient_skip = s.transient_skip.value_or(default_transient_skip(s.laser));
    // Start recording on a step boundary so the record spans whole unit intervals.
    cfg.transient_skip = static_cast<double>(steps_ceil(cfg.transient_skip / cfg.dt)) * cfg.dt;
    cfg.t_end = cfg.transient_skip + static_cast<double>(s.n_bits) / bit_rate;
    const double steps_per_ui = 1.0 / (bit_rate * cfg.dt);
    cfg.record_stride = static_cast<std::size_t>(
        std::max(1.0, std::floor(steps_per_ui / static_cast<double>(s.samples_per_ui))));
    cfg.initial_state = s.initial_state;
    cfg.source = s.source;
    return run;
}

}  // namespace mqwlink
