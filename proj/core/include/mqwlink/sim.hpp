#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mqwlink/laser.hpp"
#include "mqwlink/modulator.hpp"
#include "mqwlink/waveform.hpp"

namespace mqwlink {

struct SimConfig {
    double t_end = 70e-9;
    double dt = 2e-13;
    std::size_t record_stride = 1;
    double transient_skip = 60e-9;
    LaserState initial_state{};
    Source source = Source::laser;

    /// Throws ConfigError unless 0 < dt <= tau_p/10, 0 <= skip < t_end, t_end/dt <= 1e9.
    void validate(const LaserParams& p) const;
};

/// min(tau_p/10, 1/(200 bit_rate)); bit_rate <= 0 ignores the second bound.
double default_step(const LaserParams& p, double bit_rate);

/// 20 tau_n.
double default_transient_skip(const LaserParams& p);

/// Uniformly sampled record of one run. All series have equal length.
struct Trace {
    double t0 = 0.0;
    double dt_sample = 0.0;
    std::vector<double> carrier_density;  // m^-3
    std::vector<double> photon_density;   // m^-3
    std::vector<double> phase;            // rad
    std::vector<double> laser_power;      // W
    std::vector<double> modulator_drive;  // V
    std::vector<double> output_power;     // W

    std::size_t size() const noexcept { return photon_density.size(); }
    double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt_sample; }

    bool operator==(const Trace&) const = default;
};

/// Number of samples a run records for this configuration.
std::size_t recorded_samples(const SimConfig& cfg);

/// Integrates the rate equations on [0, t_end] with fixed RK4 steps; records every
/// record_stride-th step from transient_skip on. Without a modulator the drive series
/// is zero and output_power equals laser_power.
Trace run_laser(const LaserParams& p, const Waveform& drive, const SimConfig& cfg);

/// Laser run followed by the modulator. With Source::constant_master the laser is not
/// integrated and laser_power is the configured P_i.
Trace run_link(const LaserParams& p, const ModulatorParams& m, const Waveform& laser_drive,
               const Waveform& mod_drive, const SimConfig& cfg);

struct LinkJob {
    LaserParams laser;
    ModulatorParams modulator;
    Waveform laser_drive;
    Waveform mod_drive;
    SimConfig sim;
};

struct BatchResult {
    std::optional<Trace> trace;
    std::string error;  // set when trace is empty
};

/// Runs independent jobs concurrently; result i belongs to job i.
std::vector<BatchResult> run_batch(const std::vector<LinkJob>& jobs, unsigned threads = 0);

/// Everything needed to run the link at an arbitrary bit rate: drives are rebound to
/// the rate, the step follows default_step unless fixed, and the record covers
/// n_bits unit intervals after the transient skip.
struct LinkScenario {
    LaserParams laser;
    ModulatorParams modulator;
    Waveform laser_drive = Constant{2e-3};
    Waveform mod_drive = Constant{0.0};
    Source source = Source::laser;
    std::optional<double> dt;
    std::optional<double> transient_skip;
    LaserState initial_state{};
    std::size_t n_bits = 128;
    std::size_t samples_per_ui = 50;  // recording density target

    /// The drive that defines the bit clock (modulator PRBS first, then laser PRBS).
    const PrbsNrz* clock() const;
};

struct ScenarioRun {
    Waveform laser_drive;
    Waveform mod_drive;
    SimConfig sim;
};

ScenarioRun scenario_at_rate(const LinkScenario& s, double bit_rate);

}  // namespace mqwlink
