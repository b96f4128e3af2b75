#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "mqwlink/laser.hpp"
#include "mqwlink/metrics.hpp"
#include "mqwlink/modulator.hpp"
#include "mqwlink/optimizer.hpp"
#include "mqwlink/sim.hpp"
#include "mqwlink/waveform.hpp"

namespace mqwlink {

/// [sim] section. Unset dt and transient_skip resolve automatically (default_step and
/// default_transient_skip).
struct SimSection {
    double t_end = 70e-9;
    std::optional<double> dt;
    std::size_t record_stride = 1;
    std::optional<double> transient_skip;
    LaserState initial{};
    Source source = Source::laser;

    bool operator==(const SimSection&) const = default;
};

/// [metrics] section; applies to the eye based commands.
struct MetricsSection {
    double decision_q = kDefaultDecisionQ;
    std::size_t n_bits = 128;
    std::size_t samples_per_ui = 50;

    bool operator==(const MetricsSection&) const = default;
};

struct SweepSection {
    std::vector<double> bias_current{1.0e-3, 1.5e-3, 2.0e-3, 2.5e-3, 3.0e-3};
    std::vector<double> il{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> bit_rate{4e9};
    std::vector<double> v_bias{1.5};
    std::vector<double> v_dd{1.0};

    bool operator==(const SweepSection&) const = default;
};

struct OptimizeSection {
    double bias_min = 0.5e-3;
    double bias_max = 4.0e-3;
    double il_min = 0.05;
    double il_max = 0.6;
    std::size_t grid_points = 16;
    double rel_tol = 1e-3;

    bool operator==(const OptimizeSection&) const = default;
};

inline Waveform default_laser_drive() { return PrbsNrz(1e9, 7, 0x7f, 2.4e-3, 4.4e-3, 0.7e-9); }
inline Waveform default_modulator_drive() { return PrbsNrz(1e9, 7, 0x7f, 1.5, 0.5, 0.7e-9); }

/// Fully resolved run configuration. A default-constructed Config is the shipped
/// default scenario (configs/default.ini).
struct Config {
    LaserParams laser;
    double lambda_nm = 850.0;  // source of laser.photon_energy
    ModulatorParams modulator;
    Waveform laser_drive = default_laser_drive();
    Waveform modulator_drive = default_modulator_drive();
    SimSection sim;
    MetricsSection metrics;
    SweepSection sweep;
    OptimizeSection optimize;

    bool operator==(const Config&) const = default;

    /// Time-domain run settings with automatic values filled in.
    SimConfig sim_config() const;
    LinkScenario scenario() const;
    SweepAxes sweep_axes() const;
    Bounds bounds() const;
    MinimizeOptions minimize_options() const;
    Constraints constraints() const;

    /// Replaces the seed of every PRBS drive.
    void override_seed(std::uint64_t seed);
};

/// Parses INI text: `[section]` headers, `key = value` lines, `#` comments. Relative
/// `absorption_csv` paths resolve against `base_dir`; the table is loaded immediately.
/// Throws ConfigError with the line number for syntax errors, unknown sections or keys,
/// and for values that violate an invariant (the message names the key).
Config parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads and parses a config file; relative paths inside resolve against its directory.
Config load_config(const std::filesystem::path& file);

/// INI text that parses back to exactly `cfg` (every key written, defaults included).
std::string to_ini(const Config& cfg);

/// to_ini with every line prefixed by "# ", for output file headers.
std::string echo_config(const Config& cfg);

/// Recovers the Config from the leading "# " comment block of an output file.
Config config_from_echo(std::string_view text);

/// Two-column CSV `voltage_v,alpha_per_m` with a header row; `#` comment lines allowed.
AbsorptionModel read_absorption_csv(std::string_view text, double length);
AbsorptionModel load_absorption_csv(const std::filesystem::path& file, double length);

}  // namespace mqwlink
