#include "mqwlink/modulator.hpp"

#include <algorithm>
#include <cmath>

#include "mqwlink/error.hpp"

namespace mqwlink {

void AbsorptionModel::validate() const {
    if (voltage.size() < 2 || voltage.size() != alpha.size()) {
        throw ConfigError("absorption table needs >= 2 (voltage, alpha) rows of equal count");
    }
    for (std::size_t i = 0; i < voltage.size(); ++i) {
        if (!std::isfinite(voltage[i]) || !std::isfinite(alpha[i])) {
            throw ConfigError("absorption table entries must be finite");
        }
        if (alpha[i] < 0.0) throw ConfigError("absorption alpha must be >= 0");
        if (i > 0 && !(voltage[i] > voltage[i - 1])) {
            throw ConfigError("absorption table voltages must be strictly increasing");
        }
        if (i > 0 && alpha[i] < alpha[i - 1]) {
            throw ConfigError("absorption alpha must be non-decreasing with voltage");
        }
    }
    if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("absorption length must be > 0");
}

double AbsorptionModel::alpha_at(double v) const {
    if (v <= voltage.front()) return alpha.front();
    if (v >= voltage.back()) return alpha.back();
    const auto it = std::upper_bound(voltage.begin(), voltage.end(), v);
    const auto i = static_cast<std::size_t>(it - voltage.begin());
    const double w = (v - voltage[i - 1]) / (voltage[i] - voltage[i - 1]);
    return alpha[i - 1] + (alpha[i] - alpha[i - 1]) * w;
}

AbsorptionModel synthetic_absorption() {
    // SYNTHETIC: smooth Stark-shift-like rise, not measured data.
    return AbsorptionModel{{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0},
                           {2.5e5, 3.0e5, 5.0e5, 1.2e6, 1.5e6, 1.6e6, 1.65e6},
                           1.2e-6};
}

AbsorptionModel closed_form_absorption(double il, double k, double v_on, double v_off,
                                       double length) {
    if (!(il >= 0.0 && il < 1.0)) throw DomainError("closed-form absorption: IL must be in [0, 1)");
    if (!(k >= 1.0)) throw DomainError("closed-form absorption: K must be >= 1");
    if (!(v_on < v_off)) throw DomainError("closed-form absorption: v_on must be below v_off");
    const double alpha_on = -std::log1p(-il) / length;
    return AbsorptionModel{{v_on, v_off}, {alpha_on, k * alpha_on}, length};
}

void ModulatorParams::validate() const {
    absorption.validate();
    if (!(k >= 1.0) || !std::isfinite(k)) throw ConfigError("modulator k must be >= 1");
    if (!(responsivity > 0.0 && responsivity <= 1.3)) {
        throw ConfigError("modulator responsivity must be in (0, 1.3] A/W");
    }
    if (!(c_mod >= 0.0) || !std::isfinite(c_mod)) throw ConfigError("modulator c_mod must be >= 0");
    if (!(v_bias >= 0.0) || !std::isfinite(v_bias)) throw ConfigError("modulator v_bias must be >= 0");
    if (!(v_dd >= 0.0) || !std::isfinite(v_dd)) throw ConfigError("modulator v_dd must be >= 0");
    if (!(p_in >= 0.0) || !std::isfinite(p_in)) throw ConfigError("modulator p_in must be >= 0");
    if (!(activity >= 0.0 && activity <= 1.0)) throw ConfigError("modulator activity must be in [0, 1]");
}

double contrast_from_il(double il, double k) {
    if (!(il >= 0.0 && il < 1.0)) throw DomainError("contrast_from_il: IL must be in [0, 1)");
    if (!(k >= 1.0)) throw DomainError("contrast_from_il: K must be >= 1");
    return std::pow(1.0 - il, 1.0 - k);
}

double il_from_cr(double cr, double k) {
    if (!(cr >= 1.0)) throw DomainError("il_from_cr: CR must be >= 1");
    if (cr == 1.0 && k >= 1.0) return 0.0;
    if (!(k > 1.0)) throw DomainError("il_from_cr: CR > 1 is unreachable with K <= 1");
    return 1.0 - std::pow(cr, 1.0 / (1.0 - k));
}

double reflectivity(double v, const AbsorptionModel& m) { return std::exp(-m.alpha_at(v) * m.length); }

std::vector<double> modulate(std::span<const double> input_power, double t0, double dt,
                             const Waveform& drive, const AbsorptionModel& m) {
    std::vector<double> out(input_power.size());
    for (std::size_t i = 0; i < input_power.size(); ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        out[i] = input_power[i] * reflectivity(sample(drive, t), m);
    }
    return out;
}

ModEfficiency mod_efficiency(double il, double cr, const ModulatorParams& m) {
    if (!(il >= 0.0 && il < 1.0)) throw DomainError("mod_efficiency: IL must be in [0, 1)");
    if (!(cr >= 1.0)) throw DomainError("mod_efficiency: CR must be >= 1");
    ModEfficiency r;
    r.eta_mod = 0.5 * m.responsivity *
                (il * (m.v_bias - m.v_dd) + (1.0 - (1.0 - il) / cr) * m.v_bias);
    r.static_power = r.eta_mod * m.p_in;
    r.non_physical = r.eta_mod < 0.0;
    return r;
}

double dynamic_power(const ModulatorParams& m, double bit_rate) {
    if (!(bit_rate > 0.0)) throw DomainError("dynamic_power: bit_rate must be > 0");
    return m.activity * m.c_mod * m.v_dd * m.v_dd * bit_rate;
}

OperatingPoint make_operating_point(double bias_current, double il, double k, double bit_rate,
                                    double v_bias, double v_dd) {
    return {bias_current, il, contrast_from_il(il, k), bit_rate, v_bias, v_dd};
}

PowerBreakdown transmitter_power(const OperatingPoint& point, const LaserParams& laser,
                                 const ModulatorParams& m, Source source) {
    if (!(point.bias_current >= 0.0)) throw DomainError("transmitter_power: bias current must be >= 0");
    ModulatorParams local = m;
    local.v_bias = point.v_bias;
    local.v_dd = point.v_dd;
    if (source == Source::laser) {
        local.p_in = output_power(steady_state(laser, point.bias_current).s, laser);
    }
    const auto eff = mod_efficiency(point.il, point.cr, local);
    PowerBreakdown b;
    b.eta_mod = eff.eta_mod;
    b.static_power = eff.static_power;
    b.non_physical = eff.non_physical;
    b.input_power = local.p_in;
    b.dynamic_power = dynamic_power(local, point.bit_rate);
    b.laser_wall_power = laser.drop_voltage * point.bias_current;
    b.total = b.static_power + b.dynamic_power + b.laser_wall_power;
    return b;
}

}  // namespace mqwlink
