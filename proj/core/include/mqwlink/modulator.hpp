#pragma once

#include <span>
#include <string>
#include <vector>

#include "mqwlink/laser.hpp"
#include "mqwlink/waveform.hpp"

namespace mqwlink {

/// Absorption coefficient versus reverse voltage, linearly interpolated and clamped
/// at the table ends, with the optical interaction length.
struct AbsorptionModel {
    std::vector<double> voltage;  // V, strictly increasing
    std::vector<double> alpha;    // 1/m, non-negative, non-decreasing
    double length = 1.2e-6;       // m

    void validate() const;
    double alpha_at(double v) const;
    double alpha_min() const { return alpha.front(); }
    double alpha_max() const { return alpha.back(); }

    bool operator==(const AbsorptionModel&) const = default;
};

/// Synthetic QCSE-like table shipped as the default. Not measured data.
AbsorptionModel synthetic_absorption();

/// Two-node table reproducing a given (IL, K) pair on the closed-form trade-off:
/// exp(-alpha L) = 1 - IL at v_on and alpha(v_off) = K alpha(v_on). Requires v_on < v_off.
AbsorptionModel closed_form_absorption(double il, double k, double v_on, double v_off,
                                       double length);

enum class Source { laser, constant_master };

struct ModulatorParams {
    AbsorptionModel absorption = synthetic_absorption();
    double k = 4.0;              // alpha_max / alpha_min for closed-form sweeps
    double responsivity = 0.5;   // A/W
    double v_bias = 1.5;         // V
    double v_dd = 1.0;           // V
    double c_mod = 50e-15;       // F
    double p_in = 1.0e-3;        // W, constant master source power
    double activity = 0.5;

    void validate() const;

    bool operator==(const ModulatorParams&) const = default;
};

/// CR = (1 - IL)^(1 - K).
double contrast_from_il(double il, double k);

/// IL = 1 - CR^(1/(1 - K)); inverse of contrast_from_il.
double il_from_cr(double cr, double k);

/// exp(-alpha(v) L).
double reflectivity(double v, const AbsorptionModel& m);

/// Quasi-static transfer: out[i] = in[i] * R(drive(t0 + i dt)).
std::vector<double> modulate(std::span<const double> input_power, double t0, double dt,
                             const Waveform& drive, const AbsorptionModel& m);

struct ModEfficiency {
    double eta_mod = 0.0;
    double static_power = 0.0;  // W
    bool non_physical = false;  // eta_mod < 0
};

/// eta = 0.5 R [IL (V_bias - V_dd) + (1 - (1 - IL)/CR) V_bias]; static power eta * P_i.
ModEfficiency mod_efficiency(double il, double cr, const ModulatorParams& m);

/// activity * C * V_dd^2 * bit_rate.
double dynamic_power(const ModulatorParams& m, double bit_rate);

struct OperatingPoint {
    double bias_current = 0.0;  // A
    double il = 0.0;
    double cr = 1.0;
    double bit_rate = 0.0;  // bit/s
    double v_bias = 0.0;    // V
    double v_dd = 0.0;      // V

    bool operator==(const OperatingPoint&) const = default;
};

/// Builds a point whose CR sits on the closed-form trade-off for ratio K.
OperatingPoint make_operating_point(double bias_current, double il, double k, double bit_rate,
                                    double v_bias, double v_dd);

struct PowerBreakdown {
    double static_power = 0.0;
    double dynamic_power = 0.0;
    double laser_wall_power = 0.0;
    double total = 0.0;
    double eta_mod = 0.0;
    double input_power = 0.0;  // P_i used for the static term
    bool non_physical = false;
};

/// Static + dynamic modulator power plus the laser's electrical input. P_i is the
/// configured master power for Source::constant_master, otherwise the laser's
/// steady-state emission at the point's bias current.
PowerBreakdown transmitter_power(const OperatingPoint& point, const LaserParams& laser,
                                 const ModulatorParams& m, Source source = Source::laser);

}  // namespace mqwlink
