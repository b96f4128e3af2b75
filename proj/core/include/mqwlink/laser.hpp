#pragma once

#include "mqwlink/constants.hpp"
#include "mqwlink/waveform.hpp"

namespace mqwlink {

/// Coefficients of the single-mode rate equations. SI units throughout.
struct LaserParams {
    double q = constants::elementary_charge;  // C
    double volume = 1.0e-17;                  // active volume V_a, m^3
    double g0 = 5.0e-12;                      // differential gain, m^3/s
    double n0 = 1.0e24;                       // reference carrier density, m^-3
    double eps = 1.0e-23;                     // gain compression, m^3
    double tau_n = 3.0e-9;                    // carrier lifetime, s
    double tau_p = 2.0e-12;                   // photon lifetime, s
    double gamma = 0.2;                       // confinement factor
    double beta = 1.0e-4;                     // spontaneous-emission coupling
    double alpha = 3.0;                       // linewidth enhancement
    double eta_sp = 0.4;                      // output efficiency
    double photon_energy = constants::photon_energy_from_nm(850.0);  // J
    double drop_voltage = 1.5;                // diode drop for wall-plug power, V

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;

    bool operator==(const LaserParams&) const = default;
};

struct LaserState {
    double n = 0.0;    // carrier density, m^-3
    double s = 0.0;    // photon density, m^-3
    double phi = 0.0;  // optical phase, rad

    bool operator==(const LaserState&) const = default;
};

struct LaserDerivatives {
    double dn = 0.0;
    double ds = 0.0;
    double dphi = 0.0;
};

LaserDerivatives derivatives(const LaserState& x, double current, const LaserParams& p);

/// Largest step accepted by rk4_step (tau_p / 10).
inline double max_step(const LaserParams& p) { return p.tau_p / 10.0; }

/// One classical RK4 step with the drive sampled at t, t + dt/2 and t + dt.
/// Throws NegativeDensityError if N or S of the result is negative.
LaserState rk4_step(const LaserState& x, const Waveform& drive, double t, double dt,
                    const LaserParams& p);

/// RK4 increment (y - x) for one step with the three drive samples already evaluated.
LaserDerivatives rk4_increment(const LaserState& x, double i_begin, double i_mid, double i_end,
                               double dt, const LaserParams& p);

/// Same step with the three drive samples already evaluated.
LaserState rk4_step(const LaserState& x, double i_begin, double i_mid, double i_end, double t,
                    double dt, const LaserParams& p);

/// Fixed-step RK4 integrator that accumulates the state with compensated (Kahan)
/// summation, so round-off does not grow with the number of steps.
class Rk4Integrator {
public:
    Rk4Integrator(const LaserParams& p, const LaserState& initial) : p_(p), x_(initial) {}

    /// Advances from t to t + dt; throws NegativeDensityError like rk4_step.
    void step(double i_begin, double i_mid, double i_end, double t, double dt);

    const LaserState& state() const noexcept { return x_; }

private:
    const LaserParams& p_;
    LaserState x_;
    LaserState carry_{};
};

/// Emitted optical power for photon density s: s * eta_sp * h nu * V_a / (2 Gamma tau_p).
double output_power(double s, const LaserParams& p);

/// Photon density that zeroes dS/dt at carrier density n (the non-negative root).
/// Returns +inf where no finite root exists (eps = 0 at or above the gain clamp).
double photon_density_balance(double n, const LaserParams& p);

/// Time-independent solution of the carrier and photon equations; phi is returned as 0.
/// Throws NoConvergenceError if the residuals do not reach 1e-9 relative.
LaserState steady_state(const LaserParams& p, double current);

/// Relative residuals of dN/dt and dS/dt, each scaled by the largest term of its equation.
struct Residual {
    double carrier = 0.0;
    double photon = 0.0;
};
Residual steady_residual(const LaserState& x, double current, const LaserParams& p);

/// Gain-clamped carrier density N0 + 1/(Gamma g0 tau_p).
double threshold_density(const LaserParams& p);

/// q V_a N_th / tau_n; the beta = 0, eps = 0 estimate of the lasing threshold.
double threshold_current(const LaserParams& p);

/// Small-signal relaxation-oscillation frequency sqrt(g0 S / tau_p) / (2 pi) at the
/// steady state for `current`. Throws BelowThresholdError if current <= I_th.
double relaxation_frequency(const LaserParams& p, double current);

}  // namespace mqwlink
