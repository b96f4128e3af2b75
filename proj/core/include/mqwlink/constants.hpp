#pragma once

namespace mqwlink::constants {

// Exact SI values.
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double speed_of_light = 299792458.0;         // m/s
inline constexpr double pi = 3.14159265358979323846;

/// Photon energy h*c/lambda for a vacuum wavelength given in nanometres.
constexpr double photon_energy_from_nm(double lambda_nm) {
    return planck * speed_of_light / (lambda_nm * 1e-9);
}

}  // namespace mqwlink::constants
