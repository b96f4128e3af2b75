#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mqwlink/sim.hpp"

namespace mqwlink {

/// Q for a Gaussian BER of 1e-12.
inline constexpr double kDefaultDecisionQ = 7.03;

struct EyeSample {
    double ui = 0.0;     // position inside the 2-UI fold, [0, 2)
    double power = 0.0;  // W
    std::uint8_t bit = 0;  // logic value of the unit interval the sample falls in
};

struct EyeAccumulation {
    double bit_rate = 0.0;
    double samples_per_ui = 0.0;
    std::vector<EyeSample> samples;
};

struct EyeMetrics {
    double eye_height = 0.0;  // W
    double eye_width = 0.0;   // s
    double level_one_mean = 0.0;
    double level_zero_mean = 0.0;
    double level_one_std = 0.0;
    double level_zero_std = 0.0;
    double q_factor = 0.0;
    double extinction_ratio = 1.0;
    double ber_estimate = 0.5;
    bool error_free = false;
};

/// Folds output_power modulo two unit intervals of the clock waveform, labelling every
/// sample with the transmitted bit. Throws InsufficientDataError when the trace spans
/// fewer than 32 unit intervals or has fewer than 20 samples per unit interval.
EyeAccumulation fold_eye(const Trace& trace, const PrbsNrz& clock);

/// Same fold over an arbitrary power series sampled at t0 + i dt.
EyeAccumulation fold_eye(std::span<const double> power, double t0, double dt, const PrbsNrz& clock);

/// Level statistics over the mid-UI window [0.4, 0.6], Q = (mu1 - mu0)/(s1 + s0) with the
/// denominator floored at 1e-4 (mu1 - mu0), Gaussian BER and the error-free decision.
EyeMetrics eye_metrics(const EyeAccumulation& eye, double decision_q = kDefaultDecisionQ);

/// Link simulation at one bit rate followed by fold_eye and eye_metrics.
EyeMetrics evaluate_eye(const LinkScenario& s, double bit_rate, double decision_q = kDefaultDecisionQ);

/// evaluate_eye at every rate (concurrently); result i belongs to rates[i].
std::vector<EyeMetrics> eye_vs_bitrate(const LinkScenario& s, const std::vector<double>& rates,
                                       double decision_q = kDefaultDecisionQ);

/// Largest rate in `rates` (ascending) whose eye is error free; empty if none is.
std::optional<double> max_error_free_bitrate(const LinkScenario& s, const std::vector<double>& rates,
                                             double decision_q = kDefaultDecisionQ);

}  // namespace mqwlink
