#include "mqwlink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mqwlink/error.hpp"
#include "mqwlink/parallel.hpp"

namespace mqwlink {

namespace {

constexpr double kWindowLo = 0.4;
constexpr double kWindowHi = 0.6;
constexpr std::size_t kMinBits = 32;
constexpr double kMinSamplesPerUi = 20.0;
constexpr std::size_t kMinLevelSamples = 8;

struct Moments {
    double mean = 0.0;
    double std = 0.0;
    std::size_t count = 0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    m.count = v.size();
    if (v.empty()) return m;
    double sum = 0.0;
    for (double x : v) sum += x;
    m.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(v.size()));
    return m;
}

bool in_window(double ui) {
    const double frac = ui - std::floor(ui);
    return frac >= kWindowLo && frac <= kWindowHi;
}

}  // namespace

EyeAccumulation fold_eye(std::span<const double> power, double t0, double dt, const PrbsNrz& clock) {
    const double rate = clock.bit_rate();
    const double samples_per_ui = 1.0 / (rate * dt);
    const double span_ui = static_cast<double>(power.size() > 0 ? power.size() - 1 : 0) * dt * rate;
    if (!(samples_per_ui >= kMinSamplesPerUi)) {
        throw InsufficientDataError("fold_eye: fewer than 20 samples per unit interval");
    }
    if (!(span_ui >= static_cast<double>(kMinBits))) {
        throw InsufficientDataError("fold_eye: trace covers fewer than 32 unit intervals");
    }
    EyeAccumulation eye;
    eye.bit_rate = rate;
    eye.samples_per_ui = samples_per_ui;
    eye.samples.reserve(power.size());
    for (std::size_t i = 0; i < power.size(); ++i) {
        const double pos = (t0 + static_cast<double>(i) * dt) * rate;
        const auto k = static_cast<std::uint64_t>(std::floor(pos));
        const double ui = pos - 2.0 * std::floor(0.5 * pos);
        eye.samples.push_back({ui, power[i], static_cast<std::uint8_t>(clock.bit(k))});
    }
    return eye;
}

EyeAccumulation fold_eye(const Trace& trace, const PrbsNrz& clock) {
    return fold_eye(trace.output_power, trace.t0, trace.dt_sample, clock);
}

EyeMetrics eye_metrics(const EyeAccumulation& eye, double decision_q) {
    std::vector<double> ones;
    std::vector<double> zeros;
    for (const auto& s : eye.samples) {
        if (!in_window(s.ui)) continue;
        (s.bit ? ones : zeros).push_back(s.power);
    }
    if (ones.size() < kMinLevelSamples || zeros.size() < kMinLevelSamples) {
        throw MissingLevelError("eye_metrics: a logic level has too few mid-UI samples");
    }
    const auto one = moments(ones);
    const auto zero = moments(zeros);

    EyeMetrics m;
    m.level_one_mean = one.mean;
    m.level_zero_mean = zero.mean;
    m.level_one_std = one.std;
    m.level_zero_std = zero.std;

    const double opening = *std::min_element(ones.begin(), ones.end()) -
                           *std::max_element(zeros.begin(), zeros.end());
    m.eye_height = std::max(0.0, opening);

    const double spread = one.mean - zero.mean;
    const double denom = std::max(one.std + zero.std, 1e-4 * std::abs(spread));
    m.q_factor = denom > 0.0 ? spread / denom : 0.0;
    m.ber_estimate = std::clamp(0.5 * std::erfc(m.q_factor / std::sqrt(2.0)), 0.0, 0.5);
    m.error_free = m.q_factor >= decision_q;
    m.extinction_ratio =
        std::max(1.0, one.mean / std::max(zero.mean, std::numeric_limits<double>::min()));

    // Horizontal opening: contiguous phase bins around mid-UI where every one sample
    // lies above every zero sample.
    const auto bins = static_cast<std::size_t>(
        std::clamp(std::floor(eye.samples_per_ui), 1.0, 100.0));
    std::vector<double> min_one(bins, std::numeric_limits<double>::infinity());
    std::vector<double> max_zero(bins, -std::numeric_limits<double>::infinity());
    for (const auto& s : eye.samples) {
        const double frac = s.ui - std::floor(s.ui);
        const auto b = std::min(bins - 1, static_cast<std::size_t>(frac * static_cast<double>(bins)));
        if (s.bit) {
            min_one[b] = std::min(min_one[b], s.power);
        } else {
            max_zero[b] = std::max(max_zero[b], s.power);
        }
    }
    auto open = [&](std::size_t b) {
        return std::isfinite(min_one[b]) && std::isfinite(max_zero[b]) && min_one[b] > max_zero[b];
    };
    const std::size_t centre = bins / 2;
    std::size_t width = 0;
    if (open(centre)) {
        width = 1;
        for (std::size_t b = centre + 1; b < bins && open(b); ++b) ++width;
        for (std::size_t b = centre; b-- > 0 && open(b);) ++width;
    }
    m.eye_width = static_cast<double>(width) / static_cast<double>(bins) / eye.bit_rate;
    return m;
}

EyeMetrics evaluate_eye(const LinkScenario& s, double bit_rate, double decision_q) {
    const auto run = scenario_at_rate(s, bit_rate);
    LinkScenario bound = s;
    bound.laser_drive = run.laser_drive;
    bound.mod_drive = run.mod_drive;
    const PrbsNrz* clock = bound.clock();
    if (!clock) throw ConfigError("eye analysis needs a prbs_nrz drive to define the bit clock");
    const auto trace = run_link(s.laser, s.modulator, run.laser_drive, run.mod_drive, run.sim);
    return eye_metrics(fold_eye(trace, *clock), decision_q);
}

std::vector<EyeMetrics> eye_vs_bitrate(const LinkScenario& s, const std::vector<double>& rates,
                                       double decision_q) {
    std::vector<EyeMetrics> out(rates.size());
    parallel_for(rates.size(), [&](std::size_t i) { out[i] = evaluate_eye(s, rates[i], decision_q); });
    return out;
}

std::optional<double> max_error_free_bitrate(const LinkScenario& s, const std::vector<double>& rates,
                                             double decision_q) {
    if (rates.empty()) throw ConfigError("max_error_free_bitrate: no rates given");
    if (!std::is_sorted(rates.begin(), rates.end())) {
        throw ConfigError("max_error_free_bitrate: rates must be ascending");
    }
    const auto eyes = eye_vs_bitrate(s, rates, decision_q);
    for (std::size_t i = rates.size(); i-- > 0;) {
        if (eyes[i].error_free) return rates[i];
    }
    return std::nullopt;
}

}  // namespace mqwlink
