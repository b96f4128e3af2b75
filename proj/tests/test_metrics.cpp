#include <cmath>
#include <random>

#include "doctest.h"
#include "mqwlink/error.hpp"
#include "mqwlink/metrics.hpp"

using namespace mqwlink;

namespace {

// Laser and modulator both driven by the same PRBS7 pattern.
LinkScenario direct_link(double edge_fraction) {
    LinkScenario s;
    s.laser_drive = PrbsNrz(1e9, 7, 0x7f, 2.4e-3, 4.4e-3, edge_fraction * 1e-9);
    s.mod_drive = PrbsNrz(1e9, 7, 0x7f, 1.5, 0.5, edge_fraction * 1e-9);
    return s;
}

// Master source with only the modulator switching.
LinkScenario master_link(double edge_fraction) {
    LinkScenario s;
    s.source = Source::constant_master;
    s.mod_drive = PrbsNrz(1e9, 7, 0x7f, 1.5, 0.5, edge_fraction * 1e-9);
    return s;
}

std::vector<double> square_wave(const PrbsNrz& clock, double dt, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::uint64_t>(std::floor(static_cast<double>(i) * dt * clock.bit_rate()));
        v[i] = clock.bit(k) ? hi : lo;
    }
    return v;
}

}  // namespace

TEST_CASE("ideal square wave folds onto two levels") {
    const PrbsNrz clock(1e9, 7, 0x7f, 0.0, 1.0, 0.0);
    const double dt = 1e-9 / 40.0;
    const auto power = square_wave(clock, dt, 40 * 200, 1e-3, 2e-3);
    const auto eye = fold_eye(power, 0.0, dt, clock);
    for (const auto& s : eye.samples) {
        CHECK((s.power == 1e-3 || s.power == 2e-3));
        CHECK(s.ui >= 0.0);
        CHECK(s.ui < 2.0);
        CHECK(s.power == (s.bit ? 2e-3 : 1e-3));
    }
    const auto m = eye_metrics(eye);
    CHECK(m.level_one_mean == doctest::Approx(2e-3).epsilon(1e-14));
    CHECK(m.level_zero_mean == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(m.level_one_std < 1e-15);
    CHECK(m.eye_height == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(m.q_factor == doctest::Approx(1e4));
    CHECK(m.error_free);
    CHECK(m.extinction_ratio == doctest::Approx(2.0));
    CHECK(m.ber_estimate == 0.0);
    CHECK(m.eye_width == doctest::Approx(1e-9).epsilon(0.05));
}

TEST_CASE("constant trace has a closed eye") {
    const PrbsNrz clock(1e9, 7, 0x7f, 0.0, 1.0, 0.0);
    const double dt = 1e-9 / 40.0;
    const std::vector<double> power(40 * 100, 1e-3);
    const auto m = eye_metrics(fold_eye(power, 0.0, dt, clock));
    CHECK(m.eye_height == 0.0);
    CHECK(m.q_factor == 0.0);
    CHECK(m.ber_estimate == 0.5);
    CHECK_FALSE(m.error_free);
    CHECK(m.extinction_ratio == 1.0);
    CHECK(m.eye_width == 0.0);
}

TEST_CASE("fold preconditions") {
    const PrbsNrz clock(1e9, 7, 0x7f, 0.0, 1.0, 0.0);
    const std::vector<double> short_trace(40 * 20, 1e-3);
    CHECK_THROWS_AS(fold_eye(short_trace, 0.0, 1e-9 / 40.0, clock), InsufficientDataError);
    const std::vector<double> coarse(10 * 100, 1e-3);
    CHECK_THROWS_AS(fold_eye(coarse, 0.0, 1e-9 / 10.0, clock), InsufficientDataError);

    EyeAccumulation only_zeros;
    only_zeros.bit_rate = 1e9;
    only_zeros.samples_per_ui = 40;
    for (int i = 0; i < 100; ++i) only_zeros.samples.push_back({0.5, 1e-3, 0});
    CHECK_THROWS_AS(eye_metrics(only_zeros), MissingLevelError);
}

TEST_CASE("Gaussian levels give the expected Q") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> one(2.0, 0.05), zero(1.0, 0.05);
    EyeAccumulation eye;
    eye.bit_rate = 1e9;
    eye.samples_per_ui = 50;
    for (int i = 0; i < 50000; ++i) {
        eye.samples.push_back({0.5, one(rng), 1});
        eye.samples.push_back({1.5, zero(rng), 0});
    }
    const auto m = eye_metrics(eye);
    CHECK(m.q_factor == doctest::Approx(10.0).epsilon(0.01));
    CHECK(m.level_one_std == doctest::Approx(0.05).epsilon(0.02));
    CHECK(m.error_free);
    CHECK(m.ber_estimate == doctest::Approx(0.5 * std::erfc(m.q_factor / std::sqrt(2.0))));
}

TEST_CASE("eye height agrees with a fold at ten times the resolution") {
    const LinkScenario s = direct_link(0.7);
    const double rate = 4e9;
    const auto run = scenario_at_rate(s, rate);
    const auto* clock = as_prbs(run.mod_drive);
    REQUIRE(clock);
    const auto coarse = run_link(s.laser, s.modulator, run.laser_drive, run.mod_drive, run.sim);
    const auto m = eye_metrics(fold_eye(coarse, *clock));

    SimConfig fine_cfg = run.sim;
    fine_cfg.record_stride = std::max<std::size_t>(1, run.sim.record_stride / 10);
    REQUIRE(run.sim.record_stride >= 10 * fine_cfg.record_stride);
    const auto fine = run_link(s.laser, s.modulator, run.laser_drive, run.mod_drive, fine_cfg);
    double min_one = 1.0, max_zero = 0.0, hi_sum = 0.0, lo_sum = 0.0;
    std::size_t hi_n = 0, lo_n = 0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const double pos = fine.time(i) * rate;
        const double frac = pos - std::floor(pos);
        if (frac < 0.4 || frac > 0.6) continue;
        const double v = fine.output_power[i];
        if (clock->bit(static_cast<std::uint64_t>(pos))) {
            min_one = std::min(min_one, v), hi_sum += v, ++hi_n;
        } else {
            max_zero = std::max(max_zero, v), lo_sum += v, ++lo_n;
        }
    }
    const double oma = hi_sum / hi_n - lo_sum / lo_n;
    const double height = min_one - max_zero;
    CAPTURE(height);
    CAPTURE(m.eye_height);
    CHECK(height > 0.0);
    CHECK(height < oma);
    CHECK(m.eye_height < m.level_one_mean - m.level_zero_mean);
    CHECK(m.eye_height == doctest::Approx(height).epsilon(0.01));
    CHECK(m.eye_height >= height);
}

TEST_CASE("metrics are scale equivariant") {
    const LinkScenario s = direct_link(0.3);
    const auto run = scenario_at_rate(s, 4e9);
    const auto* clock = as_prbs(run.mod_drive);
    const auto tr = run_link(s.laser, s.modulator, run.laser_drive, run.mod_drive, run.sim);
    const auto a = eye_metrics(fold_eye(tr, *clock));
    for (double c : {0.01, 3.7, 1e3}) {
        std::vector<double> scaled(tr.output_power);
        for (auto& x : scaled) x *= c;
        const auto b = eye_metrics(fold_eye(scaled, tr.t0, tr.dt_sample, *clock));
        CHECK(b.eye_height == doctest::Approx(c * a.eye_height).epsilon(1e-12));
        CHECK(b.level_one_mean == doctest::Approx(c * a.level_one_mean).epsilon(1e-12));
        CHECK(b.level_zero_mean == doctest::Approx(c * a.level_zero_mean).epsilon(1e-12));
        CHECK(b.level_one_std == doctest::Approx(c * a.level_one_std).epsilon(1e-9));
        CHECK(b.level_zero_std == doctest::Approx(c * a.level_zero_std).epsilon(1e-9));
        CHECK(b.q_factor == doctest::Approx(a.q_factor).epsilon(1e-9));
        CHECK(b.extinction_ratio == doctest::Approx(a.extinction_ratio).epsilon(1e-12));
        CHECK(b.error_free == a.error_free);
    }
}

TEST_CASE("maximum error-free bit rate") {
    const std::vector<double> rates{1e9, 2e9, 4e9};
    const auto clean = max_error_free_bitrate(master_link(0.1), rates);
    REQUIRE(clean);
    CHECK(*clean == 4e9);

    const auto direct = max_error_free_bitrate(direct_link(0.7), {1e9, 2e9, 4e9, 8e9});
    REQUIRE(direct);
    CHECK(*direct == 4e9);

    CHECK_FALSE(max_error_free_bitrate(master_link(0.1), rates, 1e9));
    CHECK_THROWS_AS(max_error_free_bitrate(master_link(0.1), {}), ConfigError);
    CHECK_THROWS_AS(max_error_free_bitrate(master_link(0.1), {4e9, 1e9}), ConfigError);

    LinkScenario no_clock;
    CHECK_THROWS_AS(evaluate_eye(no_clock, 1e9), ConfigError);
}

TEST_CASE("slow edges at the top rate degrade the eye") {
    // Noiseless linear edges spanning 0.9 UI leak into the mid-UI window: the eye
    // shrinks and Q leaves the floor cap, but stays above 7.03.
    const auto sharp = evaluate_eye(master_link(0.1), 16e9);
    const auto slow = evaluate_eye(master_link(0.9), 16e9);
    CHECK(sharp.q_factor == doctest::Approx(1e4));
    CHECK(slow.eye_height < 0.95 * sharp.eye_height);
    CHECK(slow.q_factor < 100.0);
    CHECK(slow.q_factor > kDefaultDecisionQ);
}

TEST_CASE("eye height does not grow with bit rate") {
    const std::vector<double> rates{1e9, 2e9, 4e9, 8e9};
    const auto eyes = eye_vs_bitrate(direct_link(0.7), rates);
    for (std::size_t i = 1; i < eyes.size(); ++i) {
        CHECK(eyes[i].eye_height <= eyes[i - 1].eye_height * 1.01);
    }
}
