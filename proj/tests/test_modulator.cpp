#include <cmath>
#include <random>

#include "doctest.h"
#include "mqwlink/error.hpp"
#include "mqwlink/modulator.hpp"

using namespace mqwlink;

TEST_CASE("contrast from insertion loss") {
    CHECK(contrast_from_il(0.0, 3.7) == 1.0);
    CHECK(contrast_from_il(0.35, 1.0) == 1.0);
    CHECK(contrast_from_il(0.5, 3.0) == 4.0);
    CHECK_THROWS_AS(contrast_from_il(1.0, 3.0), DomainError);
    CHECK_THROWS_AS(contrast_from_il(-0.1, 3.0), DomainError);
    CHECK_THROWS_AS(contrast_from_il(0.2, 0.5), DomainError);
}

TEST_CASE("insertion loss from contrast") {
    CHECK(il_from_cr(1.0, 2.0) == 0.0);
    CHECK(il_from_cr(4.0, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(il_from_cr(2.0, 1.0), DomainError);
    CHECK_THROWS_AS(il_from_cr(0.5, 3.0), DomainError);
    for (double cr : {1.5, 2.0, 5.0, 10.0}) {
        for (double k : {1.5, 2.0, 3.0, 5.0}) {
            CHECK(contrast_from_il(il_from_cr(cr, k), k) == doctest::Approx(cr).epsilon(1e-12));
        }
    }
}

TEST_CASE("contrast is increasing in insertion loss and in K") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> il(0.0, 0.95);
    std::uniform_real_distribution<double> kd(1.01, 8.0);
    for (int i = 0; i < 1000; ++i) {
        double a = il(rng), b = il(rng);
        if (a > b) std::swap(a, b);
        const double k = kd(rng);
        if (b > a) CHECK(contrast_from_il(b, k) > contrast_from_il(a, k));
        double k1 = kd(rng), k2 = kd(rng);
        if (k1 > k2) std::swap(k1, k2);
        const double x = 0.01 + il(rng);
        if (k2 > k1) CHECK(contrast_from_il(x, k2) > contrast_from_il(x, k1));
        CHECK(il_from_cr(contrast_from_il(a, k), k) == doctest::Approx(a).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("reflectivity and absorption table") {
    const auto m = synthetic_absorption();
    m.validate();
    CHECK(reflectivity(0.0, m) == doctest::Approx(std::exp(-2.5e5 * 1.2e-6)));
    CHECK(reflectivity(-5.0, m) == reflectivity(0.0, m));
    CHECK(reflectivity(9.0, m) == reflectivity(3.0, m));
    CHECK(m.alpha_at(0.25) == doctest::Approx(2.75e5));
    double prev = 2.0;
    for (int i = 0; i <= 300; ++i) {
        const double r = reflectivity(i * 0.01, m);
        CHECK(r > 0.0);
        CHECK(r <= 1.0);
        CHECK(r <= prev);
        prev = r;
    }

    AbsorptionModel bad = m;
    bad.alpha[2] = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = m;
    bad.voltage[1] = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("table and closed form agree") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        AbsorptionModel m;
        m.length = 0.5e-6 + 2e-6 * u(rng);
        const int n = 2 + static_cast<int>(u(rng) * 6);
        double v = -1.0 + u(rng), a = 1e4 + 5e5 * u(rng);
        for (int j = 0; j < n; ++j) {
            m.voltage.push_back(v);
            m.alpha.push_back(a);
            v += 0.1 + u(rng);
            a += 3e5 * u(rng);
        }
        m.validate();
        const double r_on = reflectivity(m.voltage.front(), m);
        const double r_off = reflectivity(m.voltage.back(), m);
        const double k = m.alpha_max() / m.alpha_min();
        CHECK(r_on / r_off == doctest::Approx(contrast_from_il(1.0 - r_on, k)).epsilon(1e-9));
    }

    const auto c = closed_form_absorption(0.2, 4.0, 0.5, 1.5, 1.2e-6);
    CHECK(reflectivity(0.5, c) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(reflectivity(0.5, c) / reflectivity(1.5, c) == doctest::Approx(contrast_from_il(0.2, 4.0)).epsilon(1e-12));
}

TEST_CASE("modulate is a passive elementwise transfer") {
    const auto m = synthetic_absorption();
    const Waveform drive = PrbsNrz(10e9, 7, 0x7f, 0.0, 3.0, 20e-12);
    std::vector<double> in(5000);
    std::mt19937_64 rng(2);
    for (auto& x : in) x = std::uniform_real_distribution<double>(0.0, 2e-3)(rng);
    const double dt = 1e-12;
    const auto out = modulate(in, 0.0, dt, drive, m);
    REQUIRE(out.size() == in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        CHECK(out[i] <= in[i]);
        CHECK(out[i] == in[i] * reflectivity(sample(drive, i * dt), m));
    }
}

TEST_CASE("modulation efficiency") {
    ModulatorParams m;
    m.responsivity = 0.5;
    m.v_bias = 1.0;
    m.v_dd = 0.8;
    CHECK(mod_efficiency(0.2, 4.0, m).eta_mod == doctest::Approx(0.21).epsilon(1e-12));

    m.v_bias = 1.5;
    m.v_dd = 1.0;
    CHECK(mod_efficiency(0.0, 1e300, m).eta_mod == doctest::Approx(0.5 * 0.5 * 1.5).epsilon(1e-9));
    CHECK(mod_efficiency(0.3, 1.0, m).eta_mod == doctest::Approx(0.5 * 0.5 * 0.3 * (2 * 1.5 - 1.0)).epsilon(1e-9));
    CHECK(mod_efficiency(0.3, 2.0, m).static_power == doctest::Approx(mod_efficiency(0.3, 2.0, m).eta_mod * m.p_in));

    m.v_dd = 2.0;
    m.v_bias = 0.1;
    const auto neg = mod_efficiency(0.5, 1.0, m);
    CHECK(neg.eta_mod < 0.0);
    CHECK(neg.non_physical);

    ModulatorParams mono;
    double prev = -1.0;
    for (int i = 0; i < 100; ++i) {
        const double eta = mod_efficiency(i * 0.0099, 3.0, mono).eta_mod;
        CHECK(eta >= prev);
        prev = eta;
    }
}

TEST_CASE("dynamic power") {
    ModulatorParams m;
    CHECK(dynamic_power(m, 10e9) == doctest::Approx(2.5e-4).epsilon(1e-15));
    ModulatorParams doubled = m;
    doubled.v_dd *= 2.0;
    CHECK(dynamic_power(doubled, 10e9) == doctest::Approx(4.0 * dynamic_power(m, 10e9)));
    m.c_mod = 0.0;
    CHECK(dynamic_power(m, 10e9) == 0.0);
    CHECK_THROWS_AS(dynamic_power(m, 0.0), DomainError);
}

TEST_CASE("transmitter power") {
    const LaserParams laser;
    const ModulatorParams m;
    const auto point = make_operating_point(2e-3, 0.2, 4.0, 10e9, 1.5, 1.0);
    CHECK(point.cr == doctest::Approx(1.953125).epsilon(1e-15));
    const auto b = transmitter_power(point, laser, m, Source::constant_master);
    // eta = 0.25 (0.2 * 0.5 + (1 - 0.8 / 1.953125) * 1.5) = 0.2464 against P_i = 1 mW
    CHECK(b.static_power == doctest::Approx(2.464e-4).epsilon(1e-13));
    CHECK(b.dynamic_power == doctest::Approx(2.5e-4).epsilon(1e-13));
    CHECK(b.laser_wall_power == doctest::Approx(3e-3).epsilon(1e-13));
    CHECK(b.total == doctest::Approx(3.4964e-3).epsilon(1e-13));
    CHECK(b.input_power == m.p_in);

    ModulatorParams limit = m;
    limit.c_mod = 0.0;
    OperatingPoint open{1e-3, 0.0, 1e300, 1e9, 1.5, 1.0};
    const auto c = transmitter_power(open, laser, limit, Source::constant_master);
    CHECK(c.total == doctest::Approx(0.5 * 0.5 * 1.5 * 1e-3 + 1.5e-3).epsilon(1e-9));

    const auto l = transmitter_power(point, laser, m, Source::laser);
    CHECK(l.input_power == doctest::Approx(output_power(steady_state(laser, 2e-3).s, laser)));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const auto p = make_operating_point(4e-3 * u(rng), 0.9 * u(rng), 1.0 + 5.0 * u(rng), 1e9 + 2e10 * u(rng),
                                            2.0 * u(rng), 2.0 * u(rng));
        const auto r = transmitter_power(p, laser, m);
        CHECK(r.total == doctest::Approx(r.static_power + r.dynamic_power + r.laser_wall_power).epsilon(1e-15));
    }
    CHECK_THROWS_AS(transmitter_power(OperatingPoint{-1e-3, 0.1, 1.5, 1e9, 1.5, 1.0}, laser, m), DomainError);
}
