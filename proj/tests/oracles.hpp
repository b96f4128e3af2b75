#pragma once

// Test-side reference implementations. None of these call into the library's
// numerical paths; they only read parameter structs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mqwlink/laser.hpp"

namespace oracle {

/// Second tap m of the recurrence a[k+L] = a[k] ^ a[k+m].
inline int feedback_offset(int length) {
    switch (length) {
        case 7: return 6;
        case 15: return 14;
        case 23: return 18;
        case 31: return 28;
        default: return -1;
    }
}

/// Maximal-length sequence from the linear recurrence; the first L values are the
/// seed bits, least significant first.
inline std::vector<int> lfsr(int length, std::uint64_t seed, std::size_t n) {
    const int m = feedback_offset(length);
    std::vector<int> a(std::max<std::size_t>(n, static_cast<std::size_t>(length)));
    for (int i = 0; i < length; ++i) a[static_cast<std::size_t>(i)] = static_cast<int>((seed >> i) & 1U);
    for (std::size_t k = 0; k + static_cast<std::size_t>(length) < a.size(); ++k) {
        a[k + static_cast<std::size_t>(length)] = a[k] ^ a[k + static_cast<std::size_t>(m)];
    }
    a.resize(n);
    return a;
}

struct State {
    long double n = 0;
    long double s = 0;
    long double phi = 0;
};

/// Carrier and photon rate equations, written out term by term.
struct Terms {
    long double injection, stimulated, recombination;  // carrier equation
    long double gain, loss, spontaneous;               // photon equation
    long double dphi;
};

inline Terms terms(const mqwlink::LaserParams& p, long double n, long double s, long double current) {
    const long double gain_per_s = static_cast<long double>(p.g0) * (n - p.n0) / (1.0L + p.eps * s);
    Terms t{};
    t.injection = current / (static_cast<long double>(p.q) * p.volume);
    t.stimulated = gain_per_s * s;
    t.recombination = n / p.tau_n;
    t.gain = p.gamma * gain_per_s * s;
    t.loss = s / p.tau_p;
    t.spontaneous = p.gamma * p.beta * n / p.tau_n;
    t.dphi = 0.5L * p.alpha * (p.gamma * p.g0 * (n - p.n0) - 1.0L / p.tau_p);
    return t;
}

inline State derivative(const mqwlink::LaserParams& p, const State& x, long double current) {
    const Terms t = terms(p, x.n, x.s, current);
    return {t.injection - t.stimulated - t.recombination, t.gain - t.loss + t.spontaneous, t.dphi};
}

/// Classical RK4 in long double with a constant current.
inline State rk4(const mqwlink::LaserParams& p, State x, long double current, long double dt, long long steps) {
    auto add = [](const State& a, const State& b, long double h) {
        return State{a.n + h * b.n, a.s + h * b.s, a.phi + h * b.phi};
    };
    for (long long i = 0; i < steps; ++i) {
        const State k1 = derivative(p, x, current);
        const State k2 = derivative(p, add(x, k1, dt / 2), current);
        const State k3 = derivative(p, add(x, k2, dt / 2), current);
        const State k4 = derivative(p, add(x, k3, dt), current);
        x.n += dt / 6 * (k1.n + 2 * k2.n + 2 * k3.n + k4.n);
        x.s += dt / 6 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
        x.phi += dt / 6 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
    }
    return x;
}

/// Residual of both density equations, each scaled by its largest term.
inline long double scaled_residual(const mqwlink::LaserParams& p, long double n, long double s, long double current) {
    const Terms t = terms(p, n, s, current);
    const long double dn = t.injection - t.stimulated - t.recombination;
    const long double ds = t.gain - t.loss + t.spontaneous;
    const long double sn = std::max({std::fabs(t.injection), std::fabs(t.stimulated), std::fabs(t.recombination)});
    const long double ss = std::max({std::fabs(t.gain), std::fabs(t.loss), std::fabs(t.spontaneous)});
    const long double rn = sn > 0 ? dn / sn : dn;
    const long double rs = ss > 0 ? ds / ss : ds;
    return rn * rn + rs * rs;
}

/// Brute-force fixed point: repeatedly zoomed 2-D grid over (N, log10 S) minimising the
/// scaled residual norm.
inline std::array<double, 2> steady_state_grid(const mqwlink::LaserParams& p, double current) {
    const long double n_th = p.n0 + 1.0L / (p.gamma * p.g0 * p.tau_p);
    long double n_lo = 0, n_hi = 4 * std::max<long double>(n_th, current * p.tau_n / (p.q * p.volume));
    long double l_lo = 0, l_hi = 28;  // log10 S
    long double best_n = 0, best_l = 0;
    constexpr int kGrid = 161;
    for (int iter = 0; iter < 60; ++iter) {
        long double best = INFINITY;
        for (int i = 0; i < kGrid; ++i) {
            const long double n = n_lo + (n_hi - n_lo) * i / (kGrid - 1);
            for (int j = 0; j < kGrid; ++j) {
                const long double l = l_lo + (l_hi - l_lo) * j / (kGrid - 1);
                const long double r = scaled_residual(p, n, std::pow(10.0L, l), current);
                if (r < best) {
                    best = r;
                    best_n = n;
                    best_l = l;
                }
            }
        }
        const long double wn = (n_hi - n_lo) / 8;
        const long double wl = (l_hi - l_lo) / 8;
        n_lo = std::max<long double>(0, best_n - wn);
        n_hi = best_n + wn;
        l_lo = best_l - wl;
        l_hi = best_l + wl;
    }
    return {static_cast<double>(best_n), static_cast<double>(std::pow(10.0L, best_l))};
}

}  // namespace oracle
