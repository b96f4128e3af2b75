#include "mqwlink/laser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mqwlink/error.hpp"

namespace mqwlink {

namespace {

void require(bool ok, const char* key, const char* rule) {
    if (!ok) throw ConfigError(std::string("laser parameter ") + key + " must be " + rule);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void LaserParams::validate() const {
    require(positive(q), "q", "> 0");
    require(positive(volume), "volume", "> 0");
    require(positive(g0), "g0", "> 0");
    require(positive(n0), "n0", "> 0");
    require(eps >= 0.0 && std::isfinite(eps), "eps", ">= 0");
    require(positive(tau_n), "tau_n", "> 0");
    require(positive(tau_p), "tau_p", "> 0");
    require(gamma > 0.0 && gamma <= 1.0, "gamma", "in (0, 1]");
    require(beta >= 0.0 && beta <= 1.0, "beta", "in [0, 1]");
    require(eta_sp > 0.0 && eta_sp <= 1.0, "eta_sp", "in (0, 1]");
    require(alpha >= 0.0 && std::isfinite(alpha), "alpha", ">= 0");
    require(positive(photon_energy), "photon_energy", "> 0");
    require(drop_voltage >= 0.0 && std::isfinite(drop_voltage), "drop_voltage", ">= 0");
}

LaserDerivatives derivatives(const LaserState& x, double current, const LaserParams& p) {
    const double gain = p.g0 * (x.n - p.n0) / (1.0 + p.eps * x.s);
    const double spont = x.n / p.tau_n;
    LaserDerivatives d;
    d.dn = current / (p.q * p.volume) - gain * x.s - spont;
    d.ds = p.gamma * gain * x.s - x.s / p.tau_p + p.gamma * p.beta * spont;
    d.dphi = 0.5 * p.alpha * (p.gamma * p.g0 * (x.n - p.n0) - 1.0 / p.tau_p);
    return d;
}

LaserDerivatives rk4_increment(const LaserState& x, double i_begin, double i_mid, double i_end,
                               double dt, const LaserParams& p) {
    const double h2 = 0.5 * dt;
    const auto k1 = derivatives(x, i_begin, p);
    const auto k2 = derivatives({x.n + h2 * k1.dn, x.s + h2 * k1.ds, x.phi + h2 * k1.dphi}, i_mid, p);
    const auto k3 = derivatives({x.n + h2 * k2.dn, x.s + h2 * k2.ds, x.phi + h2 * k2.dphi}, i_mid, p);
    const auto k4 = derivatives({x.n + dt * k3.dn, x.s + dt * k3.ds, x.phi + dt * k3.dphi}, i_end, p);
    const double h6 = dt / 6.0;
    return {h6 * (k1.dn + 2.0 * k2.dn + 2.0 * k3.dn + k4.dn),
            h6 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds),
            h6 * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi)};
}

namespace {

void check_positive(const LaserState& y, double t) {
    if (y.n < 0.0) throw NegativeDensityError(NegativeDensityError::Quantity::carrier, t);
    if (y.s < 0.0) throw NegativeDensityError(NegativeDensityError::Quantity::photon, t);
}

// x += inc with running compensation c.
void kahan_add(double& x, double& c, double inc) {
    const double y = inc - c;
    const double t = x + y;
    c = (t - x) - y;
    x = t;
}

}  // namespace

LaserState rk4_step(const LaserState& x, double i_begin, double i_mid, double i_end, double t,
                    double dt, const LaserParams& p) {
    const auto d = rk4_increment(x, i_begin, i_mid, i_end, dt, p);
    const LaserState y{x.n + d.dn, x.s + d.ds, x.phi + d.dphi};
    check_positive(y, t + dt);
    return y;
}

void Rk4Integrator::step(double i_begin, double i_mid, double i_end, double t, double dt) {
    const auto d = rk4_increment(x_, i_begin, i_mid, i_end, dt, p_);
    LaserState y = x_;
    LaserState c = carry_;
    kahan_add(y.n, c.n, d.dn);
    kahan_add(y.s, c.s, d.ds);
    kahan_add(y.phi, c.phi, d.dphi);
    check_positive(y, t + dt);
    x_ = y;
    carry_ = c;
}

LaserState rk4_step(const LaserState& x, const Waveform& drive, double t, double dt,
                    const LaserParams& p) {
    if (!(dt > 0.0)) throw ConfigError("rk4_step: dt must be > 0");
    if (dt > max_step(p) * (1.0 + 1e-12)) {
        throw ConfigError("rk4_step: dt exceeds tau_p/10");
    }
    return rk4_step(x, sample(drive, t), sample(drive, t + 0.5 * dt), sample(drive, t + dt), t, dt,
                    p);
}

double output_power(double s, const LaserParams& p) {
    return s * p.eta_sp * p.photon_energy * p.volume / (2.0 * p.gamma * p.tau_p);
}

double photon_density_balance(double n, const LaserParams& p) {
    // With G = Gamma g0 (N - N0) and B = Gamma beta N / tau_n, dS/dt = 0 becomes
    // (eps/tau_p) S^2 - b S - B = 0 with b = G - 1/tau_p + eps B.
    const double g = p.gamma * p.g0 * (n - p.n0);
    const double src = p.gamma * p.beta * n / p.tau_n;
    const double b = g - 1.0 / p.tau_p + p.eps * src;
    if (p.eps == 0.0) {
        if (src == 0.0) return 0.0;
        if (b >= 0.0) return std::numeric_limits<double>::infinity();
        return src / (-b);
    }
    const double a = p.eps / p.tau_p;
    const double disc = std::sqrt(b * b + 4.0 * a * src);
    // pick the cancellation-free form of the positive root
    if (b > 0.0) return (b + disc) / (2.0 * a);
    if (src == 0.0) return 0.0;
    return 2.0 * src / (disc - b);
}

Residual steady_residual(const LaserState& x, double current, const LaserParams& p) {
    const double pump = current / (p.q * p.volume);
    const double stim = p.g0 * (x.n - p.n0) / (1.0 + p.eps * x.s) * x.s;
    const double spont = x.n / p.tau_n;
    const auto d = derivatives(x, current, p);
    Residual r;
    const double scale_n = std::max({std::abs(pump), std::abs(stim), std::abs(spont)});
    const double scale_s = std::max(
        {std::abs(p.gamma * stim), x.s / p.tau_p, p.gamma * p.beta * spont});
    r.carrier = scale_n > 0.0 ? std::abs(d.dn) / scale_n : 0.0;
    r.photon = scale_s > 0.0 ? std::abs(d.ds) / scale_s : 0.0;
    return r;
}

double threshold_density(const LaserParams& p) {
    return p.n0 + 1.0 / (p.gamma * p.g0 * p.tau_p);
}

double threshold_current(const LaserParams& p) {
    return p.q * p.volume * threshold_density(p) / p.tau_n;
}

LaserState steady_state(const LaserParams& p, double current) {
    if (!(current >= 0.0)) throw DomainError("steady_state: current must be >= 0");
    constexpr double tol = 1e-9;
    const double pump = current / (p.q * p.volume);

    if (p.eps == 0.0 && p.beta == 0.0) {
        // Discontinuous gain clamp: closed form on either side of threshold.
        const double n_th = threshold_density(p);
        if (current <= threshold_current(p)) return {pump * p.tau_n, 0.0, 0.0};
        return {n_th, (pump - n_th / p.tau_n) / (p.g0 * (n_th - p.n0)), 0.0};
    }

    // dN/dt along the dS/dt = 0 branch; positive at N = 0, decreasing through the root.
    auto carrier_rate = [&](double n) {
        const double s = photon_density_balance(n, p);
        if (std::isinf(s)) return -std::numeric_limits<double>::infinity();
        return pump - p.g0 * (n - p.n0) / (1.0 + p.eps * s) * s - n / p.tau_n;
    };

    double lo = 0.0;
    double hi = pump * p.tau_n;
    if (hi == 0.0) return {0.0, 0.0, 0.0};
    // Absorption below N0 can feed carriers back; widen until the bracket closes.
    int widen = 0;
    while (carrier_rate(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++widen > 200) throw NoConvergenceError("steady_state: could not bracket the root");
    }

    constexpr long max_iter = 1'000'000;
    for (long it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (carrier_rate(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Pick whichever end of the final bracket has the smaller residual.
    LaserState best{};
    double best_res = std::numeric_limits<double>::infinity();
    for (double n : {lo, hi}) {
        const double s = photon_density_balance(n, p);
        if (!std::isfinite(s)) continue;
        const LaserState x{n, s, 0.0};
        const auto r = steady_residual(x, current, p);
        const double worst = std::max(r.carrier, r.photon);
        if (worst < best_res) {
            best_res = worst;
            best = x;
        }
    }
    if (!(best_res <= tol)) {
        throw NoConvergenceError("steady_state: residual " + std::to_string(best_res) +
                                 " above tolerance");
    }
    return best;
}

double relaxation_frequency(const LaserParams& p, double current) {
    if (!(current > threshold_current(p))) {
        throw BelowThresholdError("relaxation_frequency: current must exceed the threshold");
    }
    const double s = steady_state(p, current).s;
    return std::sqrt(p.g0 * s / p.tau_p) / (2.0 * constants::pi);
}

}  // namespace mqwlink
