#include "mqwlink/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mqwlink/error.hpp"

namespace mqwlink {

namespace {

// Second tap m of x^L + x^m + 1.
int feedback_tap(int register_length) {
    switch (register_length) {
        case 7: return 6;
        case 15: return 14;
        case 23: return 18;
        case 31: return 28;
        default:
            throw ConfigError("PRBS register length must be one of 7, 15, 23, 31 (got " +
                              std::to_string(register_length) + ")");
    }
}

void check_seed(int register_length, std::uint64_t seed) {
    const std::uint64_t mask = (std::uint64_t{1} << register_length) - 1;
    if (seed == 0 || seed > mask) {
        throw ConfigError("PRBS seed must be in [1, 2^" + std::to_string(register_length) +
                          " - 1] (got " + std::to_string(seed) + ")");
    }
}

// Fibonacci register holding a_k..a_{k+L-1} in bits 0..L-1. For x^L + x^m + 1 the
// sequence obeys a_{k+L} = a_k ^ a_{k+m}.
struct Lfsr {
    int length;
    int tap;
    std::uint64_t state;

    int next() {
        const int out = static_cast<int>(state & 1u);
        const std::uint64_t fb = (state ^ (state >> tap)) & 1u;
        state = (state >> 1) | (fb << (length - 1));
        return out;
    }
};

// Bits precomputed per waveform; longer sequences continue from the saved state.
constexpr std::uint64_t kMaxTableBits = std::uint64_t{1} << 22;

}  // namespace

std::uint64_t prbs_period(int register_length) {
    feedback_tap(register_length);
    return (std::uint64_t{1} << register_length) - 1;
}

std::vector<std::uint8_t> prbs_bits(int register_length, std::uint64_t seed, std::size_t n) {
    const int tap = feedback_tap(register_length);
    check_seed(register_length, seed);
    Lfsr reg{register_length, tap, seed};
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(reg.next());
    return bits;
}

struct PrbsNrz::Table {
    std::vector<std::uint8_t> bits;
    std::uint64_t period = 0;
    Lfsr resume{};  // register state after bits.size() outputs
};

PrbsNrz::PrbsNrz(double bit_rate, int register_length, std::uint64_t seed, double low,
                 double high, double t_edge)
    : bit_rate_(bit_rate),
      register_length_(register_length),
      seed_(seed),
      low_(low),
      high_(high),
      t_edge_(t_edge) {
    const int tap = feedback_tap(register_length);
    check_seed(register_length, seed);
    if (!(bit_rate > 0.0) || !std::isfinite(bit_rate)) {
        throw ConfigError("PRBS bit_rate must be positive");
    }
    if (!(t_edge >= 0.0) || !(t_edge < 1.0 / bit_rate)) {
        throw ConfigError("PRBS t_edge must satisfy 0 <= t_edge < 1/bit_rate");
    }
    if (!std::isfinite(low) || !std::isfinite(high)) {
        throw ConfigError("PRBS levels must be finite");
    }
    auto table = std::make_shared<Table>();
    table->period = (std::uint64_t{1} << register_length) - 1;
    const auto n = std::min(table->period, kMaxTableBits);
    Lfsr reg{register_length, tap, seed};
    table->bits.resize(n);
    for (auto& b : table->bits) b = static_cast<std::uint8_t>(reg.next());
    table->resume = reg;
    table_ = std::move(table);
}

PrbsNrz PrbsNrz::with_levels(double low, double high) const {
    if (!std::isfinite(low) || !std::isfinite(high)) {
        throw ConfigError("PRBS levels must be finite");
    }
    PrbsNrz out = *this;
    out.low_ = low;
    out.high_ = high;
    return out;
}

PrbsNrz PrbsNrz::with_timing(double bit_rate, double t_edge) const {
    if (!(bit_rate > 0.0) || !std::isfinite(bit_rate)) {
        throw ConfigError("PRBS bit_rate must be positive");
    }
    if (!(t_edge >= 0.0) || !(t_edge < 1.0 / bit_rate)) {
        throw ConfigError("PRBS t_edge must satisfy 0 <= t_edge < 1/bit_rate");
    }
    PrbsNrz out = *this;
    out.bit_rate_ = bit_rate;
    out.t_edge_ = t_edge;
    return out;
}

int PrbsNrz::bit(std::uint64_t k) const {
    const Table& tab = *table_;
    k %= tab.period;
    if (k < tab.bits.size()) return tab.bits[k];
    Lfsr reg = tab.resume;
    for (std::uint64_t i = tab.bits.size(); i < k; ++i) reg.next();
    return reg.next();
}

double PrbsNrz::sample(double t) const {
    if (t < 0.0) t = 0.0;
    const double ui = 1.0 / bit_rate_;
    const double pos = t * bit_rate_;
    const auto k = static_cast<std::uint64_t>(std::floor(pos));
    const double u = t - static_cast<double>(k) * ui;
    const double half = 0.5 * t_edge_;
    if (t_edge_ > 0.0) {
        if (u < half && k > 0) {
            const double w = (u + half) / t_edge_;
            return level(k - 1) + (level(k) - level(k - 1)) * w;
        }
        if (u > ui - half) {
            const double w = (u - (ui - half)) / t_edge_;
            return level(k) + (level(k + 1) - level(k)) * w;
        }
    }
    return level(k);
}

void validate(const Waveform& w) {
    auto finite = [](double v, const char* what) {
        if (!std::isfinite(v)) throw ConfigError(std::string("waveform ") + what + " must be finite");
    };
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Constant>) {
                finite(v.level, "level");
            } else if constexpr (std::is_same_v<T, Pulse>) {
                finite(v.base, "base");
                finite(v.amplitude, "amplitude");
                finite(v.t_start, "t_start");
                if (!(v.width > 0.0) || !std::isfinite(v.width)) throw ConfigError("pulse width must be > 0");
                if (!(v.t_rise >= 0.0) || !(v.t_fall >= 0.0)) {
                    throw ConfigError("pulse t_rise and t_fall must be >= 0");
                }
            } else if constexpr (std::is_same_v<T, Ramp>) {
                finite(v.base, "base");
                finite(v.slope, "slope");
                finite(v.t_start, "t_start");
            } else if constexpr (std::is_same_v<T, PrbsNrz>) {
                // invariants enforced by the constructor
            } else {
                if (v.times.size() < 2 || v.times.size() != v.values.size()) {
                    throw ConfigError("piecewise waveform needs >= 2 (time, value) pairs of equal count");
                }
                for (std::size_t i = 0; i < v.times.size(); ++i) {
                    finite(v.times[i], "time");
                    finite(v.values[i], "value");
                    if (i > 0 && !(v.times[i] > v.times[i - 1])) {
                        throw ConfigError("piecewise times must be strictly increasing");
                    }
                }
            }
        },
        w);
}

double sample(const Waveform& w, double t) {
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return v.level;
            } else if constexpr (std::is_same_v<T, Pulse>) {
                const double rise_end = v.t_start + v.t_rise;
                const double top_end = rise_end + v.width;
                const double fall_end = top_end + v.t_fall;
                double shape;
                if (t < v.t_start) {
                    shape = 0.0;
                } else if (t < rise_end) {
                    shape = (t - v.t_start) / v.t_rise;
                } else if (t <= top_end) {
                    shape = 1.0;
                } else if (t < fall_end) {
                    shape = 1.0 - (t - top_end) / v.t_fall;
                } else {
                    shape = 0.0;
                }
                return v.base + v.amplitude * shape;
            } else if constexpr (std::is_same_v<T, Ramp>) {
                return t > v.t_start ? v.base + v.slope * (t - v.t_start) : v.base;
            } else if constexpr (std::is_same_v<T, PrbsNrz>) {
                return v.sample(t);
            } else {
                if (t <= v.times.front()) return v.values.front();
                if (t >= v.times.back()) return v.values.back();
                const auto it = std::upper_bound(v.times.begin(), v.times.end(), t);
                const auto i = static_cast<std::size_t>(it - v.times.begin());
                const double w = (t - v.times[i - 1]) / (v.times[i] - v.times[i - 1]);
                return v.values[i - 1] + (v.values[i] - v.values[i - 1]) * w;
            }
        },
        w);
}

const PrbsNrz* as_prbs(const Waveform& w) { return std::get_if<PrbsNrz>(&w); }

Waveform with_bit_rate(const Waveform& w, double bit_rate) {
    const auto* p = as_prbs(w);
    if (!p) return w;
    const double edge_fraction = p->t_edge() * p->bit_rate();
    return p->with_timing(bit_rate, edge_fraction / bit_rate);
}

Waveform with_seed(const Waveform& w, std::uint64_t seed) {
    const auto* p = as_prbs(w);
    if (!p) return w;
    return PrbsNrz(p->bit_rate(), p->register_length(), seed, p->low(), p->high(), p->t_edge());
}

Waveform with_bias(const Waveform& w, double bias) {
    return std::visit(
        [bias](const auto& v) -> Waveform {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return Constant{bias};
            } else if constexpr (std::is_same_v<T, Pulse> || std::is_same_v<T, Ramp>) {
                T out = v;
                out.base = bias;
                return out;
            } else if constexpr (std::is_same_v<T, PrbsNrz>) {
                const double swing = v.high() - v.low();
                return v.with_levels(bias, bias + swing);
            } else {
                Piecewise out = v;
                const double shift = bias - *std::min_element(v.values.begin(), v.values.end());
                for (auto& x : out.values) x += shift;
                return out;
            }
        },
        w);
}

}  // namespace mqwlink
