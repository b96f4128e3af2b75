#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace mqwlink {

struct Constant {
    double level = 0.0;
    bool operator==(const Constant&) const = default;
};

/// Trapezoidal pulse: linear rise over t_rise starting at t_start, flat top for
/// `width`, then a linear fall over t_fall back to `base`.
struct Pulse {
    double base = 0.0;
    double amplitude = 0.0;
    double t_start = 0.0;
    double width = 0.0;
    double t_rise = 0.0;
    double t_fall = 0.0;
    bool operator==(const Pulse&) const = default;
};

/// base + slope * (t - t_start) for t >= t_start, base before.
struct Ramp {
    double base = 0.0;
    double slope = 0.0;
    double t_start = 0.0;
    bool operator==(const Ramp&) const = default;
};

/// Linear interpolation between samples; clamps to the end values outside.
struct Piecewise {
    std::vector<double> times;
    std::vector<double> values;
    bool operator==(const Piecewise&) const = default;
};

std::vector<std::uint8_t> prbs_bits(int register_length, std::uint64_t seed, std::size_t n);

/// Period of a maximal-length sequence, 2^L - 1.
std::uint64_t prbs_period(int register_length);

/// NRZ line code of a maximal-length PRBS. Bit k occupies [k/bit_rate, (k+1)/bit_rate);
/// `low` is emitted for a 0 and `high` for a 1. Transitions are linear, last t_edge and
/// are centred on the bit boundaries, so the middle of every bit is the settled level.
class PrbsNrz {
public:
    PrbsNrz(double bit_rate, int register_length, std::uint64_t seed, double low, double high,
            double t_edge);

    double bit_rate() const noexcept { return bit_rate_; }
    double unit_interval() const noexcept { return 1.0 / bit_rate_; }
    int register_length() const noexcept { return register_length_; }
    std::uint64_t seed() const noexcept { return seed_; }
    double low() const noexcept { return low_; }
    double high() const noexcept { return high_; }
    double t_edge() const noexcept { return t_edge_; }

    /// Value of bit `k` of the sequence (0 or 1).
    int bit(std::uint64_t k) const;
    double level(std::uint64_t k) const { return bit(k) ? high_ : low_; }
    double sample(double t) const;

    /// Same bit sequence with new levels; the bit table is shared.
    PrbsNrz with_levels(double low, double high) const;
    /// Same bit sequence at another rate and edge time; the bit table is shared.
    PrbsNrz with_timing(double bit_rate, double t_edge) const;

    bool operator==(const PrbsNrz& o) const {
        return bit_rate_ == o.bit_rate_ && register_length_ == o.register_length_ &&
               seed_ == o.seed_ && low_ == o.low_ && high_ == o.high_ && t_edge_ == o.t_edge_;
    }

private:
    struct Table;

    double bit_rate_;
    int register_length_;
    std::uint64_t seed_;
    double low_;
    double high_;
    double t_edge_;
    std::shared_ptr<const Table> table_;
};

using Waveform = std::variant<Constant, Pulse, Ramp, PrbsNrz, Piecewise>;

/// Throws ConfigError when a variant's invariants do not hold.
void validate(const Waveform& w);

double sample(const Waveform& w, double t);

const PrbsNrz* as_prbs(const Waveform& w);

/// Moves a PRBS waveform to a new bit rate, keeping its edge time as a fixed
/// fraction of the unit interval. Other kinds are returned unchanged.
Waveform with_bit_rate(const Waveform& w, double bit_rate);

/// Replaces the seed of a PRBS waveform; other kinds are returned unchanged.
Waveform with_seed(const Waveform& w, std::uint64_t seed);

/// Shifts a drive so its resting level (constant level, pulse/ramp base, PRBS zero
/// level, piecewise minimum) equals `bias`, preserving the swing.
Waveform with_bias(const Waveform& w, double bias);

}  // namespace mqwlink
