#include "mqwlink/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mqwlink/error.hpp"
#include "mqwlink/parallel.hpp"
#include "text.hpp"

namespace mqwlink {

namespace {

constexpr std::size_t kMaxGridPoints = 1'000'000;
constexpr double kInvPhi = 0.6180339887498949;

// Ordering used while refining: feasible points by power, infeasible ones by how far
// they miss the Q target, failures last.
struct Key {
    int rank = 2;
    double value = 0.0;

    bool operator<(const Key& o) const {
        if (rank != o.rank) return rank < o.rank;
        return value < o.value;
    }
};

Key key_of(const SweepPoint& p, double decision_q) {
    if (!p.evaluation) return {2, 0.0};
    if (p.feasible) return {0, p.evaluation->power.total};
    return {1, decision_q - p.evaluation->eye.q_factor};
}

SweepPoint evaluate_point(const Evaluator& evaluate, const OperatingPoint& point,
                          const Constraints& c) {
    SweepPoint sp;
    sp.point = point;
    try {
        Evaluation e = evaluate(point);
        e.eye.error_free = e.eye.q_factor >= c.decision_q;
        sp.feasible = e.eye.error_free;
        sp.evaluation = e;
    } catch (const std::exception& e) {
        sp.error = e.what();
    }
    return sp;
}

// Minimises f on [a, b] by golden-section search down to an interval of width tol.
template <class F>
void golden(double a, double b, double tol, F&& f) {
    if (!(b > a)) {
        f(a);
        return;
    }
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    Key fc = f(c);
    Key fd = f(d);
    while (b - a > tol) {
        if (!(fd < fc)) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
}

class Refiner {
public:
    Refiner(const Evaluator& evaluate, double bit_rate, const Bounds& b, const Constraints& c)
        : evaluate_(evaluate), rate_(bit_rate), b_(b), c_(c) {}

    const SweepPoint& at(double bias, double il) {
        bias = std::clamp(bias, b_.bias_min, b_.bias_max);
        il = std::clamp(il, b_.il_min, b_.il_max);
        const auto op = make_operating_point(bias, il, b_.k, rate_, b_.v_bias, b_.v_dd);
        visited_.push_back(evaluate_point(evaluate_, op, c_));
        return visited_.back();
    }

    Key key(const SweepPoint& p) const { return key_of(p, c_.decision_q); }

    std::vector<SweepPoint>& visited() { return visited_; }

private:
    const Evaluator& evaluate_;
    double rate_;
    Bounds b_;
    Constraints c_;
    std::vector<SweepPoint> visited_;
};

}  // namespace

std::string Constraints::rule() const { return "q_factor>=" + detail::shortest(decision_q); }

std::size_t SweepAxes::size() const {
    return bias_current.size() * il.size() * bit_rate.size() * v_bias.size() * v_dd.size();
}

bool preferred(const SweepPoint& a, const SweepPoint& b) {
    const double pa = a.evaluation->power.total;
    const double pb = b.evaluation->power.total;
    if (pa != pb) return pa < pb;
    if (a.point.il != b.point.il) return a.point.il < b.point.il;
    return a.point.bias_current < b.point.bias_current;
}

std::optional<std::size_t> select_best(const std::vector<SweepPoint>& points) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].feasible || !points[i].evaluation) continue;
        if (!best || preferred(points[i], points[*best])) best = i;
    }
    return best;
}

SweepResult grid_sweep(const SweepAxes& axes, const Evaluator& evaluate,
                       const Constraints& constraints, unsigned threads) {
    if (axes.bias_current.empty() || axes.il.empty() || axes.bit_rate.empty() ||
        axes.v_bias.empty() || axes.v_dd.empty()) {
        throw ConfigError("sweep axes must all be non-empty");
    }
    // Guard against overflow before multiplying out.
    double total = 1.0;
    for (const auto* axis : {&axes.bias_current, &axes.il, &axes.bit_rate, &axes.v_bias, &axes.v_dd}) {
        total *= static_cast<double>(axis->size());
    }
    if (total > static_cast<double>(kMaxGridPoints)) {
        throw ConfigError("sweep grid exceeds 1e6 points");
    }

    const std::size_t n_vdd = axes.v_dd.size();
    const std::size_t n_vb = axes.v_bias.size();
    const std::size_t n_rate = axes.bit_rate.size();
    const std::size_t n_il = axes.il.size();

    SweepResult result;
    result.feasibility_rule = constraints.rule();
    result.points.resize(axes.size());
    parallel_for(
        result.points.size(),
        [&](std::size_t idx) {
            std::size_t r = idx;
            const std::size_t i_vdd = r % n_vdd;
            r /= n_vdd;
            const std::size_t i_vb = r % n_vb;
            r /= n_vb;
            const std::size_t i_rate = r % n_rate;
            r /= n_rate;
            const std::size_t i_il = r % n_il;
            const std::size_t i_bias = r / n_il;
            SweepPoint& sp = result.points[idx];
            try {
                const auto op = make_operating_point(axes.bias_current[i_bias], axes.il[i_il], axes.k,
                                                     axes.bit_rate[i_rate], axes.v_bias[i_vb],
                                                     axes.v_dd[i_vdd]);
                sp = evaluate_point(evaluate, op, constraints);
            } catch (const std::exception& e) {
                sp.point = OperatingPoint{axes.bias_current[i_bias], axes.il[i_il], 0.0,
                                          axes.bit_rate[i_rate], axes.v_bias[i_vb], axes.v_dd[i_vdd]};
                sp.error = e.what();
            }
        },
        threads);
    result.best = select_best(result.points);
    return result;
}

// ---------------------------------------------------------------------------

struct LinkEvaluator::Cache {
    std::mutex mutex;
    std::map<std::pair<double, double>, std::shared_ptr<const Trace>> traces;
    std::size_t runs = 0;
};

LinkEvaluator::LinkEvaluator(LinkScenario scenario, double decision_q)
    : scenario_(std::move(scenario)), decision_q_(decision_q), cache_(std::make_shared<Cache>()) {
    if (!scenario_.clock()) {
        throw ConfigError("link evaluation needs a prbs_nrz drive to define the bit clock");
    }
}

std::size_t LinkEvaluator::laser_runs() const {
    std::lock_guard lock(cache_->mutex);
    return cache_->runs;
}

std::shared_ptr<const Trace> LinkEvaluator::laser_trace(double bias, double bit_rate) const {
    const auto key = std::make_pair(bias, bit_rate);
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->traces.find(key); it != cache_->traces.end()) return it->second;
    }
    LinkScenario s = scenario_;
    s.laser_drive = with_bias(s.laser_drive, bias);
    const auto run = scenario_at_rate(s, bit_rate);
    std::shared_ptr<const Trace> trace;
    if (s.source == Source::constant_master) {
        Trace tr = run_link(s.laser, s.modulator, run.laser_drive, Constant{0.0}, run.sim);
        trace = std::make_shared<const Trace>(std::move(tr));
    } else {
        trace = std::make_shared<const Trace>(run_laser(s.laser, run.laser_drive, run.sim));
    }
    std::lock_guard lock(cache_->mutex);
    ++cache_->runs;
    return cache_->traces.emplace(key, trace).first->second;
}

PrbsNrz LinkEvaluator::modulator_clock(const OperatingPoint& point) const {
    const PrbsNrz& base = *scenario_.clock();
    const double edge_fraction = base.t_edge() * base.bit_rate();
    return base.with_timing(point.bit_rate, edge_fraction / point.bit_rate)
        .with_levels(point.v_bias, point.v_bias - point.v_dd);
}

Trace LinkEvaluator::trace(const OperatingPoint& point) const {
    if (!(point.bit_rate > 0.0)) throw ConfigError("operating point bit rate must be > 0");
    if (!(point.il > 0.0 && point.il < 1.0)) throw DomainError("operating point IL must be in (0, 1)");
    if (!(point.cr >= 1.0)) throw DomainError("operating point CR must be >= 1");
    if (!(point.v_dd > 0.0)) throw DomainError("operating point V_dd must be > 0");

    const double k = 1.0 - std::log(point.cr) / std::log1p(-point.il);
    const auto model = closed_form_absorption(point.il, k, point.v_bias - point.v_dd, point.v_bias,
                                              scenario_.modulator.absorption.length);
    const PrbsNrz drive = modulator_clock(point);

    Trace tr = *laser_trace(point.bias_current, point.bit_rate);
    tr.modulator_drive.resize(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) tr.modulator_drive[i] = drive.sample(tr.time(i));
    tr.output_power = modulate(tr.laser_power, tr.t0, tr.dt_sample, drive, model);
    return tr;
}

Evaluation LinkEvaluator::operator()(const OperatingPoint& point) const {
    const Trace tr = trace(point);
    Evaluation e;
    e.eye = eye_metrics(fold_eye(tr, modulator_clock(point)), decision_q_);
    ModulatorParams m = scenario_.modulator;
    m.v_bias = point.v_bias;
    m.v_dd = point.v_dd;
    e.power = transmitter_power(point, scenario_.laser, m, scenario_.source);
    return e;
}

// ---------------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> v(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
    v.back() = hi;
    return v;
}

OptimizationResult minimize_power(const Evaluator& evaluate, double bit_rate, const Bounds& b,
                                  const Constraints& c, const MinimizeOptions& opt) {
    if (!(b.bias_min >= 0.0 && b.bias_max >= b.bias_min)) {
        throw ConfigError("optimize bias bounds must satisfy 0 <= min <= max");
    }
    if (!(b.il_min > 0.0 && b.il_max >= b.il_min && b.il_max < 1.0)) {
        throw ConfigError("optimize IL bounds must satisfy 0 < min <= max < 1");
    }
    if (!(bit_rate > 0.0)) throw ConfigError("optimize bit rate must be > 0");
    if (opt.grid_points < 2) throw ConfigError("optimize grid_points must be >= 2");
    if (!(opt.rel_tol > 0.0)) throw ConfigError("optimize rel_tol must be > 0");

    SweepAxes axes;
    axes.bias_current = linspace(b.bias_min, b.bias_max, opt.grid_points);
    axes.il = linspace(b.il_min, b.il_max, opt.grid_points);
    axes.bit_rate = {bit_rate};
    axes.v_bias = {b.v_bias};
    axes.v_dd = {b.v_dd};
    axes.k = b.k;

    OptimizationResult out;
    out.coarse = grid_sweep(axes, evaluate, c, opt.threads);
    if (!out.coarse.best) {
        throw InfeasibleError("no coarse grid point at " + detail::shortest(bit_rate) +
                              " bit/s satisfies " + c.rule());
    }

    const std::size_t n = opt.grid_points;
    const auto& biases = axes.bias_current;
    const auto& ils = axes.il;
    auto coarse_at = [&](std::size_t i_bias, std::size_t i_il) -> const SweepPoint& {
        return out.coarse.points[i_bias * n + i_il];
    };
    const double bias_cell = (b.bias_max - b.bias_min) / static_cast<double>(n - 1);
    const double il_cell = (b.il_max - b.il_min) / static_cast<double>(n - 1);
    const double bias_tol = opt.rel_tol * bias_cell;
    const double il_tol = opt.rel_tol * il_cell;

    // With power rising in bias at fixed IL, the cheapest feasible point of a column
    // sits on the feasibility boundary, so IL can be searched on that profile.
    bool power_rises_with_bias = true;
    for (std::size_t j = 0; j < n && power_rises_with_bias; ++j) {
        const SweepPoint* prev = nullptr;
        for (std::size_t i = 0; i < n; ++i) {
            const SweepPoint& p = coarse_at(i, j);
            if (!p.evaluation) continue;
            if (prev && !(p.evaluation->power.total > prev->evaluation->power.total)) {
                power_rises_with_bias = false;
                break;
            }
            prev = &p;
        }
    }

    Refiner ref(evaluate, bit_rate, b, c);

    if (power_rises_with_bias && b.bias_max > b.bias_min && b.il_max > b.il_min) {
        out.method = "bias-profiled golden section on IL";
        // Lowest feasible coarse bias index per IL column (n when none).
        std::vector<std::size_t> first(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                if (coarse_at(i, j).feasible) {
                    first[j] = i;
                    break;
                }
            }
        }
        // Cheapest feasible bias at this IL, bisected onto the feasibility boundary.
        auto boundary = [&](double il) -> std::optional<SweepPoint> {
            const double pos = (il - b.il_min) / il_cell;
            const auto j0 = std::min(n - 1, static_cast<std::size_t>(std::max(0.0, std::floor(pos))));
            const auto j1 = std::min(n - 1, j0 + 1);
            const std::size_t f_hi = std::min(std::max(first[j0], first[j1]), n - 1);
            const std::size_t f_lo = std::min(first[j0], first[j1]);
            double hi = biases[f_hi];
            double lo = f_lo == 0 || f_lo >= n ? b.bias_min : biases[f_lo - 1];

            SweepPoint ph = ref.at(hi, il);
            while (!ph.feasible) {
                if (hi >= b.bias_max) return std::nullopt;
                lo = hi;
                hi = std::min(b.bias_max, hi + bias_cell);
                ph = ref.at(hi, il);
            }
            lo = std::min(lo, hi);
            SweepPoint pl = ref.at(lo, il);
            while (pl.feasible) {
                hi = lo;
                ph = pl;
                if (lo <= b.bias_min) return ph;
                lo = std::max(b.bias_min, lo - bias_cell);
                pl = ref.at(lo, il);
            }
            while (hi - lo > bias_tol) {
                const double mid = 0.5 * (lo + hi);
                SweepPoint pm = ref.at(mid, il);
                if (pm.feasible) {
                    hi = mid;
                    ph = std::move(pm);
                } else {
                    lo = mid;
                }
            }
            return ph;
        };
        auto profile = [&](double il) -> Key {
            const auto p = boundary(il);
            return p ? ref.key(*p) : Key{2, 0.0};
        };

        std::vector<Key> column(n);
        std::size_t j_best = 0;
        for (std::size_t j = 0; j < n; ++j) {
            column[j] = profile(ils[j]);
            if (column[j] < column[j_best]) j_best = j;
        }
        const double a = ils[j_best == 0 ? 0 : j_best - 1];
        const double z = ils[std::min(n - 1, j_best + 1)];
        Key golden_best{2, 0.0};
        golden(a, z, il_tol, [&](double il) {
            const Key k = profile(il);
            if (k < golden_best) golden_best = k;
            return k;
        });
        if (column[j_best] < golden_best) {
            // The profile is not unimodal inside the bracket: scan it densely instead.
            out.method += " with fine-grid fallback";
            for (double il : linspace(a, z, opt.fallback_points)) profile(il);
        }
    } else {
        out.method = "golden section on IL at best bias, then on bias";
        const SweepPoint& best = out.coarse.points[*out.coarse.best];
        const auto i_bias = static_cast<std::size_t>(std::llround((best.point.bias_current - b.bias_min) /
                                                                   (bias_cell > 0.0 ? bias_cell : 1.0)));
        const auto i_il = static_cast<std::size_t>(std::llround((best.point.il - b.il_min) /
                                                                (il_cell > 0.0 ? il_cell : 1.0)));
        const double bias0 = best.point.bias_current;
        const double il_a = ils[i_il == 0 ? 0 : i_il - 1];
        const double il_z = ils[std::min(n - 1, i_il + 1)];
        const Key start = ref.key(best);
        Key found{2, 0.0};
        double il_star = best.point.il;
        golden(il_a, il_z, il_tol, [&](double il) {
            const Key k = ref.key(ref.at(bias0, il));
            if (k < found) {
                found = k;
                il_star = il;
            }
            return k;
        });
        if (start < found) {
            out.method += " with fine-grid fallback";
            for (double il : linspace(il_a, il_z, opt.fallback_points)) ref.at(bias0, il);
            il_star = best.point.il;
        }
        const double b_a = biases[i_bias == 0 ? 0 : i_bias - 1];
        const double b_z = biases[std::min(n - 1, i_bias + 1)];
        golden(b_a, b_z, bias_tol, [&](double bias) { return ref.key(ref.at(bias, il_star)); });
    }

    // Final choice over everything evaluated, coarse grid included.
    std::vector<SweepPoint> all = out.coarse.points;
    auto& visited = ref.visited();
    all.insert(all.end(), std::make_move_iterator(visited.begin()), std::make_move_iterator(visited.end()));
    const auto best = select_best(all);
    out.point = all[*best].point;
    out.evaluation = *all[*best].evaluation;
    out.evaluations = all.size();
    return out;
}

std::vector<RatePower> min_power_vs_bitrate(const Evaluator& evaluate, const std::vector<double>& rates,
                                            const Bounds& bounds, const Constraints& constraints,
                                            const MinimizeOptions& options) {
    if (!std::is_sorted(rates.begin(), rates.end())) {
        throw ConfigError("min_power_vs_bitrate: rates must be ascending");
    }
    std::vector<RatePower> out;
    out.reserve(rates.size());
    for (double rate : rates) {
        RatePower row;
        row.bit_rate = rate;
        try {
            row.result = minimize_power(evaluate, rate, bounds, constraints, options);
        } catch (const InfeasibleError& e) {
            row.error = e.what();
        } catch (const SimulationError& e) {
            row.error = e.what();
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace mqwlink
