#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mqwlink/metrics.hpp"
#include "mqwlink/modulator.hpp"
#include "mqwlink/sim.hpp"

namespace mqwlink {

struct Evaluation {
    PowerBreakdown power;
    EyeMetrics eye;
};

using Evaluator = std::function<Evaluation(const OperatingPoint&)>;

struct Constraints {
    double decision_q = kDefaultDecisionQ;

    /// Identifier written next to sweep results.
    std::string rule() const;
};

/// Cartesian design grid. Enumeration is row-major in the declared field order:
/// bias_current (slowest), il, bit_rate, v_bias, v_dd (fastest).
struct SweepAxes {
    std::vector<double> bias_current;
    std::vector<double> il;
    std::vector<double> bit_rate;
    std::vector<double> v_bias;
    std::vector<double> v_dd;
    double k = 4.0;  // alpha_max/alpha_min used to derive CR from IL

    std::size_t size() const;
};

struct SweepPoint {
    OperatingPoint point;
    std::optional<Evaluation> evaluation;  // empty when the evaluator failed
    std::string error;
    bool feasible = false;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::optional<std::size_t> best;
    std::string feasibility_rule;
};

/// Strict preference between two feasible points: lower total power, then lower IL,
/// then lower bias current.
bool preferred(const SweepPoint& a, const SweepPoint& b);

/// Feasible argmin with the fixed tie-break; ties that survive it go to the lower index.
std::optional<std::size_t> select_best(const std::vector<SweepPoint>& points);

/// Evaluates every grid point (concurrently). Evaluator failures mark the point and
/// the sweep continues. Throws ConfigError for empty axes or more than 1e6 points.
SweepResult grid_sweep(const SweepAxes& axes, const Evaluator& evaluate,
                       const Constraints& constraints = {}, unsigned threads = 0);

/// Evaluates operating points on a link scenario. The laser runs with its drive
/// shifted to the point's bias current; the modulator is driven with the scenario's
/// bit clock between V_bias (0 bits) and V_bias - V_dd (1 bits) through the closed-form
/// (IL, K) absorption pair. Laser traces are cached per (bias, bit rate).
class LinkEvaluator {
public:
    LinkEvaluator(LinkScenario scenario, double decision_q = kDefaultDecisionQ);

    Evaluation operator()(const OperatingPoint& point) const;

    /// Output-power trace the evaluator analyses for `point`.
    Trace trace(const OperatingPoint& point) const;

    const LinkScenario& scenario() const noexcept { return scenario_; }
    std::size_t laser_runs() const;

private:
    struct Cache;

    std::shared_ptr<const Trace> laser_trace(double bias, double bit_rate) const;
    PrbsNrz modulator_clock(const OperatingPoint& point) const;

    LinkScenario scenario_;
    double decision_q_;
    std::shared_ptr<Cache> cache_;
};

struct Bounds {
    double bias_min = 0.5e-3;
    double bias_max = 4.0e-3;
    double il_min = 0.05;
    double il_max = 0.6;
    double v_bias = 1.5;
    double v_dd = 1.0;
    double k = 4.0;
};

struct MinimizeOptions {
    std::size_t grid_points = 16;
    double rel_tol = 1e-3;  // relative tolerance of the refined coordinates
    std::size_t fallback_points = 33;
    unsigned threads = 0;
};

struct OptimizationResult {
    OperatingPoint point;
    Evaluation evaluation;
    SweepResult coarse;
    std::size_t evaluations = 0;
    std::string method;  // refinement path actually taken
};

/// Coarse bias x IL grid followed by refinement. Where feasible power rises with bias
/// (the physical regime) the IL axis is refined by golden-section search on the
/// bias-profiled objective, each profile value bisecting bias onto the feasibility
/// boundary; a bracketing check falls back to a fine IL grid. Otherwise golden-section
/// runs on IL at the best coarse bias and then on bias. Never returns anything worse
/// than the best coarse point. Throws InfeasibleError if no coarse point is feasible.
OptimizationResult minimize_power(const Evaluator& evaluate, double bit_rate, const Bounds& bounds,
                                  const Constraints& constraints = {},
                                  const MinimizeOptions& options = {});

struct RatePower {
    double bit_rate = 0.0;
    std::optional<OptimizationResult> result;  // empty when infeasible
    std::string error;
};

/// minimize_power per rate; infeasible or failing rates are kept with an empty result.
std::vector<RatePower> min_power_vs_bitrate(const Evaluator& evaluate, const std::vector<double>& rates,
                                            const Bounds& bounds, const Constraints& constraints = {},
                                            const MinimizeOptions& options = {});

/// Evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace mqwlink
