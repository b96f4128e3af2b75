// mqwlink: command-line front end for the laser / modulator link simulator.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mqwlink/config.hpp"
#include "mqwlink/error.hpp"
#include "mqwlink/io.hpp"
#include "mqwlink/metrics.hpp"
#include "mqwlink/optimizer.hpp"
#include "mqwlink/sim.hpp"

namespace fs = std::filesystem;
using namespace mqwlink;

namespace {

enum Exit : int { ok = 0, failure = 1, config_error = 2, simulation_error = 3, infeasible = 4 };

struct Options {
    std::string config;
    std::string out;
    bool plot = false;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    double bitrate_gbps = 0.0;
    std::vector<double> bitrates_gbps;
    std::vector<double> rates_gbps;
};

class Runner {
public:
    explicit Runner(const Options& o) : opt_(o) {
        cfg_ = opt_.config.empty() ? Config{} : load_config(opt_.config);
        if (opt_.seed) cfg_.override_seed(*opt_.seed);
    }

    void laser_sim() {
        const auto trace = run_laser(cfg_.laser, cfg_.laser_drive, cfg_.sim_config());
        emit(format_trace_csv(trace, preamble("laser-sim")), PlotKind::photon_density);
        note(std::to_string(trace.size()) + " samples");
    }

    void link_sim() {
        const auto trace = run_link(cfg_.laser, cfg_.modulator, cfg_.laser_drive, cfg_.modulator_drive,
                                    cfg_.sim_config());
        emit(format_trace_csv(trace, preamble("link-sim")), PlotKind::output_power);
        note(std::to_string(trace.size()) + " samples");
    }

    void eye() {
        const double rate = gbps(opt_.bitrate_gbps);
        const LinkScenario s = cfg_.scenario();
        const auto run = scenario_at_rate(s, rate);
        const PrbsNrz* clock = as_prbs(run.mod_drive) ? as_prbs(run.mod_drive) : as_prbs(run.laser_drive);
        if (!clock) throw ConfigError("eye needs a prbs_nrz drive to define the bit clock");
        const auto trace = run_link(s.laser, s.modulator, run.laser_drive, run.mod_drive, run.sim);
        const auto folded = fold_eye(trace, *clock);
        const auto m = eye_metrics(folded, cfg_.metrics.decision_q);
        emit(format_eye_csv(folded, m, preamble("eye bit_rate_bps=" + format_number(rate))), PlotKind::eye);
        note("Q = " + format_number(m.q_factor) + (m.error_free ? " (error free)" : " (not error free)"));
    }

    void sweep() {
        const LinkEvaluator evaluator(cfg_.scenario(), cfg_.metrics.decision_q);
        const auto result = grid_sweep(cfg_.sweep_axes(), std::cref(evaluator), cfg_.constraints());
        emit(format_sweep_csv(result, preamble("sweep")), std::nullopt);
        note(result.best ? "best point index " + std::to_string(*result.best) : "no feasible point");
    }

    int optimize() {
        std::vector<double> rates;
        for (double g : opt_.bitrates_gbps) rates.push_back(gbps(g));
        std::sort(rates.begin(), rates.end());
        const LinkEvaluator evaluator(cfg_.scenario(), cfg_.metrics.decision_q);
        const auto rows = min_power_vs_bitrate(std::cref(evaluator), rates, cfg_.bounds(), cfg_.constraints(),
                                               cfg_.minimize_options());
        emit(format_min_power_csv(rows, preamble("optimize")), PlotKind::min_power_curve);
        const bool any = std::any_of(rows.begin(), rows.end(), [](const RatePower& r) { return r.result.has_value(); });
        for (const auto& r : rows) {
            if (r.result) {
                note(format_number(r.bit_rate) + " bit/s: " + format_number(r.result->evaluation.power.total) + " W");
            } else {
                note(format_number(r.bit_rate) + " bit/s: infeasible");
            }
        }
        return any ? Exit::ok : Exit::infeasible;
    }

    void max_bitrate() {
        std::vector<double> rates;
        for (double g : opt_.rates_gbps) rates.push_back(gbps(g));
        if (rates.empty()) throw ConfigError("--rates needs at least one rate");
        if (!std::is_sorted(rates.begin(), rates.end())) throw ConfigError("--rates must be ascending");
        const auto eyes = eye_vs_bitrate(cfg_.scenario(), rates, cfg_.metrics.decision_q);
        std::optional<double> best;
        for (std::size_t i = rates.size(); i-- > 0;) {
            if (eyes[i].error_free) {
                best = rates[i];
                break;
            }
        }
        emit(format_bitrate_csv(rates, eyes, best, preamble("max-bitrate")), std::nullopt);
        note(best ? "max error-free bit rate " + format_number(*best) + " bit/s" : "no rate is error free");
    }

private:
    static double gbps(double v) {
        if (!(v > 0.0)) throw ConfigError("bit rates must be > 0 Gbit/s");
        return v * 1e9;
    }

    std::string preamble(const std::string& command) const {
        return "# # mqwlink " + command + "\n" + echo_config(cfg_);
    }

    void emit(const std::string& text, std::optional<PlotKind> kind) const {
        if (opt_.out.empty()) {
            if (opt_.plot) throw ConfigError("--plot needs --out");
            std::cout << text << std::flush;
            return;
        }
        write_text(opt_.out, text);
        if (!opt_.plot) return;
        if (!kind) {
            note("--plot: no plot is defined for this command");
            return;
        }
        const fs::path csv(opt_.out);
        fs::path script = csv;
        script += ".gp";
        write_text(script, emit_gnuplot(csv.filename().string(), *kind));
        note("plot script " + script.string());
    }

    void note(const std::string& msg) const {
        if (!opt_.quiet) std::cerr << msg << "\n";
    }

    Options opt_;
    Config cfg_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directly modulated laser and quantum-well modulator link simulator"};
    app.fallthrough();
    app.require_subcommand(1);

    Options opt;
    std::uint64_t seed = 0;
    app.add_option("--config", opt.config, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", opt.out, "output CSV path (stdout when omitted)");
    app.add_flag("--plot", opt.plot, "also write a gnuplot script next to the CSV");
    auto* seed_opt = app.add_option("--seed", seed, "override the PRBS seed of every drive");
    app.add_flag("--quiet", opt.quiet, "suppress progress messages");

    auto* laser_sim = app.add_subcommand("laser-sim", "integrate the laser alone and write the trace");
    auto* link_sim = app.add_subcommand("link-sim", "laser followed by the modulator; write the trace");
    auto* eye = app.add_subcommand("eye", "fold the link output into an eye diagram");
    eye->add_option("--bitrate", opt.bitrate_gbps, "bit rate in Gbit/s")->required();
    auto* sweep = app.add_subcommand("sweep", "evaluate the [sweep] grid");
    auto* optimize = app.add_subcommand("optimize", "minimum total power per bit rate");
    optimize->add_option("--bitrate", opt.bitrates_gbps, "bit rate(s) in Gbit/s, comma separated")
        ->required()
        ->delimiter(',');
    auto* max_bitrate = app.add_subcommand("max-bitrate", "largest error-free bit rate");
    max_bitrate->add_option("--rates", opt.rates_gbps, "ascending bit rates in Gbit/s, comma separated")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Exit::config_error;
    }
    if (*seed_opt) opt.seed = seed;

    try {
        Runner run(opt);
        if (*laser_sim) run.laser_sim();
        if (*link_sim) run.link_sim();
        if (*eye) run.eye();
        if (*sweep) run.sweep();
        if (*optimize) return run.optimize();
        if (*max_bitrate) run.max_bitrate();
        return Exit::ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return Exit::config_error;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return Exit::config_error;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return Exit::infeasible;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return Exit::simulation_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::failure;
    }
}
