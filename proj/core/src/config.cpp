#include "mqwlink/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mqwlink/constants.hpp"
#include "mqwlink/error.hpp"
#include "text.hpp"

namespace mqwlink {

namespace {

using detail::parse_double;
using detail::parse_unsigned;
using detail::shortest;
using detail::trim;

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

std::vector<Section> tokenize(std::string_view text) {
    std::vector<Section> sections;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header");
            const auto name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) fail(line_no, "empty section name");
            for (const auto& s : sections) {
                if (s.name == name) fail(line_no, "duplicate section [" + std::string(name) + "]");
            }
            sections.push_back({std::string(name), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
        if (sections.empty()) fail(line_no, "key outside of a section");
        const auto key = trim(line.substr(0, eq));
        auto value = line.substr(eq + 1);
        // Inline comment: '#' preceded by whitespace.
        for (std::size_t i = 1; i < value.size(); ++i) {
            if (value[i] == '#' && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
                value = value.substr(0, i);
                break;
            }
        }
        value = trim(value);
        if (key.empty()) fail(line_no, "missing key");
        auto& sec = sections.back();
        for (const auto& e : sec.entries) {
            if (e.key == key) fail(line_no, "duplicate key '" + std::string(key) + "'");
        }
        sec.entries.push_back({std::string(key), std::string(value), line_no});
    }
    return sections;
}

// Typed access to one entry; errors carry the line and the key.
struct Value {
    const Entry& e;

    [[noreturn]] void bad(const std::string& what) const {
        fail(e.line, e.key + " " + what + " (got '" + e.value + "')");
    }

    double number() const {
        const auto v = parse_double(e.value);
        if (!v) bad("must be a finite number");
        return *v;
    }
    double positive() const {
        const double v = number();
        if (!(v > 0.0)) bad("must be > 0");
        return v;
    }
    double non_negative() const {
        const double v = number();
        if (!(v >= 0.0)) bad("must be >= 0");
        return v;
    }
    double in(double lo, double hi, bool lo_open, bool hi_open) const {
        const double v = number();
        const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
        if (!ok) {
            bad(std::string("must be in ") + (lo_open ? "(" : "[") + shortest(lo) + ", " + shortest(hi) +
                (hi_open ? ")" : "]"));
        }
        return v;
    }
    unsigned long long integer(unsigned long long min) const {
        const auto v = parse_unsigned(e.value);
        if (!v) bad("must be a non-negative integer");
        if (*v < min) bad("must be >= " + std::to_string(min));
        return *v;
    }
    std::optional<double> positive_or_auto() const {
        if (e.value == "auto") return std::nullopt;
        return positive();
    }
    std::optional<double> non_negative_or_auto() const {
        if (e.value == "auto") return std::nullopt;
        return non_negative();
    }
    std::vector<double> list() const {
        std::vector<double> out;
        if (trim(e.value).empty()) bad("must be a non-empty comma-separated list");
        for (auto item : detail::split(e.value, ',')) {
            const auto v = parse_double(item);
            if (!v) bad("must be a comma-separated list of finite numbers");
            out.push_back(*v);
        }
        return out;
    }
};

using Handler = std::function<void(const Value&)>;

void apply_entries(const Section& sec, const std::map<std::string, Handler>& handlers) {
    for (const auto& e : sec.entries) {
        const auto it = handlers.find(e.key);
        if (it == handlers.end()) fail(e.line, "unknown key '" + e.key + "' in [" + sec.name + "]");
        it->second(Value{e});
    }
}

// Re-throws a model validation error with the section it came from.
template <class F>
void checked(const Section& sec, F&& f) {
    try {
        f();
    } catch (const ConfigError& err) {
        fail(sec.line, "[" + sec.name + "] " + err.what());
    }
}

void parse_laser(const Section& sec, Config& cfg) {
    auto& p = cfg.laser;
    apply_entries(sec, {
                   {"volume_m3", [&](const Value& v) { p.volume = v.positive(); }},
                   {"g0_m3_per_s", [&](const Value& v) { p.g0 = v.positive(); }},
                   {"n0_per_m3", [&](const Value& v) { p.n0 = v.non_negative(); }},
                   {"eps_m3", [&](const Value& v) { p.eps = v.non_negative(); }},
                   {"tau_n_s", [&](const Value& v) { p.tau_n = v.positive(); }},
                   {"tau_p_s", [&](const Value& v) { p.tau_p = v.positive(); }},
                   {"gamma", [&](const Value& v) { p.gamma = v.in(0.0, 1.0, true, false); }},
                   {"beta", [&](const Value& v) { p.beta = v.in(0.0, 1.0, false, false); }},
                   {"alpha", [&](const Value& v) { p.alpha = v.number(); }},
                   {"eta_sp", [&](const Value& v) { p.eta_sp = v.in(0.0, 1.0, true, false); }},
                   {"lambda_nm", [&](const Value& v) { cfg.lambda_nm = v.positive(); }},
                   {"v_drop_v", [&](const Value& v) { p.drop_voltage = v.non_negative(); }},
               });
    p.photon_energy = constants::photon_energy_from_nm(cfg.lambda_nm);
    checked(sec, [&] { p.validate(); });
}

void parse_modulator(const Section& sec, Config& cfg, const std::filesystem::path& base_dir) {
    auto& m = cfg.modulator;
    std::optional<std::string> csv;
    int csv_line = 0;
    std::optional<std::vector<double>> table_v;
    std::optional<std::vector<double>> table_alpha;
    apply_entries(sec, {
                   {"absorption_csv",
                    [&](const Value& v) {
                        if (v.e.value.empty()) v.bad("must name a file");
                        csv = v.e.value;
                        csv_line = v.e.line;
                    }},
                   {"table_v", [&](const Value& v) { table_v = v.list(); }},
                   {"table_alpha_per_m", [&](const Value& v) { table_alpha = v.list(); }},
                   {"length_m", [&](const Value& v) { m.absorption.length = v.positive(); }},
                   {"k_ratio",
                    [&](const Value& v) {
                        m.k = v.number();
                        if (!(m.k >= 1.0)) v.bad("must be >= 1");
                    }},
                   {"responsivity_a_per_w", [&](const Value& v) { m.responsivity = v.positive(); }},
                   {"v_bias_v", [&](const Value& v) { m.v_bias = v.non_negative(); }},
                   {"v_dd_v", [&](const Value& v) { m.v_dd = v.non_negative(); }},
                   {"c_mod_f", [&](const Value& v) { m.c_mod = v.non_negative(); }},
                   {"p_in_w", [&](const Value& v) { m.p_in = v.non_negative(); }},
                   {"activity", [&](const Value& v) { m.activity = v.in(0.0, 1.0, false, false); }},
               });
    if (csv) {
        if (table_v || table_alpha) fail(csv_line, "absorption_csv excludes table_v and table_alpha_per_m");
        std::filesystem::path path(*csv);
        if (path.is_relative()) path = base_dir / path;
        try {
            m.absorption = load_absorption_csv(path, m.absorption.length);
        } catch (const ConfigError& err) {
            fail(csv_line, std::string("absorption_csv: ") + err.what());
        }
    } else if (table_v || table_alpha) {
        if (!table_v || !table_alpha) fail(sec.line, "table_v and table_alpha_per_m must be given together");
        m.absorption.voltage = *table_v;
        m.absorption.alpha = *table_alpha;
    }
    checked(sec, [&] {
        m.absorption.validate();
        m.validate();
    });
}

const char* kind_name(const Waveform& w) {
    switch (w.index()) {
        case 0: return "constant";
        case 1: return "pulse";
        case 2: return "ramp";
        case 3: return "prbs_nrz";
        default: return "piecewise";
    }
}

Waveform parse_drive(const Section& sec, const Waveform& current) {
    std::string kind = kind_name(current);
    for (const auto& e : sec.entries) {
        if (e.key != "kind") continue;
        if (e.value != "constant" && e.value != "pulse" && e.value != "ramp" && e.value != "prbs_nrz" &&
            e.value != "piecewise") {
            fail(e.line, "kind must be one of constant, pulse, ramp, prbs_nrz, piecewise (got '" + e.value + "')");
        }
        kind = e.value;
    }
    const bool same = kind == kind_name(current);
    std::map<std::string, Handler> h{{"kind", [](const Value&) {}}};

    if (kind == "constant") {
        Constant c = same ? std::get<Constant>(current) : Constant{};
        h["level"] = [&](const Value& v) { c.level = v.number(); };
        apply_entries(sec, h);
        return c;
    }
    if (kind == "pulse") {
        Pulse p = same ? std::get<Pulse>(current) : Pulse{};
        h["base"] = [&](const Value& v) { p.base = v.number(); };
        h["amplitude"] = [&](const Value& v) { p.amplitude = v.number(); };
        h["t_start_s"] = [&](const Value& v) { p.t_start = v.non_negative(); };
        h["width_s"] = [&](const Value& v) { p.width = v.positive(); };
        h["t_rise_s"] = [&](const Value& v) { p.t_rise = v.non_negative(); };
        h["t_fall_s"] = [&](const Value& v) { p.t_fall = v.non_negative(); };
        apply_entries(sec, h);
        if (!(p.width > 0.0)) fail(sec.line, "[" + sec.name + "] pulse needs width_s > 0");
        return p;
    }
    if (kind == "ramp") {
        Ramp r = same ? std::get<Ramp>(current) : Ramp{};
        h["base"] = [&](const Value& v) { r.base = v.number(); };
        h["slope_per_s"] = [&](const Value& v) { r.slope = v.number(); };
        h["t_start_s"] = [&](const Value& v) { r.t_start = v.non_negative(); };
        apply_entries(sec, h);
        return r;
    }
    if (kind == "prbs_nrz") {
        const PrbsNrz base = same ? std::get<PrbsNrz>(current) : std::get<PrbsNrz>(default_laser_drive());
        double rate = base.bit_rate();
        auto length = static_cast<unsigned long long>(base.register_length());
        unsigned long long seed = base.seed();
        double low = base.low();
        double high = base.high();
        double edge = base.t_edge();
        int edge_line = sec.line;
        h["bit_rate_bps"] = [&](const Value& v) { rate = v.positive(); };
        h["register_length"] = [&](const Value& v) {
            length = v.integer(1);
            if (length != 7 && length != 15 && length != 23 && length != 31) v.bad("must be 7, 15, 23 or 31");
        };
        h["seed"] = [&](const Value& v) { seed = v.integer(1); };
        h["low"] = [&](const Value& v) { low = v.number(); };
        h["high"] = [&](const Value& v) { high = v.number(); };
        h["t_edge_s"] = [&](const Value& v) {
            edge = v.non_negative();
            edge_line = v.e.line;
        };
        apply_entries(sec, h);
        if (!(edge < 1.0 / rate)) fail(edge_line, "t_edge_s must be below one unit interval (1/bit_rate_bps)");
        if (length < 64 && seed >= (1ULL << length)) {
            fail(sec.line, "[" + sec.name + "] seed must be below 2^register_length");
        }
        Waveform out = Constant{};
        checked(sec, [&] { out = PrbsNrz(rate, static_cast<int>(length), seed, low, high, edge); });
        return out;
    }
    Piecewise p = same ? std::get<Piecewise>(current) : Piecewise{};
    h["times_s"] = [&](const Value& v) { p.times = v.list(); };
    h["values"] = [&](const Value& v) { p.values = v.list(); };
    apply_entries(sec, h);
    Waveform out = p;
    checked(sec, [&] { validate(out); });
    return out;
}

void parse_sim(const Section& sec, Config& cfg) {
    auto& s = cfg.sim;
    apply_entries(sec, {
                   {"t_end_s", [&](const Value& v) { s.t_end = v.positive(); }},
                   {"dt_s", [&](const Value& v) { s.dt = v.positive_or_auto(); }},
                   {"record_stride", [&](const Value& v) { s.record_stride = v.integer(1); }},
                   {"transient_skip_s", [&](const Value& v) { s.transient_skip = v.non_negative_or_auto(); }},
                   {"initial_n_m3", [&](const Value& v) { s.initial.n = v.non_negative(); }},
                   {"initial_s_m3", [&](const Value& v) { s.initial.s = v.non_negative(); }},
                   {"initial_phase_rad", [&](const Value& v) { s.initial.phi = v.number(); }},
                   {"source",
                    [&](const Value& v) {
                        if (v.e.value == "laser") {
                            s.source = Source::laser;
                        } else if (v.e.value == "constant_master") {
                            s.source = Source::constant_master;
                        } else {
                            v.bad("must be laser or constant_master");
                        }
                    }},
               });
}

void parse_metrics(const Section& sec, Config& cfg) {
    auto& m = cfg.metrics;
    apply_entries(sec, {
                   {"decision_q", [&](const Value& v) { m.decision_q = v.positive(); }},
                   {"n_bits", [&](const Value& v) { m.n_bits = v.integer(32); }},
                   {"samples_per_ui", [&](const Value& v) { m.samples_per_ui = v.integer(20); }},
               });
}

void parse_sweep(const Section& sec, Config& cfg) {
    auto& s = cfg.sweep;
    auto each = [](const Value& v, std::vector<double> list, auto&& ok, const char* rule) {
        for (double x : list) {
            if (!ok(x)) v.bad(std::string("entries must be ") + rule);
        }
        return list;
    };
    apply_entries(sec, {
                   {"bias_current_a",
                    [&](const Value& v) {
                        s.bias_current = each(v, v.list(), [](double x) { return x >= 0.0; }, ">= 0");
                    }},
                   {"il",
                    [&](const Value& v) {
                        s.il = each(v, v.list(), [](double x) { return x > 0.0 && x < 1.0; }, "in (0, 1)");
                    }},
                   {"bit_rate_bps",
                    [&](const Value& v) {
                        s.bit_rate = each(v, v.list(), [](double x) { return x > 0.0; }, "> 0");
                    }},
                   {"v_bias_v",
                    [&](const Value& v) {
                        s.v_bias = each(v, v.list(), [](double x) { return x >= 0.0; }, ">= 0");
                    }},
                   {"v_dd_v",
                    [&](const Value& v) {
                        s.v_dd = each(v, v.list(), [](double x) { return x > 0.0; }, "> 0");
                    }},
               });
}

void parse_optimize(const Section& sec, Config& cfg) {
    auto& o = cfg.optimize;
    apply_entries(sec, {
                   {"bias_min_a", [&](const Value& v) { o.bias_min = v.non_negative(); }},
                   {"bias_max_a", [&](const Value& v) { o.bias_max = v.non_negative(); }},
                   {"il_min", [&](const Value& v) { o.il_min = v.in(0.0, 1.0, true, true); }},
                   {"il_max", [&](const Value& v) { o.il_max = v.in(0.0, 1.0, true, true); }},
                   {"grid_points", [&](const Value& v) { o.grid_points = v.integer(2); }},
                   {"rel_tol", [&](const Value& v) { o.rel_tol = v.positive(); }},
               });
    if (o.bias_max < o.bias_min) fail(sec.line, "[optimize] bias_max_a must be >= bias_min_a");
    if (o.il_max < o.il_min) fail(sec.line, "[optimize] il_max must be >= il_min");
}

double clock_rate(const Config& cfg) {
    if (const auto* p = as_prbs(cfg.modulator_drive)) return p->bit_rate();
    if (const auto* p = as_prbs(cfg.laser_drive)) return p->bit_rate();
    return 0.0;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += shortest(v[i]);
    }
    return out;
}

void write_drive(std::ostringstream& os, const char* section, const Waveform& w) {
    os << "\n[" << section << "]\n";
    os << "kind = " << kind_name(w) << "\n";
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Constant>) {
                os << "level = " << shortest(v.level) << "\n";
            } else if constexpr (std::is_same_v<T, Pulse>) {
                os << "base = " << shortest(v.base) << "\n"
                   << "amplitude = " << shortest(v.amplitude) << "\n"
                   << "t_start_s = " << shortest(v.t_start) << "\n"
                   << "width_s = " << shortest(v.width) << "\n"
                   << "t_rise_s = " << shortest(v.t_rise) << "\n"
                   << "t_fall_s = " << shortest(v.t_fall) << "\n";
            } else if constexpr (std::is_same_v<T, Ramp>) {
                os << "base = " << shortest(v.base) << "\n"
                   << "slope_per_s = " << shortest(v.slope) << "\n"
                   << "t_start_s = " << shortest(v.t_start) << "\n";
            } else if constexpr (std::is_same_v<T, PrbsNrz>) {
                os << "bit_rate_bps = " << shortest(v.bit_rate()) << "\n"
                   << "register_length = " << v.register_length() << "\n"
                   << "seed = " << v.seed() << "\n"
                   << "low = " << shortest(v.low()) << "\n"
                   << "high = " << shortest(v.high()) << "\n"
                   << "t_edge_s = " << shortest(v.t_edge()) << "\n";
            } else {
                os << "times_s = " << join(v.times) << "\n"
                   << "values = " << join(v.values) << "\n";
            }
        },
        w);
}

}  // namespace

SimConfig Config::sim_config() const {
    SimConfig c;
    c.t_end = sim.t_end;
    c.dt = sim.dt.value_or(default_step(laser, clock_rate(*this)));
    c.record_stride = sim.record_stride;
    c.transient_skip = sim.transient_skip.value_or(default_transient_skip(laser));
    c.initial_state = sim.initial;
    c.source = sim.source;
    return c;
}

LinkScenario Config::scenario() const {
    LinkScenario s;
    s.laser = laser;
    s.modulator = modulator;
    s.laser_drive = laser_drive;
    s.mod_drive = modulator_drive;
    s.source = sim.source;
    s.dt = sim.dt;
    s.transient_skip = sim.transient_skip;
    s.initial_state = sim.initial;
    s.n_bits = metrics.n_bits;
    s.samples_per_ui = metrics.samples_per_ui;
    return s;
}

SweepAxes Config::sweep_axes() const {
    SweepAxes a;
    a.bias_current = sweep.bias_current;
    a.il = sweep.il;
    a.bit_rate = sweep.bit_rate;
    a.v_bias = sweep.v_bias;
    a.v_dd = sweep.v_dd;
    a.k = modulator.k;
    return a;
}

Bounds Config::bounds() const {
    Bounds b;
    b.bias_min = optimize.bias_min;
    b.bias_max = optimize.bias_max;
    b.il_min = optimize.il_min;
    b.il_max = optimize.il_max;
    b.v_bias = modulator.v_bias;
    b.v_dd = modulator.v_dd;
    b.k = modulator.k;
    return b;
}

MinimizeOptions Config::minimize_options() const {
    MinimizeOptions o;
    o.grid_points = optimize.grid_points;
    o.rel_tol = optimize.rel_tol;
    return o;
}

Constraints Config::constraints() const { return Constraints{metrics.decision_q}; }

void Config::override_seed(std::uint64_t seed) {
    laser_drive = with_seed(laser_drive, seed);
    modulator_drive = with_seed(modulator_drive, seed);
}

Config parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    Config cfg;
    const auto sections = tokenize(text);
    // [laser] first: other sections validate against its parameters.
    for (const auto& sec : sections) {
        if (sec.name == "laser") parse_laser(sec, cfg);
    }
    for (const auto& sec : sections) {
        if (sec.name == "laser") {
            continue;
        } else if (sec.name == "modulator") {
            parse_modulator(sec, cfg, base_dir);
        } else if (sec.name == "drive.laser") {
            cfg.laser_drive = parse_drive(sec, cfg.laser_drive);
        } else if (sec.name == "drive.modulator") {
            cfg.modulator_drive = parse_drive(sec, cfg.modulator_drive);
        } else if (sec.name == "sim") {
            parse_sim(sec, cfg);
        } else if (sec.name == "metrics") {
            parse_metrics(sec, cfg);
        } else if (sec.name == "sweep") {
            parse_sweep(sec, cfg);
        } else if (sec.name == "optimize") {
            parse_optimize(sec, cfg);
        } else {
            fail(sec.line, "unknown section [" + sec.name + "]");
        }
    }

    int sim_line = 0;
    for (const auto& sec : sections) {
        if (sec.name == "sim") sim_line = sec.line;
    }
    if (cfg.sim.dt && *cfg.sim.dt > max_step(cfg.laser) * (1.0 + 1e-12)) {
        fail(sim_line, "dt_s must not exceed tau_p_s/10 (" + shortest(max_step(cfg.laser)) + ")");
    }
    const SimConfig resolved = cfg.sim_config();
    if (!(resolved.transient_skip < resolved.t_end)) {
        fail(sim_line, "transient_skip_s (" + shortest(resolved.transient_skip) + ") must be below t_end_s (" +
                           shortest(resolved.t_end) + ")");
    }
    if (resolved.t_end / resolved.dt > 1e9) fail(sim_line, "t_end_s/dt_s exceeds the 1e9 step guard");
    return cfg;
}

Config load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str(), file.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

std::string to_ini(const Config& cfg) {
    std::ostringstream os;
    const auto& p = cfg.laser;
    os << "[laser]\n"
       << "volume_m3 = " << shortest(p.volume) << "\n"
       << "g0_m3_per_s = " << shortest(p.g0) << "\n"
       << "n0_per_m3 = " << shortest(p.n0) << "\n"
       << "eps_m3 = " << shortest(p.eps) << "\n"
       << "tau_n_s = " << shortest(p.tau_n) << "\n"
       << "tau_p_s = " << shortest(p.tau_p) << "\n"
       << "gamma = " << shortest(p.gamma) << "\n"
       << "beta = " << shortest(p.beta) << "\n"
       << "alpha = " << shortest(p.alpha) << "\n"
       << "eta_sp = " << shortest(p.eta_sp) << "\n"
       << "lambda_nm = " << shortest(cfg.lambda_nm) << "\n"
       << "v_drop_v = " << shortest(p.drop_voltage) << "\n";

    const auto& m = cfg.modulator;
    os << "\n[modulator]\n"
       << "table_v = " << join(m.absorption.voltage) << "\n"
       << "table_alpha_per_m = " << join(m.absorption.alpha) << "\n"
       << "length_m = " << shortest(m.absorption.length) << "\n"
       << "k_ratio = " << shortest(m.k) << "\n"
       << "responsivity_a_per_w = " << shortest(m.responsivity) << "\n"
       << "v_bias_v = " << shortest(m.v_bias) << "\n"
       << "v_dd_v = " << shortest(m.v_dd) << "\n"
       << "c_mod_f = " << shortest(m.c_mod) << "\n"
       << "p_in_w = " << shortest(m.p_in) << "\n"
       << "activity = " << shortest(m.activity) << "\n";

    write_drive(os, "drive.laser", cfg.laser_drive);
    write_drive(os, "drive.modulator", cfg.modulator_drive);

    const auto& s = cfg.sim;
    os << "\n[sim]\n"
       << "t_end_s = " << shortest(s.t_end) << "\n"
       << "dt_s = " << (s.dt ? shortest(*s.dt) : std::string("auto")) << "\n"
       << "record_stride = " << s.record_stride << "\n"
       << "transient_skip_s = " << (s.transient_skip ? shortest(*s.transient_skip) : std::string("auto")) << "\n"
       << "initial_n_m3 = " << shortest(s.initial.n) << "\n"
       << "initial_s_m3 = " << shortest(s.initial.s) << "\n"
       << "initial_phase_rad = " << shortest(s.initial.phi) << "\n"
       << "source = " << (s.source == Source::laser ? "laser" : "constant_master") << "\n";

    os << "\n[metrics]\n"
       << "decision_q = " << shortest(cfg.metrics.decision_q) << "\n"
       << "n_bits = " << cfg.metrics.n_bits << "\n"
       << "samples_per_ui = " << cfg.metrics.samples_per_ui << "\n";

    os << "\n[sweep]\n"
       << "bias_current_a = " << join(cfg.sweep.bias_current) << "\n"
       << "il = " << join(cfg.sweep.il) << "\n"
       << "bit_rate_bps = " << join(cfg.sweep.bit_rate) << "\n"
       << "v_bias_v = " << join(cfg.sweep.v_bias) << "\n"
       << "v_dd_v = " << join(cfg.sweep.v_dd) << "\n";

    const auto& o = cfg.optimize;
    os << "\n[optimize]\n"
       << "bias_min_a = " << shortest(o.bias_min) << "\n"
       << "bias_max_a = " << shortest(o.bias_max) << "\n"
       << "il_min = " << shortest(o.il_min) << "\n"
       << "il_max = " << shortest(o.il_max) << "\n"
       << "grid_points = " << o.grid_points << "\n"
       << "rel_tol = " << shortest(o.rel_tol) << "\n";
    return os.str();
}

std::string echo_config(const Config& cfg) {
    const std::string ini = to_ini(cfg);
    std::string out;
    std::size_t pos = 0;
    while (pos < ini.size()) {
        const auto eol = ini.find('\n', pos);
        const auto line = std::string_view(ini).substr(pos, eol - pos);
        out += line.empty() ? "#\n" : "# " + std::string(line) + "\n";
        pos = eol + 1;
    }
    return out;
}

Config config_from_echo(std::string_view text) {
    std::string ini;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto eol = text.find('\n', pos);
        const auto line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        if (line.empty() || line.front() != '#') break;
        ini += line.size() >= 2 && line[1] == ' ' ? line.substr(2) : line.substr(1);
        ini += '\n';
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return parse_config(ini);
}

AbsorptionModel read_absorption_csv(std::string_view text, double length) {
    AbsorptionModel m;
    m.length = length;
    bool header = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const auto line = trim(text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos));
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto cells = detail::split(line, ',');
        if (!header) {
            if (cells.size() != 2 || cells[0] != "voltage_v" || cells[1] != "alpha_per_m") {
                fail(line_no, "absorption CSV must start with the header 'voltage_v,alpha_per_m'");
            }
            header = true;
            continue;
        }
        if (cells.size() != 2) fail(line_no, "absorption CSV rows need exactly two columns");
        const auto v = parse_double(cells[0]);
        const auto a = parse_double(cells[1]);
        if (!v || !a) fail(line_no, "absorption CSV values must be finite numbers");
        m.voltage.push_back(*v);
        m.alpha.push_back(*a);
    }
    if (!header) throw ConfigError("absorption CSV has no header row");
    m.validate();
    return m;
}

AbsorptionModel load_absorption_csv(const std::filesystem::path& file, double length) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open absorption table " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_absorption_csv(ss.str(), length);
}

}  // namespace mqwlink
