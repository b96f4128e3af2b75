#include <clocale>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "mqwlink/config.hpp"
#include "mqwlink/error.hpp"
#include "mqwlink/io.hpp"

using namespace mqwlink;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> v;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
    return v;
}

// Short pulse response used for the golden file.
Trace golden_trace() {
    const LaserParams p;
    SimConfig cfg;
    cfg.dt = max_step(p);
    cfg.t_end = 12e-9;
    cfg.transient_skip = 9e-9;
    cfg.record_stride = 100;
    return run_link(p, ModulatorParams{}, Pulse{1e-3, 2e-3, 10e-9, 1e-9, 50e-12, 50e-12},
                    Constant{0.5}, cfg);
}

}  // namespace

TEST_CASE("trace CSV layout") {
    Trace t;
    t.t0 = 1e-9;
    t.dt_sample = 1e-12;
    t.carrier_density = {1e24, 1.1e24, 1.2e24};
    t.photon_density = {1e20, 2e20, 3e20};
    t.phase = {0.0, 0.1, 0.2};
    t.laser_power = {1e-4, 2e-4, 3e-4};
    t.modulator_drive = {0.5, 0.5, 0.5};
    t.output_power = {5e-5, 1e-4, 1.5e-4};
    const std::string csv = format_trace_csv(t, "# a\n# b\n");
    CHECK(csv.find('\r') == std::string::npos);
    const auto lines = lines_of(csv);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "# a");
    CHECK(lines[2] == kTraceHeader);
    const auto row = parse_row(lines[4]);
    REQUIRE(row.size() == 7);
    CHECK(row[0] == t.time(1));
    CHECK(row[1] == 1.1e24);
    CHECK(row[3] == 0.1);
    CHECK(row[6] == 1e-4);
}

TEST_CASE("numbers round trip exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mantissa(rng), exponent(rng));
        const std::string s = format_number(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_number(0.1) == "1.0000000000000001e-01");
    CHECK(format_number(-2.5) == "-2.5000000000000000e+00");

    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") || std::setlocale(LC_NUMERIC, "fr_FR.UTF-8")) {
        CHECK(format_number(1.5).find('.') != std::string::npos);
        std::setlocale(LC_NUMERIC, "C");
    }
}

TEST_CASE("trace written to disk parses back bit-exactly") {
    const auto trace = golden_trace();
    const auto dir = std::filesystem::temp_directory_path() / "mqwlink_test_io";
    std::filesystem::create_directories(dir);
    const auto path = dir / "trace.csv";
    const auto bytes = write_trace_csv(trace, path, echo_config(Config{}));
    CHECK(bytes == std::filesystem::file_size(path));

    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto lines = lines_of(buf.str());
    std::size_t i = 0;
    while (lines[i][0] == '#') ++i;
    CHECK(lines[i] == kTraceHeader);
    CHECK(lines.size() - i - 1 == trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto row = parse_row(lines[i + 1 + k]);
        CHECK(row[1] == trace.carrier_density[k]);
        CHECK(row[2] == trace.photon_density[k]);
        CHECK(row[4] == trace.laser_power[k]);
        CHECK(row[6] == trace.output_power[k]);
    }
    CHECK(config_from_echo(buf.str()) == Config{});
    CHECK_THROWS_AS(write_text(dir / "no_such_dir" / "x.csv", "x"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("golden pulse trace") {
    const auto golden = std::filesystem::path(MQWLINK_GOLDEN_DIR) / "pulse_trace.csv";
    if (std::getenv("MQWLINK_UPDATE_GOLDEN")) write_text(golden, format_trace_csv(golden_trace(), ""));
    std::ifstream in(golden, std::ios::binary);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(format_trace_csv(golden_trace(), "") == buf.str());
}

TEST_CASE("eye and sweep CSV") {
    EyeAccumulation eye;
    eye.bit_rate = 1e9;
    eye.samples = {{0.5, 1e-3, 0}, {1.5, 2e-3, 1}};
    EyeMetrics m;
    m.q_factor = 12.0;
    m.error_free = true;
    const auto csv = format_eye_csv(eye, m, "");
    const auto lines = lines_of(csv);
    CHECK(lines[0] == kEyeHeader);
    CHECK(lines[1] == "5.0000000000000000e-01,1.0000000000000000e-03");
    CHECK(csv.find("# q_factor = 1.2000000000000000e+01") != std::string::npos);
    CHECK(csv.find("# error_free = true") != std::string::npos);

    SweepResult r;
    r.feasibility_rule = "q_factor>=7.03";
    r.points.push_back({make_operating_point(1e-3, 0.2, 4.0, 4e9, 1.5, 1.0), std::nullopt, "boom", false});
    const auto s = format_sweep_csv(r, "");
    CHECK(s.find("# best: none") != std::string::npos);
    CHECK(s.find(",boom\n") != std::string::npos);
    CHECK(s.find("# feasibility_rule = q_factor>=7.03") != std::string::npos);

    const auto b = format_bitrate_csv({1e9, 2e9}, {m, EyeMetrics{}}, 1e9, "");
    CHECK(b.find("# max_error_free_bitrate_bps = 1.0000000000000000e+09") != std::string::npos);
    CHECK(format_bitrate_csv({1e9}, {EyeMetrics{}}, std::nullopt, "").find("= none") != std::string::npos);
}

TEST_CASE("gnuplot scripts") {
    const auto photon = emit_gnuplot("run.csv", PlotKind::photon_density);
    CHECK(photon.find("'run.csv' using 1:3") != std::string::npos);
    CHECK(photon.find("set output 'run.png'") != std::string::npos);
    CHECK(photon.find("set datafile separator ','") != std::string::npos);

    const auto power = emit_gnuplot("run.csv", "output_power");
    CHECK(power.find("using 1:5") != std::string::npos);
    CHECK(power.find("using 1:7") != std::string::npos);

    const auto eye = emit_gnuplot("eye.csv", PlotKind::eye);
    CHECK(eye.find("using 1:2 with dots") != std::string::npos);

    const auto curve = emit_gnuplot("opt.csv", PlotKind::min_power_curve);
    CHECK(curve.find("using 1:8") != std::string::npos);

    CHECK_THROWS_AS(parse_plot_kind("histogram"), ConfigError);
    for (auto k : {PlotKind::photon_density, PlotKind::output_power, PlotKind::eye, PlotKind::min_power_curve}) {
        CHECK(parse_plot_kind(plot_kind_name(k)) == k);
    }
}
