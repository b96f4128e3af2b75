#include "mqwlink/io.hpp"

#include <fstream>
#include <map>

#include "text.hpp"

namespace mqwlink {

namespace {

void append_row(std::string& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        out += format_number(v);
        first = false;
    }
    out += '\n';
}

std::string cell_text(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return out;
}

std::string quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += '\'';
        out += c;
    }
    return out + "'";
}

}  // namespace

std::string format_number(double v) { return detail::sci17(v); }

std::string format_trace_csv(const Trace& trace, std::string_view preamble) {
    std::string out(preamble);
    out.reserve(out.size() + 170 * (trace.size() + 1));
    out += kTraceHeader;
    out += '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        append_row(out, {trace.time(i), trace.carrier_density[i], trace.photon_density[i], trace.phase[i],
                         trace.laser_power[i], trace.modulator_drive[i], trace.output_power[i]});
    }
    return out;
}

std::string format_eye_csv(const EyeAccumulation& eye, const EyeMetrics& m, std::string_view preamble) {
    std::string out(preamble);
    out += kEyeHeader;
    out += '\n';
    for (const auto& s : eye.samples) append_row(out, {s.ui, s.power});
    auto line = [&](const char* key, double v) { out += std::string("# ") + key + " = " + format_number(v) + "\n"; };
    out += "# eye metrics\n";
    line("bit_rate_bps", eye.bit_rate);
    line("eye_height_w", m.eye_height);
    line("eye_width_s", m.eye_width);
    line("level_one_mean_w", m.level_one_mean);
    line("level_zero_mean_w", m.level_zero_mean);
    line("level_one_std_w", m.level_one_std);
    line("level_zero_std_w", m.level_zero_std);
    line("q_factor", m.q_factor);
    line("extinction_ratio", m.extinction_ratio);
    line("ber_estimate", m.ber_estimate);
    out += std::string("# error_free = ") + (m.error_free ? "true" : "false") + "\n";
    return out;
}

std::string format_sweep_csv(const SweepResult& result, std::string_view preamble) {
    std::string out(preamble);
    out +=
        "index,bias_current_a,il,cr,bit_rate_bps,v_bias_v,v_dd_v,feasible,static_power_w,dynamic_power_w,"
        "laser_wall_power_w,total_power_w,eta_mod,non_physical,eye_height_w,eye_width_s,q_factor,ber_estimate,"
        "extinction_ratio,error\n";
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const auto& sp = result.points[i];
        const auto& p = sp.point;
        out += std::to_string(i) + ',';
        for (double v : {p.bias_current, p.il, p.cr, p.bit_rate, p.v_bias, p.v_dd}) out += format_number(v) + ',';
        out += sp.feasible ? "1," : "0,";
        if (sp.evaluation) {
            const auto& pw = sp.evaluation->power;
            const auto& eye = sp.evaluation->eye;
            for (double v : {pw.static_power, pw.dynamic_power, pw.laser_wall_power, pw.total, pw.eta_mod}) {
                out += format_number(v) + ',';
            }
            out += pw.non_physical ? "1," : "0,";
            for (double v : {eye.eye_height, eye.eye_width, eye.q_factor, eye.ber_estimate, eye.extinction_ratio}) {
                out += format_number(v) + ',';
            }
        } else {
            out += ",,,,,,,,,,,";
        }
        out += cell_text(sp.error) + '\n';
    }

    out += "# feasibility_rule = " + std::string(result.feasibility_rule) + "\n";
    // Largest eye opening reached at each bias current over the remaining axes.
    std::map<double, double> eye_by_bias;
    for (const auto& sp : result.points) {
        if (!sp.evaluation) continue;
        auto [it, inserted] = eye_by_bias.emplace(sp.point.bias_current, sp.evaluation->eye.eye_height);
        if (!inserted) it->second = std::max(it->second, sp.evaluation->eye.eye_height);
    }
    out += "# eye_height_vs_bias: bias_current_a,max_eye_height_w\n";
    for (const auto& [bias, height] : eye_by_bias) {
        out += "# " + format_number(bias) + ',' + format_number(height) + '\n';
    }
    if (result.best) {
        const auto& sp = result.points[*result.best];
        out += "# best: index=" + std::to_string(*result.best) + " bias_current_a=" +
               format_number(sp.point.bias_current) + " il=" + format_number(sp.point.il) +
               " bit_rate_bps=" + format_number(sp.point.bit_rate) +
               " total_power_w=" + format_number(sp.evaluation->power.total) + "\n";
    } else {
        out += "# best: none\n";
    }
    return out;
}

std::string format_min_power_csv(const std::vector<RatePower>& rows, std::string_view preamble) {
    std::string out(preamble);
    out +=
        "bit_rate_bps,status,bias_current_a,il,cr,v_bias_v,v_dd_v,total_power_w,static_power_w,"
        "dynamic_power_w,laser_wall_power_w,eta_mod,input_power_w,q_factor,eye_height_w,ber_estimate\n";
    for (const auto& row : rows) {
        out += format_number(row.bit_rate);
        if (!row.result) {
            out += ",infeasible,,,,,,,,,,,,,,\n";
            continue;
        }
        const auto& p = row.result->point;
        const auto& pw = row.result->evaluation.power;
        const auto& eye = row.result->evaluation.eye;
        out += ",ok";
        for (double v : {p.bias_current, p.il, p.cr, p.v_bias, p.v_dd, pw.total, pw.static_power, pw.dynamic_power,
                         pw.laser_wall_power, pw.eta_mod, pw.input_power, eye.q_factor, eye.eye_height,
                         eye.ber_estimate}) {
            out += ',' + format_number(v);
        }
        out += '\n';
    }
    for (const auto& row : rows) {
        if (!row.result) out += "# " + format_number(row.bit_rate) + ": " + cell_text(row.error) + "\n";
    }
    return out;
}

std::string format_bitrate_csv(const std::vector<double>& rates, const std::vector<EyeMetrics>& eyes,
                               std::optional<double> max_rate, std::string_view preamble) {
    std::string out(preamble);
    out += "bit_rate_bps,q_factor,eye_height_w,eye_width_s,extinction_ratio,ber_estimate,error_free\n";
    for (std::size_t i = 0; i < rates.size() && i < eyes.size(); ++i) {
        const auto& e = eyes[i];
        for (double v : {rates[i], e.q_factor, e.eye_height, e.eye_width, e.extinction_ratio, e.ber_estimate}) {
            out += format_number(v) + ',';
        }
        out += e.error_free ? "1\n" : "0\n";
    }
    out += "# max_error_free_bitrate_bps = " + (max_rate ? format_number(*max_rate) : std::string("none")) + "\n";
    return out;
}

std::size_t write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
    return text.size();
}

std::size_t write_trace_csv(const Trace& trace, const std::filesystem::path& path, std::string_view preamble) {
    return write_text(path, format_trace_csv(trace, preamble));
}

PlotKind parse_plot_kind(std::string_view name) {
    if (name == "photon_density") return PlotKind::photon_density;
    if (name == "output_power") return PlotKind::output_power;
    if (name == "eye") return PlotKind::eye;
    if (name == "min_power_curve") return PlotKind::min_power_curve;
    throw ConfigError("unknown plot kind '" + std::string(name) +
                      "' (expected photon_density, output_power, eye or min_power_curve)");
}

std::string_view plot_kind_name(PlotKind kind) {
    switch (kind) {
        case PlotKind::photon_density: return "photon_density";
        case PlotKind::output_power: return "output_power";
        case PlotKind::eye: return "eye";
        case PlotKind::min_power_curve: return "min_power_curve";
    }
    return "";
}

std::string emit_gnuplot(std::string_view csv_path, PlotKind kind) {
    std::string png(csv_path);
    if (const auto dot = png.rfind('.'); dot != std::string::npos && png.find('/', dot) == std::string::npos) {
        png.resize(dot);
    }
    png += ".png";

    std::string s;
    s += "# gnuplot script (" + std::string(plot_kind_name(kind)) + ")\n";
    s += "set datafile separator ','\n";
    s += "set datafile commentschars '#'\n";
    s += "set key autotitle columnheader\n";
    s += "set terminal pngcairo size 1000,600\n";
    s += "set output " + quote(png) + "\n";
    s += "set grid\n";
    const std::string data = quote(csv_path);
    switch (kind) {
        case PlotKind::photon_density:
            s += "set xlabel 'time (s)'\nset ylabel 'photon density (m^-3)'\n";
            s += "plot " + data + " using 1:3 with lines\n";
            break;
        case PlotKind::output_power:
            s += "set xlabel 'time (s)'\nset ylabel 'optical power (W)'\n";
            s += "plot " + data + " using 1:5 with lines, " + data + " using 1:7 with lines\n";
            break;
        case PlotKind::eye:
            s += "set xlabel 'time (UI)'\nset ylabel 'optical power (W)'\nset xrange [0:2]\n";
            s += "plot " + data + " using 1:2 with dots\n";
            break;
        case PlotKind::min_power_curve:
            s += "set xlabel 'bit rate (bit/s)'\nset ylabel 'minimum total power (W)'\n";
            s += "plot " + data + " using 1:8 with linespoints\n";
            break;
    }
    return s;
}

std::string emit_gnuplot(std::string_view csv_path, std::string_view kind) {
    return emit_gnuplot(csv_path, parse_plot_kind(kind));
}

}  // namespace mqwlink
