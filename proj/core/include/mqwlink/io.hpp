#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mqwlink/error.hpp"
#include "mqwlink/metrics.hpp"
#include "mqwlink/optimizer.hpp"
#include "mqwlink/sim.hpp"

namespace mqwlink {

/// Output destination could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

inline constexpr std::string_view kTraceHeader =
    "time_s,carrier_density_m3,photon_density_m3,phase_rad,laser_power_w,mod_drive_v,output_power_w";
inline constexpr std::string_view kEyeHeader = "ui_fraction,power_w";

/// 17 significant digits, scientific, locale independent.
std::string format_number(double v);

// Every formatter starts with `preamble` (normally echo_config output) verbatim and
// uses LF line endings.

std::string format_trace_csv(const Trace& trace, std::string_view preamble);

/// Eye samples followed by a trailing comment block with the metrics.
std::string format_eye_csv(const EyeAccumulation& eye, const EyeMetrics& metrics, std::string_view preamble);

/// One row per grid point, then footer comments: the feasibility rule, eye height
/// against bias current, and `# best:`.
std::string format_sweep_csv(const SweepResult& result, std::string_view preamble);

/// One row per rate; infeasible rates are kept as sentinel rows (status column, empty fields).
std::string format_min_power_csv(const std::vector<RatePower>& rows, std::string_view preamble);

/// Eye figures per rate with the largest error-free rate in the footer.
std::string format_bitrate_csv(const std::vector<double>& rates, const std::vector<EyeMetrics>& eyes,
                               std::optional<double> max_rate, std::string_view preamble);

/// Writes `text` to `path` (truncating); returns the byte count. Throws IoError.
std::size_t write_text(const std::filesystem::path& path, std::string_view text);

/// format_trace_csv + write_text.
std::size_t write_trace_csv(const Trace& trace, const std::filesystem::path& path, std::string_view preamble);

enum class PlotKind { photon_density, output_power, eye, min_power_curve };

/// Throws ConfigError for names other than photon_density, output_power, eye, min_power_curve.
PlotKind parse_plot_kind(std::string_view name);
std::string_view plot_kind_name(PlotKind kind);

/// Self-contained gnuplot script plotting the CSV at `csv_path` (used verbatim, so pass
/// a path relative to where the script will live). Renders to a PNG beside the CSV.
std::string emit_gnuplot(std::string_view csv_path, PlotKind kind);
std::string emit_gnuplot(std::string_view csv_path, std::string_view kind);

}  // namespace mqwlink
