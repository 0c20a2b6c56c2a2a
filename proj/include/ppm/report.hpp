#pragma once

#include "ppm/bounds.hpp"
#include "ppm/simulation.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <string_view>

namespace ppm {

enum class OutputFormat
{
  Csv,
  Json
};

OutputFormat parse_format(std::string_view name);

/// Column order of the summary table.
inline constexpr std::string_view kSummaryColumns =
    "n,mechanism,trials,sw_pp_mean,sw_pp_se,sw_opt_mean,sw_opt_se,ratio,ratio_se,revenue_mean";

/// %.10g, the number format of every emitted artifact.
std::string format_number(double value);

/// Rounds every floating-point number in `doc` to 10 significant digits.
nlohmann::json round_numbers(nlohmann::json doc);

std::string summaries_csv(std::span<SimulationSummary const> rows);
nlohmann::json summaries_json(std::span<SimulationSummary const> rows);

/// CSV columns: claim, parameter, points, max_violation, passed.
std::string bound_reports_csv(std::span<BoundReport const> reports);
nlohmann::json bound_reports_json(std::span<BoundReport const> reports);

std::string render(std::span<SimulationSummary const> rows, OutputFormat format);
std::string render(std::span<BoundReport const> reports, OutputFormat format);

/// Writes `text` to `path`, or to stdout when path is empty or "-".
/// Throws IoError when the file cannot be written.
void emit_report(std::string const &text, std::string const &path);

}  // namespace ppm
