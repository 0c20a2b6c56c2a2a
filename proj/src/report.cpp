#include "ppm/report.hpp"

#include "ppm/error.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace ppm {

OutputFormat parse_format(std::string_view name)
{
  if (name == "csv")
  {
    return OutputFormat::Csv;
  }
  if (name == "json")
  {
    return OutputFormat::Json;
  }
  throw ConfigError("unknown format '" + std::string(name) + "' (valid: csv, json)");
}

std::string format_number(double value)
{
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.10g", value);
  return buffer;
}

nlohmann::json round_numbers(nlohmann::json doc)
{
  if (doc.is_number_float())
  {
    double const v = doc.get<double>();
    if (!std::isfinite(v))
    {
      return format_number(v);
    }
    return std::stod(format_number(v));
  }
  if (doc.is_structured())
  {
    for (auto &item : doc)
    {
      item = round_numbers(std::move(item));
    }
  }
  return doc;
}

std::string summaries_csv(std::span<SimulationSummary const> rows)
{
  std::string out(kSummaryColumns);
  out += '\n';
  for (auto const &s : rows)
  {
    out += std::to_string(s.n) + ',' + s.mechanism + ',' + std::to_string(s.trials);
    for (double v : {s.sw_pp_mean, s.sw_pp_se, s.sw_opt_mean, s.sw_opt_se, s.ratio, s.ratio_se, s.revenue_mean})
    {
      out += ',' + format_number(v);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json summaries_json(std::span<SimulationSummary const> rows)
{
  nlohmann::json doc = nlohmann::json::array();
  for (auto const &s : rows)
  {
    doc.push_back(s);
  }
  return round_numbers(std::move(doc));
}

std::string bound_reports_csv(std::span<BoundReport const> reports)
{
  std::string out = "claim,parameter,points,max_violation,passed\n";
  for (auto const &r : reports)
  {
    out += r.claim + ',' + r.parameter + ',' + std::to_string(r.grid.size()) + ',' + format_number(r.max_violation) +
           ',' + (r.passed ? "true" : "false") + '\n';
  }
  return out;
}

nlohmann::json bound_reports_json(std::span<BoundReport const> reports)
{
  nlohmann::json doc = nlohmann::json::array();
  for (auto const &r : reports)
  {
    doc.push_back(r);
  }
  return round_numbers(std::move(doc));
}

std::string render(std::span<SimulationSummary const> rows, OutputFormat format)
{
  return format == OutputFormat::Csv ? summaries_csv(rows) : summaries_json(rows).dump(2) + '\n';
}

std::string render(std::span<BoundReport const> reports, OutputFormat format)
{
  return format == OutputFormat::Csv ? bound_reports_csv(reports) : bound_reports_json(reports).dump(2) + '\n';
}

void emit_report(std::string const &text, std::string const &path)
{
  if (path.empty() || path == "-")
  {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file)
  {
    throw IoError("cannot open '" + path + "' for writing");
  }
  file << text;
  file.flush();
  if (!file)
  {
    throw IoError("failed writing '" + path + "'");
  }
}

}  // namespace ppm
