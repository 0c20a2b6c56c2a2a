#pragma once

#include "ppm/market.hpp"
#include "ppm/report.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppm {

/// Bad command line or config file; the CLI exits with status 2.
class UsageError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

enum class Command
{
  Simulate,
  Sweep,
  Bounds,
  Verify
};

struct RunConfig
{
  Command command = Command::Simulate;
  std::string model;
  std::string mechanism;
  std::vector<Index> ns;
  std::int64_t trials = 10000;
  std::uint64_t seed  = 1;
  std::string output;  // empty: stdout
  OutputFormat format = OutputFormat::Csv;
  std::string oracle  = "auto";
  std::optional<double> price;  // static-p only
  // bounds
  std::string claim;
  std::int64_t nmax = 100000;
  // verify
  std::vector<std::string> claims;
  double trial_scale = 1.0;
};

/// Parses `ppm-lab <command> [flags]`. A `--config FILE` holds flat
/// `key = value` lines under a `[command]` section header; flags given on
/// the command line win over the file. Unknown keys, unknown ids and
/// contradictory flags raise UsageError. `--help` output goes to stdout and
/// returns nullopt.
std::optional<RunConfig> parse_config(int argc, char const *const *argv);

}  // namespace ppm
