#pragma once

#include "ppm/market.hpp"
#include "ppm/mechanism.hpp"
#include "ppm/oracle.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppm {

/// One simulated market.
struct TrialOutcome
{
  std::uint64_t trial = 0;
  double welfare      = 0.0;  // SW_pp
  double revenue      = 0.0;
  double utility      = 0.0;
  double optimum      = 0.0;  // SW_opt on the same profile
  std::vector<Index> item_of_step;  // item leaving the market at each step, -1 if none
  std::vector<bool> sold;           // per market item
};

struct RunOptions
{
  OracleKind oracle      = OracleKind::Auto;
  bool track_allocations = false;  // fill SimulationSummary::allocation_counts
  bool keep_trials       = false;  // fill SimulationSummary::outcomes
  unsigned workers       = 0;      // 0: worker_count()
};

struct SimulationSummary
{
  std::string mechanism;
  std::string model;
  Index n                = 0;
  std::int64_t trials    = 0;
  std::uint64_t seed     = 0;
  double sw_pp_mean      = 0.0;
  double sw_pp_se        = 0.0;
  double revenue_mean    = 0.0;
  double revenue_se      = 0.0;
  double utility_mean    = 0.0;
  double sw_opt_mean     = 0.0;
  double sw_opt_se       = 0.0;
  double ratio           = 0.0;  // E[SW_pp] / E[SW_opt]
  double ratio_se        = 0.0;  // delta method on the paired means
  Eigen::VectorXd sale_frequency;            // per market item
  std::int64_t trials_all_sold       = 0;    // every real item sold
  std::int64_t trials_one_per_step   = 0;    // one item left the market at every step while items remained
  std::int64_t trials_above_optimum  = 0;    // SW_pp > SW_opt beyond rounding
  double max_accounting_error        = 0.0;  // max |SW_pp - revenue - utility|
  std::optional<Eigen::MatrixXi> allocation_counts;  // (step, item): bought by buyer i, or withdrawn at step i
  std::vector<TrialOutcome> outcomes;
};

void to_json(nlohmann::json &out, SimulationSummary const &summary);

/// Simulates `trials` markets. Trial t samples its profile from
/// stream(seed, t, 0) and feeds stream(seed, t, 1) to the mechanism, so
/// mechanisms run on the same seed see the same buyers. Results do not
/// depend on the worker count. Throws ConfigError when the mechanism was not
/// built for `model`.
SimulationSummary run_trials(ValuationModel const &model, Mechanism const &mechanism, std::int64_t trials,
                             std::uint64_t seed, RunOptions const &options = {});

using ModelFamily      = std::function<ValuationModel(Index n)>;
using MechanismFactory = std::function<std::shared_ptr<Mechanism const>(ValuationModel const &, Index n)>;

/// One run_trials row per n, each with the same master seed.
std::vector<SimulationSummary> sweep(ModelFamily const &family, MechanismFactory const &factory,
                                     std::span<Index const> ns, std::int64_t trials, std::uint64_t seed,
                                     RunOptions const &options = {});

struct AllocationAudit
{
  Eigen::MatrixXd frequency;  // (step, item)
  Eigen::MatrixXd z;          // (frequency - 1/n) / se
  double target      = 0.0;
  double max_abs_z   = 0.0;
  double chi_square  = 0.0;   // sum of z^2
  Index flagged      = 0;     // cells beyond the threshold
  double threshold   = 4.0;
  bool passed() const noexcept { return flagged == 0; }
};

/// Compares every (step, item) allocation frequency with 1/n.
AllocationAudit allocation_frequency_audit(SimulationSummary const &summary, double threshold = 4.0);

}  // namespace ppm
