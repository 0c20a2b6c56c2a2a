#pragma once

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppm {

/// Pointwise check of an inequality lhs <= rhs over a parameter grid.
struct BoundReport
{
  std::string claim;
  std::string parameter;      // name of the grid variable
  std::vector<double> grid;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double slack         = 0.0;
  double max_violation = 0.0;  // max(lhs - rhs), possibly negative
  bool passed          = true;
  std::string note;

  void add(double x, double left, double right);
  std::size_t violations() const;
};

void to_json(nlohmann::json &out, BoundReport const &report);

/// Single-item welfare of the static price p against n Exp(1) buyers:
/// (p + 1)(1 - (1 - e^-p)^n).
double exp_static_welfare(std::int64_t n, double p);

struct StaticOptimum
{
  double price;
  double welfare;
  double gap;  // H_n - welfare
};

/// Best static price for n Exp(1) buyers: golden-section search on each case
/// interval of the optimality analysis and on a grid-bracketed peak.
StaticOptimum exp_static_best(std::int64_t n);

/// Case intervals for static prices against Exp(1) buyers.
struct StaticCases
{
  double case1_end;  // ln n - (1/2) ln ln ln n
  double case2_end;  // H_n - 1
};
StaticCases exp_static_cases(std::int64_t n);
/// The welfare bound of each case: p + 1, H_n (1 - ln ln ln n / (2 ln n)) and (99/100) H_n + 1.
double exp_static_case_bound(int which, std::int64_t n, double p);

/// Checks that each case bound dominates exp_static_welfare on its interval
/// (empty intervals are reported in the note).
BoundReport exp_static_case_check(std::int64_t n, int grid_points = 2001);

/// Runs p <- p + e^-p from p = 0 and checks the value after k steps is at
/// most H_k - 1/8 for 2 <= k <= n_max.
BoundReport mdp_bound_check(std::int64_t n_max);

enum class TrendModel
{
  OneOverLog,        // g(n) = 1 / ln n
  LogLogLogOverLog,  // g(n) = ln ln ln n / ln n
};

TrendModel parse_trend_model(std::string_view name);
double trend_basis(TrendModel model, double n);

struct TrendFit
{
  double c;
  double r_squared;
  std::vector<double> residuals;  // (1 - ratio) - c g(n)
};

/// Least squares for 1 - ratio = c g(n) through the origin. R^2 is taken
/// about the mean of 1 - ratio; a constant response fitted exactly counts as 1.
TrendFit ratio_trend_fit(std::span<double const> ns, std::span<double const> ratios, TrendModel model);

}  // namespace ppm
