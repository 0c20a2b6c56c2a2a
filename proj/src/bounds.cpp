#include "ppm/bounds.hpp"

#include "ppm/error.hpp"
#include "ppm/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace ppm {

void BoundReport::add(double x, double left, double right)
{
  grid.push_back(x);
  lhs.push_back(left);
  rhs.push_back(right);
  double const excess = left - right;
  max_violation       = grid.size() == 1 ? excess : std::max(max_violation, excess);
  passed              = passed && excess <= slack;
}

std::size_t BoundReport::violations() const
{
  std::size_t count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
  {
    count += lhs[i] - rhs[i] > slack ? 1 : 0;
  }
  return count;
}

void to_json(nlohmann::json &out, BoundReport const &report)
{
  out = nlohmann::json{{"claim", report.claim},
                       {"parameter", report.parameter},
                       {"points", report.grid.size()},
                       {"slack", report.slack},
                       {"max_violation", report.max_violation},
                       {"passed", report.passed}};
  // Long grids are summarised by their range.
  if (report.grid.size() <= 1000)
  {
    out["grid"] = report.grid;
    out["lhs"]  = report.lhs;
    out["rhs"]  = report.rhs;
  }
  else if (!report.grid.empty())
  {
    out["grid"] = {{"from", report.grid.front()}, {"to", report.grid.back()}};
  }
  nlohmann::json bad = nlohmann::json::array();
  for (std::size_t i = 0; i < report.grid.size(); ++i)
  {
    if (report.lhs[i] - report.rhs[i] > report.slack)
    {
      bad.push_back({{report.parameter, report.grid[i]}, {"lhs", report.lhs[i]}, {"rhs", report.rhs[i]}});
    }
  }
  out["violations"] = bad;
  if (!report.note.empty())
  {
    out["note"] = report.note;
  }
}

double exp_static_welfare(std::int64_t n, double p)
{
  if (n < 1 || !(p >= 0.0))
  {
    throw DomainError("exp_static_welfare: need n >= 1 and p >= 0");
  }
  if (std::isinf(p))
  {
    return 0.0;
  }
  // 1 - (1 - e^-p)^n without cancellation for large p.
  double const sold = -std::expm1(static_cast<double>(n) * std::log1p(-std::exp(-p)));
  return (p + 1.0) * sold;
}

StaticCases exp_static_cases(std::int64_t n)
{
  double const ln = std::log(static_cast<double>(n));
  return {ln - 0.5 * std::log(std::log(ln)), harmonic(n) - 1.0};
}

double exp_static_case_bound(int which, std::int64_t n, double p)
{
  double const ln = std::log(static_cast<double>(n));
  switch (which)
  {
  case 1: return p + 1.0;
  case 2: return harmonic(n) * (1.0 - std::log(std::log(ln)) / (2.0 * ln));
  case 3: return 0.99 * harmonic(n) + 1.0;
  default: throw DomainError("exp_static_case_bound: case must be 1, 2 or 3");
  }
}

StaticOptimum exp_static_best(std::int64_t n)
{
  if (n < 1)
  {
    throw DomainError("exp_static_best: need n >= 1");
  }
  double const hn  = harmonic(n);
  double const top = hn + 2.0;
  auto welfare     = [n](double p) { return exp_static_welfare(n, p); };

  std::vector<std::pair<double, double>> intervals;
  if (n >= 16)
  {
    auto const cases = exp_static_cases(n);
    double const a   = std::clamp(cases.case1_end, 0.0, top);
    double const b   = std::clamp(cases.case2_end, a, top);
    intervals        = {{0.0, a}, {a, b}, {b, top}};
  }
  // A coarse grid brackets the peak in case the cases split it badly.
  int const grid = 512;
  double best_x  = 0.0;
  double best_y  = welfare(0.0);
  for (int g = 1; g <= grid; ++g)
  {
    double const x = top * g / grid;
    if (double const y = welfare(x); y > best_y)
    {
      best_x = x;
      best_y = y;
    }
  }
  intervals.emplace_back(std::max(0.0, best_x - top / grid), std::min(top, best_x + top / grid));

  StaticOptimum out{best_x, best_y, 0.0};
  for (auto [lo, hi] : intervals)
  {
    for (double x : {lo, hi})
    {
      if (double const y = welfare(x); y > out.welfare)
      {
        out = {x, y, 0.0};
      }
    }
    if (hi > lo)
    {
      auto const peak = golden_section_max(welfare, lo, hi, 1e-12);
      if (peak.value > out.welfare)
      {
        out = {peak.argmax, peak.value, 0.0};
      }
    }
  }
  out.gap = hn - out.welfare;
  return out;
}

BoundReport exp_static_case_check(std::int64_t n, int grid_points)
{
  if (n < 16 || grid_points < 2)
  {
    throw DomainError("exp_static_case_check: need n >= 16 and at least two grid points");
  }
  BoundReport report;
  report.claim     = "static-cases/n=" + std::to_string(n);
  report.parameter = "p";
  report.slack     = 1e-12;
  auto const cases = exp_static_cases(n);
  double const hn  = harmonic(n);
  struct Span
  {
    int which;
    double lo, hi;
  };
  // Case 3 is unbounded; beyond H_n + 30 the welfare is negligible.
  std::vector<Span> const spans{{1, 0.0, cases.case1_end}, {2, cases.case1_end, cases.case2_end},
                                {3, cases.case2_end, hn + 30.0}};
  for (auto const &s : spans)
  {
    if (!(s.hi > s.lo))
    {
      report.note += (report.note.empty() ? "" : "; ") + std::string("case ") + std::to_string(s.which) +
                     " interval is empty";
      continue;
    }
    for (int g = 0; g < grid_points; ++g)
    {
      double const p = s.lo + (s.hi - s.lo) * g / (grid_points - 1);
      report.add(p, exp_static_welfare(n, p), exp_static_case_bound(s.which, n, p));
    }
  }
  return report;
}

BoundReport mdp_bound_check(std::int64_t n_max)
{
  if (n_max < 2)
  {
    throw DomainError("mdp_bound_check: need n_max >= 2");
  }
  BoundReport report;
  report.claim     = "mdp-recursion";
  report.parameter = "k";
  report.slack     = 0.0;
  report.grid.reserve(static_cast<std::size_t>(n_max));
  report.lhs.reserve(static_cast<std::size_t>(n_max));
  report.rhs.reserve(static_cast<std::size_t>(n_max));
  double p = 1.0;  // value after one step
  double h = 1.0;
  for (std::int64_t k = 2; k <= n_max; ++k)
  {
    p += std::exp(-p);
    h += 1.0 / static_cast<double>(k);
    report.add(static_cast<double>(k), p, h - 0.125);
  }
  return report;
}

TrendModel parse_trend_model(std::string_view name)
{
  if (name == "one-over-log")
  {
    return TrendModel::OneOverLog;
  }
  if (name == "logloglog-over-log")
  {
    return TrendModel::LogLogLogOverLog;
  }
  throw ConfigError("unknown trend model '" + std::string(name) + "' (valid: one-over-log, logloglog-over-log)");
}

double trend_basis(TrendModel model, double n)
{
  double const ln = std::log(n);
  return model == TrendModel::OneOverLog ? 1.0 / ln : std::log(std::log(ln)) / ln;
}

TrendFit ratio_trend_fit(std::span<double const> ns, std::span<double const> ratios, TrendModel model)
{
  if (ns.size() != ratios.size() || ns.size() < 3)
  {
    throw DomainError("ratio_trend_fit: need at least three (n, ratio) pairs");
  }
  std::vector<double> g(ns.size());
  std::vector<double> y(ns.size());
  double gg = 0.0;
  double gy = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i)
  {
    if (!(ratios[i] > 0.0 && ratios[i] <= 1.0))
    {
      throw DomainError("ratio_trend_fit: ratios must lie in (0, 1]");
    }
    g[i] = trend_basis(model, ns[i]);
    y[i] = 1.0 - ratios[i];
    if (!std::isfinite(g[i]))
    {
      throw NumericError("ratio_trend_fit: basis undefined at n = " + std::to_string(ns[i]));
    }
    gg += g[i] * g[i];
    gy += g[i] * y[i];
  }
  if (!(gg > 1e-300))
  {
    throw NumericError("ratio_trend_fit: degenerate design (basis vanishes on every n)");
  }
  TrendFit fit;
  fit.c = gy / gg;
  double mean = 0.0;
  for (double v : y)
  {
    mean += v;
  }
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
  {
    double const r = y[i] - fit.c * g[i];
    fit.residuals.push_back(r);
    ss_res += r * r;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot > 0.0)
  {
    fit.r_squared = 1.0 - ss_res / ss_tot;
  }
  else
  {
    fit.r_squared = ss_res <= 1e-24 ? 1.0 : 0.0;
  }
  return fit;
}

}  // namespace ppm
