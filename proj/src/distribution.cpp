#include "ppm/distribution.hpp"

#include "ppm/error.hpp"
#include "ppm/numeric.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdio>
#include <regex>
#include <string>

namespace ppm {

Distribution Distribution::exponential(double rate)
{
  if (!(rate > 0.0) || !std::isfinite(rate))
  {
    throw DomainError("exp: rate must be positive and finite");
  }
  return {DistributionKind::Exponential, rate, 0.0};
}

Distribution Distribution::uniform(double lower, double upper)
{
  if (!(lower >= 0.0) || !(upper > lower) || !std::isfinite(upper))
  {
    throw DomainError("unif: need 0 <= a < b < inf");
  }
  return {DistributionKind::Uniform, lower, upper};
}

Distribution Distribution::weibull(double shape, double scale)
{
  if (!(shape >= 1.0) || !std::isfinite(shape))
  {
    throw DomainError("weibull: shape must be >= 1 for a monotone hazard rate");
  }
  if (!(scale > 0.0) || !std::isfinite(scale))
  {
    throw DomainError("weibull: scale must be positive");
  }
  return {DistributionKind::Weibull, shape, scale};
}

Distribution Distribution::parse(std::string_view text)
{
  static std::regex const pattern(
      R"(^\s*([A-Za-z]+)\s*\(\s*([^,\s)]+)\s*(?:,\s*([^,\s)]+)\s*)?\)\s*$)");
  std::string const s(text);
  std::smatch match;
  if (!std::regex_match(s, match, pattern))
  {
    throw ConfigError("cannot parse distribution '" + s +
                      "' (expected exp(rate), unif(a,b) or weibull(k,scale))");
  }
  auto number = [&](std::ssub_match const &m) {
    try
    {
      std::size_t used = 0;
      double const v   = std::stod(m.str(), &used);
      if (used != m.str().size())
      {
        throw ConfigError("bad number '" + m.str() + "' in '" + s + "'");
      }
      return v;
    }
    catch (std::logic_error const &)
    {
      throw ConfigError("bad number '" + m.str() + "' in '" + s + "'");
    }
  };
  std::string const name = match[1].str();
  bool const two         = match[3].matched;
  if ((name == "exp" || name == "exponential") && !two)
  {
    return exponential(number(match[2]));
  }
  if ((name == "unif" || name == "uniform") && two)
  {
    return uniform(number(match[2]), number(match[3]));
  }
  if (name == "weibull" && two)
  {
    return weibull(number(match[2]), number(match[3]));
  }
  throw ConfigError("unknown distribution '" + s +
                    "' (expected exp(rate), unif(a,b) or weibull(k,scale))");
}

double Distribution::cdf(double x) const noexcept
{
  return 1.0 - survival(x);
}

double Distribution::survival(double x) const noexcept
{
  switch (kind_)
  {
  case DistributionKind::Exponential:
    return x <= 0.0 ? 1.0 : std::exp(-a_ * x);
  case DistributionKind::Uniform:
    if (x <= a_)
    {
      return 1.0;
    }
    return x >= b_ ? 0.0 : (b_ - x) / (b_ - a_);
  case DistributionKind::Weibull:
    return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / b_, a_));
  }
  return 0.0;
}

double Distribution::pdf(double x) const noexcept
{
  switch (kind_)
  {
  case DistributionKind::Exponential:
    return x < 0.0 ? 0.0 : a_ * std::exp(-a_ * x);
  case DistributionKind::Uniform:
    return (x < a_ || x > b_) ? 0.0 : 1.0 / (b_ - a_);
  case DistributionKind::Weibull:
  {
    if (x < 0.0)
    {
      return 0.0;
    }
    double const z = x / b_;
    if (a_ == 1.0)
    {
      return std::exp(-z) / b_;
    }
    return a_ / b_ * std::pow(z, a_ - 1.0) * std::exp(-std::pow(z, a_));
  }
  }
  return 0.0;
}

double Distribution::hazard(double x) const noexcept
{
  switch (kind_)
  {
  case DistributionKind::Exponential:
    return x < 0.0 ? 0.0 : a_;
  case DistributionKind::Uniform:
    if (x < a_)
    {
      return 0.0;
    }
    return x >= b_ ? kInf : 1.0 / (b_ - x);
  case DistributionKind::Weibull:
    return x < 0.0 ? 0.0 : a_ / b_ * std::pow(x / b_, a_ - 1.0);
  }
  return 0.0;
}

double Distribution::quantile(double q) const
{
  if (!(q > 0.0 && q < 1.0))
  {
    throw DomainError("quantile: q must lie in (0,1), got " + std::to_string(q));
  }
  return quantile_closed(q);
}

double Distribution::quantile_closed(double p) const
{
  if (!(p >= 0.0 && p <= 1.0))
  {
    return std::nan("");
  }
  switch (kind_)
  {
  case DistributionKind::Exponential:
    return -std::log1p(-p) / a_;
  case DistributionKind::Uniform:
    return a_ + (b_ - a_) * p;
  case DistributionKind::Weibull:
    return b_ * std::pow(-std::log1p(-p), 1.0 / a_);
  }
  return std::nan("");
}

double Distribution::upper_quantile(double t) const
{
  if (!(t >= 0.0 && t <= 1.0))
  {
    throw DomainError("upper_quantile: t must lie in [0,1], got " + std::to_string(t));
  }
  switch (kind_)
  {
  case DistributionKind::Exponential:
    return -std::log(t) / a_ + 0.0;
  case DistributionKind::Uniform:
    return b_ - (b_ - a_) * t;
  case DistributionKind::Weibull:
    return b_ * std::pow(-std::log(t) + 0.0, 1.0 / a_);
  }
  return std::nan("");
}

double Distribution::support_lower() const noexcept
{
  return kind_ == DistributionKind::Uniform ? a_ : 0.0;
}

double Distribution::support_upper() const noexcept
{
  return kind_ == DistributionKind::Uniform ? b_ : kInf;
}

double Distribution::mean() const noexcept
{
  switch (kind_)
  {
  case DistributionKind::Exponential:
    return 1.0 / a_;
  case DistributionKind::Uniform:
    return 0.5 * (a_ + b_);
  case DistributionKind::Weibull:
    return b_ * std::tgamma(1.0 + 1.0 / a_);
  }
  return 0.0;
}

double Distribution::tail_integral(double x) const
{
  switch (kind_)
  {
  case DistributionKind::Exponential:
    return x <= 0.0 ? 1.0 / a_ - x : std::exp(-a_ * x) / a_;
  case DistributionKind::Uniform:
    if (x >= b_)
    {
      return 0.0;
    }
    if (x <= a_)
    {
      return 0.5 * (a_ + b_) - x;
    }
    return 0.5 * (b_ - x) * (b_ - x) / (b_ - a_);
  case DistributionKind::Weibull:
  {
    if (x <= 0.0)
    {
      return mean() - x;
    }
    // (scale / k) * Gamma(1/k, (x/scale)^k), upper incomplete gamma.
    return b_ / a_ * boost::math::tgamma(1.0 / a_, std::pow(x / b_, a_));
  }
  }
  return 0.0;
}

double Distribution::conditional_mean_above(double threshold) const
{
  double const lo = support_lower();
  if (threshold <= lo)
  {
    return mean();
  }
  double const s = survival(threshold);
  if (!(s > 0.0))
  {
    throw DomainError("conditional_mean_above: threshold outside the support");
  }
  return threshold + tail_integral(threshold) / s;
}

std::string Distribution::to_string() const
{
  char buffer[96];
  switch (kind_)
  {
  case DistributionKind::Exponential:
    std::snprintf(buffer, sizeof buffer, "exp(%.10g)", a_);
    break;
  case DistributionKind::Uniform:
    std::snprintf(buffer, sizeof buffer, "unif(%.10g,%.10g)", a_, b_);
    break;
  case DistributionKind::Weibull:
    std::snprintf(buffer, sizeof buffer, "weibull(%.10g,%.10g)", a_, b_);
    break;
  }
  return buffer;
}

double invert_cdf_bisection(Distribution const &dist, double q)
{
  if (!(q > 0.0 && q < 1.0))
  {
    throw DomainError("invert_cdf_bisection: q must lie in (0,1)");
  }
  double lo = dist.support_lower();
  double hi = std::isfinite(dist.support_upper()) ? dist.support_upper() : lo + 1.0;
  while (dist.cdf(hi) < q)
  {
    hi = lo + 2.0 * (hi - lo);
  }
  return bisect([&](double x) { return dist.cdf(x) - q; }, lo, hi, 1e-10, 1e-12);
}

HazardCheck hazard_monotone_check(Distribution const &dist, int grid_size)
{
  if (grid_size < 2)
  {
    throw DomainError("hazard_monotone_check: grid_size must be >= 2");
  }
  double const lo    = std::max(dist.quantile(1e-9), 1e-12);
  double const hi    = dist.upper_quantile(1e-9);
  double const ratio = std::pow(hi / lo, 1.0 / (grid_size - 1));
  HazardCheck result;
  double previous_h = dist.hazard(lo);
  double x          = lo;
  for (int k = 1; k < grid_size; ++k)
  {
    x              = k + 1 == grid_size ? hi : x * ratio;
    double const h = dist.hazard(x);
    if (h < previous_h * (1.0 - 1e-9))
    {
      result.monotone        = false;
      result.first_violation = x;
      return result;
    }
    previous_h = h;
  }
  return result;
}

}  // namespace ppm
