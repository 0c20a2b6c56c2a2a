#include "ppm/quantile_lemmas.hpp"

#include "ppm/error.hpp"
#include "ppm/numeric.hpp"
#include "ppm/order_stats.hpp"

#include <cmath>
#include <string>

namespace ppm {

namespace {

bool at_least(double lhs, double rhs)
{
  return lhs >= rhs - kLemmaSlack * std::abs(rhs);
}

}  // namespace

LemmaCheck check_quantiles1(Distribution const &dist, std::int64_t n, std::int64_t j, double q)
{
  if (n < 1 || j < 1 || j > n)
  {
    throw DomainError("check_quantiles1: need 1 <= j <= n");
  }
  double const gap   = harmonic_diff(j - 1, n);
  double const lower = std::exp(-gap);
  if (!(q <= 1.0) || q < lower * (1.0 - 1e-14))
  {
    throw DomainError("check_quantiles1: q=" + std::to_string(q) + " outside [exp(H_{j-1}-H_n), 1]");
  }
  double const lhs = dist.upper_quantile(q);
  double const rhs = -std::log(q) / gap * order_stat_mean(dist, n, j);
  return {at_least(lhs, rhs), lhs, rhs};
}

LemmaCheck check_quantiles2(Distribution const &dist, std::int64_t n, double q)
{
  if (n < 1 || !(q >= 0.0 && q <= 1.0))
  {
    throw DomainError("check_quantiles2: need n >= 1 and q in [0,1]");
  }
  auto const nd     = static_cast<double>(n);
  auto const k      = static_cast<std::int64_t>(std::floor(nd * q + std::sqrt(nd * std::log(nd))));
  if (k < 1 || k > n)
  {
    return {true, 0.0, 0.0, true};
  }
  double const lhs = dist.upper_quantile(q);
  double const rhs = order_stat_mean(dist, n, k);
  return {at_least(lhs, rhs), lhs, rhs};
}

double quantile_maximum_alpha(double z, std::int64_t k)
{
  double const alpha = std::max(1.0, (1.0 + std::log(1.0 / z)) / harmonic(k));
  return alpha * static_cast<double>(k) <= 1.0 / z ? alpha : 0.0;
}

LemmaCheck check_quantile_maximum(Distribution const &dist, double z, std::int64_t k,
                                  double alpha)
{
  if (!(z > 0.0 && z <= 1.0) || k < 1)
  {
    throw DomainError("check_quantile_maximum: need z in (0,1] and k >= 1");
  }
  double const needed = (1.0 + std::log(1.0 / z)) / harmonic(k);
  if (alpha < 1.0)
  {
    throw DomainError("check_quantile_maximum: alpha must be >= 1");
  }
  if (alpha < needed * (1.0 - 1e-12))
  {
    throw DomainError("check_quantile_maximum: alpha below (1 + ln(1/z)) / H_k");
  }
  if (alpha * static_cast<double>(k) > (1.0 / z) * (1.0 + 1e-12))
  {
    throw DomainError("check_quantile_maximum: alpha * k exceeds 1/z");
  }
  double const lhs = dist.conditional_mean_above(dist.upper_quantile(z));
  double const rhs = alpha * max_expectation(dist, k);
  return {lhs <= rhs + kLemmaSlack * std::abs(rhs), lhs, rhs};
}

LemmaCheck check_babaioff_ratio(Distribution const &dist, std::int64_t n_small,
                                std::int64_t n_large)
{
  if (n_small < 1 || n_large < n_small)
  {
    throw DomainError("check_babaioff_ratio: need 1 <= n_small <= n_large");
  }
  if (n_small == n_large)
  {
    return {true, 1.0, 1.0};
  }
  double const lhs = max_expectation(dist, n_small) / max_expectation(dist, n_large);
  double const rhs = harmonic(n_small) / harmonic(n_large);
  return {at_least(lhs, rhs), lhs, rhs};
}

}  // namespace ppm
