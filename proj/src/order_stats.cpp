#include "ppm/order_stats.hpp"

#include "ppm/error.hpp"
#include "ppm/numeric.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace ppm {

double order_stat_mean(Distribution const &dist, std::int64_t n, std::int64_t k)
{
  if (n < 1 || k < 1 || k > n)
  {
    throw DomainError("order_stat_mean: need 1 <= k <= n (k=" + std::to_string(k) +
                      ", n=" + std::to_string(n) + ")");
  }
  double const lo  = dist.support_lower();
  double const top = dist.upper_quantile(kTailMass);

  // The integrand drops from 1 to 0 around F^{-1}(1 - k/n); panel breaks
  // bracket that transition so the adaptive rule resolves it for large n.
  std::vector<double> breaks{lo, top};
  double const centre = static_cast<double>(k) / static_cast<double>(n);
  for (double scale : {8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.125})
  {
    double const t = centre * scale;
    if (t < 1.0 && t > kTailMass)
    {
      breaks.push_back(dist.upper_quantile(t));
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](double x) { return binomial_upper_tail(n, k, dist.survival(x)); };
  return lo + integrate_pieces(integrand, breaks, {1e-11, 18});
}

double max_expectation(Distribution const &dist, std::int64_t n)
{
  if (n < 1)
  {
    throw DomainError("max_expectation: n must be >= 1");
  }
  return order_stat_mean(dist, n, 1);
}

double order_stat_tail_bound(Distribution const &dist, std::int64_t n)
{
  return static_cast<double>(n) * dist.tail_integral(dist.upper_quantile(kTailMass));
}

OrderStatsTable OrderStatsTable::build(Distribution const &dist, std::int64_t n)
{
  if (n < 1)
  {
    throw DomainError("OrderStatsTable: n must be >= 1");
  }
  Eigen::VectorXd mu(n);
  for (std::int64_t k = 1; k <= n; ++k)
  {
    mu(k - 1) = order_stat_mean(dist, n, k);
  }
  return {dist, n, std::move(mu), order_stat_tail_bound(dist, n)};
}

}  // namespace ppm
