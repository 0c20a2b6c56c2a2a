#pragma once

#include "ppm/distribution.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace ppm {

/// Probability mass left above the upper integration limit F^{-1}(1 - kTailMass).
inline constexpr double kTailMass = 1e-12;

/// Expected k-th highest of n i.i.d. draws (k = 1 is the maximum).
///
/// Integrates the survival function of the order statistic,
/// P(v_(k) >= x) = P(Binomial(n, 1 - F(x)) >= k), up to F^{-1}(1 - 1e-12).
double order_stat_mean(Distribution const &dist, std::int64_t n, std::int64_t k);

/// E[max of n i.i.d. draws].
double max_expectation(Distribution const &dist, std::int64_t n);

/// Upper bound on the mass of the order-statistic integral beyond the
/// truncation point: n * integral of S over [F^{-1}(1 - 1e-12), inf).
double order_stat_tail_bound(Distribution const &dist, std::int64_t n);

/// mu_1 >= mu_2 >= ... >= mu_n for a fixed population size.
struct OrderStatsTable
{
  Distribution dist;
  std::int64_t n;
  Eigen::VectorXd mu;  // mu(k - 1) holds the k-th highest
  double tail_bound;

  static OrderStatsTable build(Distribution const &dist, std::int64_t n);

  double operator[](std::int64_t k) const { return mu(k - 1); }
};

}  // namespace ppm
