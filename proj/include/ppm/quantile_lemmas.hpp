#pragma once

#include "ppm/distribution.hpp"

#include <cstdint>

namespace ppm {

/// Relative slack granted to quadrature when comparing the two sides of a lemma.
inline constexpr double kLemmaSlack = 1e-6;

/// Outcome of a single lemma evaluation: holds iff lhs >= rhs (up to slack)
/// for lower bounds, or lhs <= rhs for upper bounds.
struct LemmaCheck
{
  bool holds;
  double lhs;
  double rhs;
  bool vacuous = false;
};

/// F^{-1}(1 - q) >= -ln(q) / (H_n - H_{j-1}) * mu_j
/// for exp(H_{j-1} - H_n) <= q <= 1.
LemmaCheck check_quantiles1(Distribution const &dist, std::int64_t n, std::int64_t j, double q);

/// F^{-1}(1 - q) >= mu_k with k = floor(n q + sqrt(n ln n)); vacuous once k
/// leaves [1, n].
LemmaCheck check_quantiles2(Distribution const &dist, std::int64_t n, double q);

/// E[X | X >= F^{-1}(1 - z)] <= alpha * E[max of k draws] for
/// alpha >= (1 + ln(1/z)) / H_k, alpha >= 1 and alpha k <= 1/z.
LemmaCheck check_quantile_maximum(Distribution const &dist, double z, std::int64_t k,
                                  double alpha);

/// Smallest alpha admitted by check_quantile_maximum, or 0 when (z, k) admits none.
double quantile_maximum_alpha(double z, std::int64_t k);

/// E[max of n_small] / E[max of n_large] >= H_{n_small} / H_{n_large}.
LemmaCheck check_babaioff_ratio(Distribution const &dist, std::int64_t n_small,
                                std::int64_t n_large);

}  // namespace ppm
