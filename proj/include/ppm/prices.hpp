#pragma once

#include "ppm/distribution.hpp"
#include "ppm/market.hpp"
#include "ppm/numeric.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace ppm {

/// Price of an item that cannot be bought. Never a large finite float.
inline constexpr double kUnavailable = kInf;

inline bool is_unavailable(double price) noexcept
{
  return std::isinf(price);
}

// All logarithms in the price rules below are natural logarithms.

/// p^(i) = F^{-1}(1 - 1/(n - i + 1)) for i = 1..n, stored at index i - 1.
Eigen::VectorXd single_item_ladder(Distribution const &dist, std::int64_t n);

/// Optimal single-item thresholds p^(n) = 0, p^(i) = E[max{v, p^(i+1)}].
struct MdpPrices
{
  Eigen::VectorXd thresholds;  // thresholds(i) = p^(i), i = 0..n

  /// p^(0): expected welfare of the optimal dynamic policy.
  double value() const { return thresholds(0); }
  /// Threshold faced by buyer i (1-based).
  double price_for_step(std::int64_t i) const { return thresholds(i); }
};

MdpPrices mdp_optimal_prices(Distribution const &dist, std::int64_t n);

/// p_j = F_j^{-1}(1 - ln ln n / n); dummies are unavailable. Requires n >= 16
/// and at most n / (ln ln n)^2 real items.
Eigen::VectorXd static_independent_prices(ValuationModel const &model, std::int64_t n);

struct StaticSeparablePrices
{
  Eigen::VectorXd prices;  // one entry per model item, unavailable above the cutoff
  std::int64_t cutoff;     // floor(n - n^(5/6))
  Eigen::VectorXd q;       // q_k for k = 1..n, after clipping
};

/// Telescoping static prices for separable buyers with the n^(5/6) item cutoff.
StaticSeparablePrices static_separable_prices(Eigen::Ref<Eigen::VectorXd const> alphas, Distribution const &dist,
                                              std::int64_t n);

/// Prices at step i (1-based) for the remaining items l_1 < ... < l_K,
/// K = n - i + 1: item l_t costs
///   sum_{k=t}^{K-1} (alpha_{l_k} - alpha_{l_{k+1}}) F^{-1}(1 - k/K),
/// so a buyer of type v takes l_k exactly when
/// F^{-1}(1 - k/K) <= v < F^{-1}(1 - (k-1)/K).
Eigen::VectorXd dynamic_separable_prices(std::int64_t step, std::span<Index const> remaining,
                                         Eigen::Ref<Eigen::VectorXd const> alphas, Distribution const &dist,
                                         std::int64_t n);

/// Buyers are split into groups of n' = floor(n/m); the k-th buyer of group j
/// sees item j at F_j^{-1}(1 - 1/(n' - k + 1)) and every other item at +inf.
struct SubadditiveGroupPlan
{
  std::int64_t group_size;
  Eigen::MatrixXd ladder;  // ladder(k - 1, j) for the k-th buyer of group j

  /// Price menu for buyer (0-based) over all items, before removing sold ones.
  Eigen::VectorXd menu(Index buyer) const;
};

SubadditiveGroupPlan subadditive_group_prices(ValuationModel const &model, std::int64_t n);

/// p_j = F_j^{-1}(1 - m ln ln n / n) for m >= 2 real items.
Eigen::VectorXd subadditive_static_prices(ValuationModel const &model, std::int64_t n);

/// p_j = F_j^{-1}(1 - ln ln n / n) for additive buyers; any number of items.
Eigen::VectorXd additive_static_prices(ValuationModel const &model, std::int64_t n);

/// ladder(i - 1, j) = F_j^{-1}(1 - 1/(n - i + 1)), offered to every buyer.
Eigen::MatrixXd additive_dynamic_ladders(ValuationModel const &model, std::int64_t n);

struct VcgOutcome
{
  std::vector<Index> item_of_buyer;  // -1 for buyers without an item
  Eigen::VectorXd payments;
  double welfare = 0.0;
};

/// Assortative allocation; the buyer ranked j pays
/// sum_{k>=j} (alpha_k - alpha_{k+1}) v_(k+1) with v_(n+1) = 0.
VcgOutcome vcg_separable(Eigen::Ref<Eigen::VectorXd const> alphas, Eigen::Ref<Eigen::VectorXd const> types);

/// phi(t) = t - 1/h(t).
double virtual_value(Distribution const &dist, double t);

}  // namespace ppm
