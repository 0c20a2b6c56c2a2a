#pragma once

#include "ppm/distribution.hpp"
#include "ppm/market.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ppm {

/// Sum_j alpha_j v_(j): the j-th largest multiplier goes to the j-th highest type.
double separable_optimum(Eigen::Ref<Eigen::VectorXd const> alphas, Eigen::Ref<Eigen::VectorXd const> types);

/// Sum over non-dummy items of E[max of n draws from F_j]; an upper bound on
/// the expected optimum for any subadditive buyers with these marginals.
double subadditive_upper_bound(std::span<std::optional<Distribution> const> marginals, std::int64_t n);

/// q1 * E[v | v >= F^{-1}(1 - q1/n)], the ex-ante contribution of one item.
double exante_item_bound(Distribution const &dist, double q1, std::int64_t n);

struct MatchProbabilities
{
  Eigen::VectorXd q;   // one entry per requested item, in request order
  Eigen::VectorXd se;  // sqrt(q (1 - q) / trials)
  std::int64_t trials = 0;
};

/// Monte Carlo frequency with which each item in `remaining` is matched in
/// the offline optimum of fresh profiles of `buyers` buyers restricted to
/// those items.
MatchProbabilities estimate_match_probabilities(ValuationModel const &model, Index buyers,
                                                std::span<Index const> remaining, std::int64_t trials,
                                                std::uint64_t seed);

enum class OracleKind
{
  Auto,
  Matching,
  SeparableClosedForm,
  ItemwiseMax,
  SingleItemMax
};

OracleKind parse_oracle(std::string_view name);
std::string_view to_string(OracleKind kind);

/// Offline-optimal welfare of a profile. Auto picks the cheapest exact route:
/// the separable closed form, itemwise maxima for additive buyers, the column
/// maximum for a single real item, and the assignment solver otherwise.
double offline_welfare(ValuationModel const &model, ValuationProfile const &profile,
                       OracleKind kind = OracleKind::Auto);

}  // namespace ppm
