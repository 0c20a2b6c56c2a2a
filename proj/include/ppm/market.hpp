#pragma once

#include "ppm/distribution.hpp"
#include "ppm/rng.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppm {

using Index = Eigen::Index;

enum class ValuationKind
{
  IndependentUnitDemand,
  Separable,
  AdditiveIndependent
};

/// How a buyer's value vector over the m items is generated.
///
/// Independent and additive models carry one marginal per item; an empty
/// marginal marks a dummy item whose value is identically zero. Separable
/// models carry multipliers alpha_1 >= ... >= alpha_m >= 0 and a type
/// distribution, with v_ij = alpha_j * t_i; items with alpha_j = 0 are dummies.
class ValuationModel
{
public:
  static ValuationModel independent(std::vector<Distribution> marginals);
  static ValuationModel additive(std::vector<Distribution> marginals);
  static ValuationModel separable(Eigen::VectorXd alphas, Distribution type);

  /// `independent: [exp(1), unif(0,2)]`, `separable: alphas=[1,0.5], type=exp(1)`
  /// or `additive: [...]`.
  static ValuationModel parse(std::string_view text);

  ValuationKind kind() const noexcept { return kind_; }
  Index items() const noexcept;
  Index real_items() const noexcept;
  bool is_dummy(Index item) const;
  bool unit_demand() const noexcept { return kind_ != ValuationKind::AdditiveIndependent; }

  /// Marginal of a non-dummy independent/additive item.
  Distribution const &marginal(Index item) const;
  std::span<std::optional<Distribution> const> marginals() const noexcept { return marginals_; }
  /// True when every non-dummy marginal is the same distribution.
  bool identical_marginals() const;

  Eigen::VectorXd const &alphas() const noexcept { return alphas_; }
  Distribution const &type_distribution() const;

  /// Same model with `count` dummy items appended.
  ValuationModel with_dummies(Index count) const;
  /// Separable model restricted to its first `count` items.
  ValuationModel truncated(Index count) const;

  std::string to_string() const;

private:
  ValuationModel() = default;

  ValuationKind kind_ = ValuationKind::IndependentUnitDemand;
  std::vector<std::optional<Distribution>> marginals_;
  Eigen::VectorXd alphas_;
  std::optional<Distribution> type_;
};

/// n sampled buyers: values(i, j) = v_ij; for separable models `types` holds t_i.
struct ValuationProfile
{
  Eigen::MatrixXd values;
  Eigen::VectorXd types;

  Index buyers() const noexcept { return values.rows(); }
  Index items() const noexcept { return values.cols(); }
};

/// Draws n i.i.d. buyers by inverse transform. Items are visited in column
/// order and dummy items consume no randomness, so padding a model does not
/// change the values of its real items.
ValuationProfile sample_profile(ValuationModel const &model, Index n, Rng &rng);

/// What a utility-maximising buyer takes at the posted prices.
struct PurchaseDecision
{
  Index buyer = -1;
  std::vector<Index> bundle;
  double paid    = 0.0;
  double value   = 0.0;
  double utility = 0.0;

  bool empty() const noexcept { return bundle.empty(); }
};

/// Unit-demand buyers take argmax_j (v_j - p_j) when it is strictly positive,
/// ties going to the lowest item index. Additive buyers take every item with
/// v_j > p_j. A price of +inf marks an unavailable item.
PurchaseDecision best_response(ValuationModel const &model, Eigen::Ref<Eigen::VectorXd const> values,
                               Eigen::Ref<Eigen::VectorXd const> prices, Index buyer = -1);

/// Brings the model to exactly n items: dummies are appended when m < n and a
/// separable model keeps only its n largest multipliers when m > n.
ValuationModel pad_to_square(ValuationModel const &model, Index n);

}  // namespace ppm
