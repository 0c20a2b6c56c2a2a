#pragma once

#include "ppm/fixed_point.hpp"
#include "ppm/market.hpp"
#include "ppm/prices.hpp"
#include "ppm/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppm {

/// One market run: buyers arrive in index order.
struct MarketRun
{
  std::vector<PurchaseDecision> decisions;  // one per buyer
  std::vector<Index> removed;               // item leaving the market at each step, -1 if none
};

class Mechanism
{
public:
  Mechanism(std::string id, ValuationModel market, Index buyers);
  virtual ~Mechanism() = default;

  std::string const &id() const noexcept { return id_; }
  /// The market the mechanism operates on, after any dummy padding.
  ValuationModel const &market() const noexcept { return market_; }
  Index buyers() const noexcept { return buyers_; }
  virtual bool is_static() const { return false; }
  /// `aux` feeds any randomisation of the mechanism itself.
  virtual MarketRun run(ValuationProfile const &profile, Rng &aux) const = 0;

private:
  std::string id_;
  ValuationModel market_;
  Index buyers_;
};

/// Buyers face a menu of prices and best-respond; sold items leave the market.
class PostedPriceMechanism : public Mechanism
{
public:
  using Mechanism::Mechanism;

  /// Menu over all market items for buyer `step` (1-based); `remaining` is
  /// sorted. Entries of items no longer remaining are ignored.
  virtual Eigen::VectorXd prices(std::int64_t step, std::span<Index const> remaining) const = 0;
  MarketRun run(ValuationProfile const &profile, Rng &aux) const override;

protected:
  /// Item withdrawn when buyer `step` buys nothing, -1 to leave the market as is.
  virtual Index withdraw_on_no_sale(std::span<Index const> remaining) const;
  /// prices() written into a caller-owned buffer; overridden where a copy is cheaper.
  virtual void fill_prices(std::int64_t step, std::span<Index const> remaining, Eigen::Ref<Eigen::VectorXd> out) const;
};

/// Same menu at every step.
class StaticPriceMechanism final : public PostedPriceMechanism
{
public:
  StaticPriceMechanism(std::string id, ValuationModel market, Index buyers, Eigen::VectorXd prices);
  bool is_static() const override { return true; }
  Eigen::VectorXd prices(std::int64_t step, std::span<Index const> remaining) const override;
  Eigen::VectorXd const &menu() const noexcept { return prices_; }

protected:
  void fill_prices(std::int64_t step, std::span<Index const> remaining, Eigen::Ref<Eigen::VectorXd> out) const override;

private:
  Eigen::VectorXd prices_;
};

/// A price table indexed by step: row i - 1 is the menu of buyer i.
class LadderMechanism final : public PostedPriceMechanism
{
public:
  LadderMechanism(std::string id, ValuationModel market, Index buyers, Eigen::MatrixXd table);
  Eigen::VectorXd prices(std::int64_t step, std::span<Index const> remaining) const override;
  Eigen::MatrixXd const &table() const noexcept { return table_; }

protected:
  void fill_prices(std::int64_t step, std::span<Index const> remaining, Eigen::Ref<Eigen::VectorXd> out) const override;

private:
  Eigen::MatrixXd table_;
};

class DynamicSeparableMechanism final : public PostedPriceMechanism
{
public:
  DynamicSeparableMechanism(ValuationModel market, Index buyers);
  Eigen::VectorXd prices(std::int64_t step, std::span<Index const> remaining) const override;

protected:
  Index withdraw_on_no_sale(std::span<Index const> remaining) const override;
};

struct MechanismOptions
{
  double static_price            = 0.0;   // `static-p`: the single posted price
  std::int64_t match_trials      = 2000;  // Monte Carlo trials per estimate of q_j^(i)
  std::uint64_t seed             = 0x5EEDULL;
  FixedPointSettings solver      = {};
};

/// Probabilities q_j^(i) and posted prices for one state of the independent
/// dynamic mechanism.
struct IndependentStep
{
  Eigen::VectorXd q;
  Eigen::VectorXd prices;
  int solver_iterations = 0;
};

/// Entry p of `step` belongs to items[p].
struct IndependentStepView
{
  IndependentStep const *step = nullptr;
  std::vector<Index> items;
};

/// Shared state of the dynamic mechanism for independent items and of the
/// quantile allocation rule it is compared against.
///
/// q_j^(i) is the probability that j is matched in the offline optimum of the
/// remaining items and the n - i + 1 remaining buyers. It is 1 for every item
/// when the two counts agree; otherwise it is estimated by Monte Carlo and
/// renormalised to sum to n - i + 1. States are memoised by the multiset of
/// item marginals, so symmetric states share one solve.
class IndependentStepCache
{
public:
  IndependentStepCache(ValuationModel market, Index buyers, MechanismOptions options);
  /// Safe to call from several threads.
  IndependentStepView lookup(std::int64_t step, std::span<Index const> remaining) const;
  std::size_t size() const;

private:
  IndependentStep compute(std::int64_t step, std::span<Index const> ordered) const;

  ValuationModel market_;
  Index buyers_;
  MechanismOptions options_;
  std::vector<int> item_class_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<int>, IndependentStep> memo_;
};

class DynamicIndependentMechanism final : public PostedPriceMechanism
{
public:
  DynamicIndependentMechanism(ValuationModel market, Index buyers, std::shared_ptr<IndependentStepCache> cache);
  Eigen::VectorXd prices(std::int64_t step, std::span<Index const> remaining) const override;
  IndependentStepCache const &cache() const noexcept { return *cache_; }

protected:
  Index withdraw_on_no_sale(std::span<Index const> remaining) const override;

private:
  std::shared_ptr<IndependentStepCache> cache_;
};

/// Buyer i receives the remaining item maximising F_j(v_ij)^(1/q_j^(i)); dummy
/// items draw an artificial uniform quantile from the auxiliary stream.
class QuantileAllocationMechanism final : public Mechanism
{
public:
  QuantileAllocationMechanism(ValuationModel market, Index buyers, std::shared_ptr<IndependentStepCache> cache);
  MarketRun run(ValuationProfile const &profile, Rng &aux) const override;
  /// Chosen position in `remaining` for one buyer.
  Index allocate(std::int64_t step, std::span<Index const> remaining, Eigen::Ref<Eigen::VectorXd const> values,
                 Rng &aux) const;

private:
  std::shared_ptr<IndependentStepCache> cache_;
};

/// Assortative allocation with VCG payments for separable buyers.
class VcgMechanism final : public Mechanism
{
public:
  VcgMechanism(ValuationModel market, Index buyers);
  MarketRun run(ValuationProfile const &profile, Rng &aux) const override;
};

/// Mechanism ids accepted by make_mechanism.
std::vector<std::string_view> mechanism_ids();

/// Builds mechanism `id` for `model` and n buyers, padding the market where
/// the rule needs it. Throws ConfigError for an unknown id or a model the
/// rule does not apply to.
std::shared_ptr<Mechanism const> make_mechanism(std::string_view id, ValuationModel const &model, Index n,
                                                MechanismOptions const &options = {});

}  // namespace ppm
