#include "ppm/prices.hpp"

#include "ppm/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace ppm {

namespace {

double log_log(std::int64_t n)
{
  return std::log(std::log(static_cast<double>(n)));
}

void require_marginals(ValuationModel const &model, char const *who)
{
  if (model.kind() == ValuationKind::Separable)
  {
    throw ConfigError(std::string(who) + ": needs independent or additive marginals");
  }
}

Eigen::VectorXd quantile_prices(ValuationModel const &model, double q)
{
  Eigen::VectorXd prices(model.items());
  for (Index j = 0; j < model.items(); ++j)
  {
    prices(j) = model.is_dummy(j) ? kUnavailable : model.marginal(j).upper_quantile(q);
  }
  return prices;
}

}  // namespace

Eigen::VectorXd single_item_ladder(Distribution const &dist, std::int64_t n)
{
  if (n < 1)
  {
    throw DomainError("single_item_ladder: n must be >= 1");
  }
  Eigen::VectorXd table(n);
  for (std::int64_t i = 1; i <= n; ++i)
  {
    table(i - 1) = dist.upper_quantile(1.0 / static_cast<double>(n - i + 1));
  }
  return table;
}

MdpPrices mdp_optimal_prices(Distribution const &dist, std::int64_t n)
{
  if (n < 1)
  {
    throw DomainError("mdp_optimal_prices: n must be >= 1");
  }
  Eigen::VectorXd thresholds(n + 1);
  thresholds(n) = 0.0;
  for (std::int64_t i = n - 1; i >= 0; --i)
  {
    double const p    = thresholds(i + 1);
    double const tail = dist.tail_integral(p);
    if (!std::isfinite(tail))
    {
      throw NumericError("mdp_optimal_prices: divergent tail integral");
    }
    thresholds(i) = p + tail;
  }
  return {std::move(thresholds)};
}

Eigen::VectorXd static_independent_prices(ValuationModel const &model, std::int64_t n)
{
  require_marginals(model, "static_independent_prices");
  if (n < 16)
  {
    throw ConfigError("static-ind: n must be >= 16 so that ln ln n / n is a usable quantile (n=" +
                      std::to_string(n) + ")");
  }
  double const ll    = log_log(n);
  double const limit = static_cast<double>(n) / (ll * ll);
  if (static_cast<double>(model.real_items()) > limit)
  {
    throw ConfigError("static-ind: " + std::to_string(model.real_items()) +
                      " items exceed the bound n/(ln ln n)^2 = " + std::to_string(limit));
  }
  return quantile_prices(model, ll / static_cast<double>(n));
}

StaticSeparablePrices static_separable_prices(Eigen::Ref<Eigen::VectorXd const> alphas, Distribution const &dist,
                                              std::int64_t n)
{
  auto const nd      = static_cast<double>(n);
  auto const cutoff  = static_cast<std::int64_t>(std::floor(nd - std::pow(nd, 5.0 / 6.0)));
  if (n < 1 || cutoff < 1)
  {
    throw ConfigError("static-sep: n=" + std::to_string(n) + " leaves no item below the n - n^(5/6) cutoff");
  }
  for (Index j = 1; j < alphas.size(); ++j)
  {
    if (alphas(j) > alphas(j - 1))
    {
      throw ConfigError("static-sep: alphas must be non-increasing");
    }
  }
  // alpha'_k for k = 1..n+1 (index k - 1), zero past the cutoff or the item count.
  Eigen::VectorXd trimmed = Eigen::VectorXd::Zero(n + 1);
  for (std::int64_t k = 1; k <= std::min<std::int64_t>(cutoff, alphas.size()); ++k)
  {
    trimmed(k - 1) = alphas(k - 1);
  }
  double const two_ll = 2.0 * std::log(std::log(nd));
  double const spread = std::sqrt(std::log(nd) / nd);
  Eigen::VectorXd q(n);
  for (std::int64_t k = 1; k <= n; ++k)
  {
    double const frac = static_cast<double>(k) / nd;
    q(k - 1)          = std::clamp(std::min(frac * two_ll, frac + spread), 1e-12, 1.0 - 1e-12);
  }
  // Suffix sums: price(j) = sum_{k=j}^{n} (alpha'_k - alpha'_{k+1}) F^{-1}(1 - q_k).
  Eigen::VectorXd suffix = Eigen::VectorXd::Zero(n + 1);
  for (std::int64_t k = n; k >= 1; --k)
  {
    double const step = trimmed(k - 1) - trimmed(k);
    suffix(k - 1)     = suffix(k) + (step == 0.0 ? 0.0 : step * dist.upper_quantile(q(k - 1)));
  }
  Eigen::VectorXd prices(alphas.size());
  for (Index j = 0; j < alphas.size(); ++j)
  {
    prices(j) = (j + 1 <= cutoff) ? suffix(j) : kUnavailable;
  }
  return {std::move(prices), cutoff, std::move(q)};
}

Eigen::VectorXd dynamic_separable_prices(std::int64_t step, std::span<Index const> remaining,
                                         Eigen::Ref<Eigen::VectorXd const> alphas, Distribution const &dist,
                                         std::int64_t n)
{
  auto const size = static_cast<std::int64_t>(remaining.size());
  if (step < 1 || step > n || size != n - step + 1)
  {
    throw DomainError("dynamic_separable_prices: need |remaining| = n - i + 1");
  }
  if (!std::is_sorted(remaining.begin(), remaining.end()))
  {
    throw DomainError("dynamic_separable_prices: remaining items must be sorted");
  }
  Eigen::VectorXd prices = Eigen::VectorXd::Constant(alphas.size(), kUnavailable);
  auto const k_total     = static_cast<double>(size);
  double suffix          = 0.0;
  prices(remaining.back()) = 0.0;
  for (std::int64_t k = size - 1; k >= 1; --k)
  {
    double const gap = alphas(remaining[static_cast<std::size_t>(k - 1)]) - alphas(remaining[static_cast<std::size_t>(k)]);
    if (gap != 0.0)
    {
      suffix += gap * dist.upper_quantile(static_cast<double>(k) / k_total);
    }
    prices(remaining[static_cast<std::size_t>(k - 1)]) = suffix;
  }
  return prices;
}

Eigen::VectorXd SubadditiveGroupPlan::menu(Index buyer) const
{
  Index const items      = ladder.cols();
  Eigen::VectorXd prices = Eigen::VectorXd::Constant(items, kUnavailable);
  Index const group      = buyer / group_size;
  if (group < items)
  {
    prices(group) = ladder(buyer % group_size, group);
  }
  return prices;
}

SubadditiveGroupPlan subadditive_group_prices(ValuationModel const &model, std::int64_t n)
{
  require_marginals(model, "sub-dyn");
  Index const m = model.items();
  if (m > n)
  {
    throw ConfigError("sub-dyn: more items (" + std::to_string(m) + ") than buyers (" + std::to_string(n) + ")");
  }
  std::int64_t const group = n / m;
  SubadditiveGroupPlan plan{group, Eigen::MatrixXd(group, m)};
  for (Index j = 0; j < m; ++j)
  {
    if (model.is_dummy(j))
    {
      plan.ladder.col(j).setConstant(kUnavailable);
      continue;
    }
    plan.ladder.col(j) = single_item_ladder(model.marginal(j), group);
  }
  return plan;
}

Eigen::VectorXd subadditive_static_prices(ValuationModel const &model, std::int64_t n)
{
  require_marginals(model, "sub-static");
  Index const m = model.real_items();
  if (m < 2)
  {
    throw ConfigError("sub-static: needs at least 2 items; a single item is served by static-sep");
  }
  double const q = static_cast<double>(m) * log_log(n) / static_cast<double>(n);
  if (!(q > 0.0 && q < 1.0))
  {
    throw ConfigError("sub-static: m ln ln n / n = " + std::to_string(q) + " is not a probability in (0,1)");
  }
  return quantile_prices(model, q);
}

Eigen::VectorXd additive_static_prices(ValuationModel const &model, std::int64_t n)
{
  require_marginals(model, "add-static");
  if (n < 16)
  {
    throw ConfigError("add-static: n must be >= 16 (n=" + std::to_string(n) + ")");
  }
  return quantile_prices(model, log_log(n) / static_cast<double>(n));
}

Eigen::MatrixXd additive_dynamic_ladders(ValuationModel const &model, std::int64_t n)
{
  require_marginals(model, "add-dyn");
  Eigen::MatrixXd ladders(n, model.items());
  for (Index j = 0; j < model.items(); ++j)
  {
    if (model.is_dummy(j))
    {
      ladders.col(j).setConstant(kUnavailable);
    }
    else
    {
      ladders.col(j) = single_item_ladder(model.marginal(j), n);
    }
  }
  return ladders;
}

VcgOutcome vcg_separable(Eigen::Ref<Eigen::VectorXd const> alphas, Eigen::Ref<Eigen::VectorXd const> types)
{
  for (Index j = 1; j < alphas.size(); ++j)
  {
    if (alphas(j) > alphas(j - 1))
    {
      throw ConfigError("vcg_separable: alphas must be non-increasing");
    }
  }
  Index const n = types.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return types(a) > types(b); });

  auto alpha_at = [&](Index k) { return k < alphas.size() ? alphas(k) : 0.0; };            // 0-based rank
  auto type_at  = [&](Index k) { return k < n ? types(order[static_cast<std::size_t>(k)]) : 0.0; };

  VcgOutcome outcome;
  outcome.item_of_buyer.assign(static_cast<std::size_t>(n), -1);
  outcome.payments = Eigen::VectorXd::Zero(n);
  Index const winners = std::min(n, alphas.size());
  // payment(rank j) = sum_{k=j}^{winners-1} (alpha_k - alpha_{k+1}) v_(k+1), 0-based ranks.
  double suffix = 0.0;
  for (Index k = winners - 1; k >= 0; --k)
  {
    suffix += (alpha_at(k) - alpha_at(k + 1)) * type_at(k + 1);
    Index const buyer = order[static_cast<std::size_t>(k)];
    outcome.item_of_buyer[static_cast<std::size_t>(buyer)] = k;
    outcome.payments(buyer)                                = suffix;
  }
  for (Index k = 0; k < winners; ++k)
  {
    outcome.welfare += alphas(k) * type_at(k);
  }
  return outcome;
}

double virtual_value(Distribution const &dist, double t)
{
  if (!(dist.cdf(t) < 1.0) || t < dist.support_lower())
  {
    throw DomainError("virtual_value: t must lie in the support with F(t) < 1");
  }
  double const h = dist.hazard(t);
  if (!(h > 0.0))
  {
    throw DomainError("virtual_value: hazard rate vanishes at t");
  }
  return t - 1.0 / h;
}

}  // namespace ppm
