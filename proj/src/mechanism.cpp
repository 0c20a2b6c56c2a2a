#include "ppm/mechanism.hpp"

#include "ppm/error.hpp"
#include "ppm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ppm {

namespace {

std::vector<Index> all_items(Index m)
{
  std::vector<Index> items(static_cast<std::size_t>(m));
  std::iota(items.begin(), items.end(), Index{0});
  return items;
}

void erase_item(std::vector<Index> &remaining, Index item)
{
  auto const it = std::lower_bound(remaining.begin(), remaining.end(), item);
  if (it != remaining.end() && *it == item)
  {
    remaining.erase(it);
  }
}

void require_kind(ValuationModel const &model, std::string_view id, std::initializer_list<ValuationKind> kinds)
{
  if (std::find(kinds.begin(), kinds.end(), model.kind()) == kinds.end())
  {
    throw ConfigError(std::string(id) + " does not apply to the model '" + model.to_string() + "'");
  }
}

void require_single_item(ValuationModel const &model, std::string_view id)
{
  require_kind(model, id, {ValuationKind::IndependentUnitDemand, ValuationKind::AdditiveIndependent});
  if (model.real_items() != 1)
  {
    throw ConfigError(std::string(id) + " sells a single item; the model has " +
                      std::to_string(model.real_items()));
  }
}

Index single_real_item(ValuationModel const &model)
{
  for (Index j = 0; j < model.items(); ++j)
  {
    if (!model.is_dummy(j))
    {
      return j;
    }
  }
  return -1;
}

}  // namespace

Mechanism::Mechanism(std::string id, ValuationModel market, Index buyers)
  : id_(std::move(id))
  , market_(std::move(market))
  , buyers_(buyers)
{
  if (buyers_ < 1)
  {
    throw ConfigError(id_ + ": need at least one buyer");
  }
}

MarketRun PostedPriceMechanism::run(ValuationProfile const &profile, Rng &) const
{
  if (profile.buyers() != buyers() || profile.items() != market().items())
  {
    throw ValidationError(id() + ": profile shape does not match the market");
  }
  Index const m = market().items();
  MarketRun out;
  out.decisions.resize(static_cast<std::size_t>(buyers()));
  out.removed.assign(static_cast<std::size_t>(buyers()), -1);
  auto remaining = all_items(m);
  std::vector<char> open(static_cast<std::size_t>(m), 1);
  Eigen::VectorXd offered(m);
  Eigen::VectorXd menu(m);
  Eigen::VectorXd values(m);
  for (Index i = 0; i < buyers(); ++i)
  {
    auto &decision = out.decisions[static_cast<std::size_t>(i)];
    decision.buyer = i;
    if (remaining.empty())
    {
      continue;
    }
    fill_prices(i + 1, remaining, offered);
    for (Index j = 0; j < m; ++j)
    {
      menu(j) = open[static_cast<std::size_t>(j)] ? offered(j) : kUnavailable;
    }
    values   = profile.values.row(i).transpose();
    decision = best_response(market(), values, menu, i);
    Index removed = decision.empty() ? withdraw_on_no_sale(remaining) : decision.bundle.front();
    for (Index j : decision.bundle)
    {
      erase_item(remaining, j);
      open[static_cast<std::size_t>(j)] = 0;
    }
    if (decision.empty() && removed >= 0)
    {
      erase_item(remaining, removed);
      open[static_cast<std::size_t>(removed)] = 0;
    }
    out.removed[static_cast<std::size_t>(i)] = removed;
  }
  return out;
}

Index PostedPriceMechanism::withdraw_on_no_sale(std::span<Index const>) const
{
  return -1;
}

void PostedPriceMechanism::fill_prices(std::int64_t step, std::span<Index const> remaining,
                                       Eigen::Ref<Eigen::VectorXd> out) const
{
  out = prices(step, remaining);
}

StaticPriceMechanism::StaticPriceMechanism(std::string id, ValuationModel market, Index buyers,
                                           Eigen::VectorXd prices)
  : PostedPriceMechanism(std::move(id), std::move(market), buyers)
  , prices_(std::move(prices))
{}

Eigen::VectorXd StaticPriceMechanism::prices(std::int64_t, std::span<Index const>) const
{
  return prices_;
}

void StaticPriceMechanism::fill_prices(std::int64_t, std::span<Index const>, Eigen::Ref<Eigen::VectorXd> out) const
{
  out = prices_;
}

LadderMechanism::LadderMechanism(std::string id, ValuationModel market, Index buyers, Eigen::MatrixXd table)
  : PostedPriceMechanism(std::move(id), std::move(market), buyers)
  , table_(std::move(table))
{
  if (table_.rows() != this->buyers() || table_.cols() != this->market().items())
  {
    throw ValidationError(this->id() + ": price table must be buyers x items");
  }
}

Eigen::VectorXd LadderMechanism::prices(std::int64_t step, std::span<Index const>) const
{
  return table_.row(step - 1).transpose();
}

void LadderMechanism::fill_prices(std::int64_t step, std::span<Index const>, Eigen::Ref<Eigen::VectorXd> out) const
{
  out = table_.row(step - 1).transpose();
}

DynamicSeparableMechanism::DynamicSeparableMechanism(ValuationModel market, Index buyers)
  : PostedPriceMechanism("dyn-sep", std::move(market), buyers)
{}

Eigen::VectorXd DynamicSeparableMechanism::prices(std::int64_t step, std::span<Index const> remaining) const
{
  return dynamic_separable_prices(step, remaining, market().alphas(), market().type_distribution(), buyers());
}

Index DynamicSeparableMechanism::withdraw_on_no_sale(std::span<Index const> remaining) const
{
  // Only a buyer priced into the zero-multiplier tail buys nothing.
  if (!remaining.empty() && market().is_dummy(remaining.back()))
  {
    return remaining.back();
  }
  return -1;
}

IndependentStepCache::IndependentStepCache(ValuationModel market, Index buyers, MechanismOptions options)
  : market_(std::move(market))
  , buyers_(buyers)
  , options_(std::move(options))
{
  auto const marginals = market_.marginals();
  item_class_.resize(marginals.size());
  for (std::size_t j = 0; j < marginals.size(); ++j)
  {
    item_class_[j] = static_cast<int>(j);
    if (!marginals[j])
    {
      item_class_[j] = -1;
      continue;
    }
    for (std::size_t k = 0; k < j; ++k)
    {
      if (marginals[k] && *marginals[k] == *marginals[j])
      {
        item_class_[j] = static_cast<int>(k);
        break;
      }
    }
  }
}

std::size_t IndependentStepCache::size() const
{
  std::lock_guard lock(mutex_);
  return memo_.size();
}

IndependentStepView IndependentStepCache::lookup(std::int64_t step, std::span<Index const> remaining) const
{
  IndependentStepView view;
  view.items.assign(remaining.begin(), remaining.end());
  auto const cls = [&](Index j) { return item_class_[static_cast<std::size_t>(j)]; };
  std::stable_sort(view.items.begin(), view.items.end(), [&](Index a, Index b) { return cls(a) < cls(b); });
  std::vector<int> key;
  key.reserve(view.items.size() + 1);
  key.push_back(static_cast<int>(buyers_ - step + 1));
  for (Index j : view.items)
  {
    key.push_back(cls(j));
  }
  std::lock_guard lock(mutex_);
  auto it = memo_.find(key);
  if (it == memo_.end())
  {
    it = memo_.emplace(std::move(key), compute(step, view.items)).first;
  }
  view.step = &it->second;
  return view;
}

IndependentStep IndependentStepCache::compute(std::int64_t step, std::span<Index const> ordered) const
{
  auto const k     = static_cast<Index>(ordered.size());
  Index const left = buyers_ - step + 1;
  auto const cls   = [&](Index p) { return item_class_[static_cast<std::size_t>(ordered[static_cast<std::size_t>(p)])]; };
  IndependentStep out;
  out.q      = Eigen::VectorXd::Ones(k);
  out.prices = Eigen::VectorXd::Constant(k, kUnavailable);
  if (k > left)
  {
    std::uint64_t const seed =
        mix64(options_.seed ^ mix64(static_cast<std::uint64_t>(k) << 32 | static_cast<std::uint64_t>(left)));
    out.q = estimate_match_probabilities(market_, left, ordered, options_.match_trials, seed).q;
    // Items of one class are exchangeable; pool their estimates.
    for (Index a = 0; a < k;)
    {
      Index b = a;
      while (b < k && cls(b) == cls(a))
      {
        ++b;
      }
      out.q.segment(a, b - a).setConstant(out.q.segment(a, b - a).mean());
      a = b;
    }
    if (double const total = out.q.sum(); total > 0.0)
    {
      out.q *= static_cast<double>(left) / total;
    }
  }

  std::vector<Distribution> marginals;
  std::vector<Index> positions;
  std::vector<double> targets;
  for (Index p = 0; p < k; ++p)
  {
    Index const item = ordered[static_cast<std::size_t>(p)];
    if (!market_.is_dummy(item) && out.q(p) > 0.0)
    {
      marginals.push_back(market_.marginal(item));
      positions.push_back(p);
      targets.push_back(out.q(p) / static_cast<double>(left));
    }
  }
  if (marginals.empty())
  {
    return out;
  }
  Eigen::VectorXd target_vec = Eigen::Map<Eigen::VectorXd const>(targets.data(), static_cast<Index>(targets.size()));
  // Rounding can push a full set of targets a hair above one.
  if (double const total = target_vec.sum(); total > 1.0)
  {
    target_vec /= total;
  }
  auto const solution = solve_purchase_prices(marginals, target_vec, options_.solver);
  out.solver_iterations = solution.iterations;
  for (std::size_t c = 0; c < positions.size(); ++c)
  {
    out.prices(positions[c]) = solution.prices(static_cast<Index>(c));
  }
  return out;
}

DynamicIndependentMechanism::DynamicIndependentMechanism(ValuationModel market, Index buyers,
                                                         std::shared_ptr<IndependentStepCache> cache)
  : PostedPriceMechanism("dyn-ind", std::move(market), buyers)
  , cache_(std::move(cache))
{}

Eigen::VectorXd DynamicIndependentMechanism::prices(std::int64_t step, std::span<Index const> remaining) const
{
  Eigen::VectorXd menu = Eigen::VectorXd::Constant(market().items(), kUnavailable);
  auto const view      = cache_->lookup(step, remaining);
  for (std::size_t p = 0; p < view.items.size(); ++p)
  {
    menu(view.items[p]) = view.step->prices(static_cast<Index>(p));
  }
  return menu;
}

Index DynamicIndependentMechanism::withdraw_on_no_sale(std::span<Index const> remaining) const
{
  for (Index j : remaining)
  {
    if (market().is_dummy(j))
    {
      return j;
    }
  }
  return -1;
}

QuantileAllocationMechanism::QuantileAllocationMechanism(ValuationModel market, Index buyers,
                                                         std::shared_ptr<IndependentStepCache> cache)
  : Mechanism("quantile", std::move(market), buyers)
  , cache_(std::move(cache))
{}

Index QuantileAllocationMechanism::allocate(std::int64_t step, std::span<Index const> remaining,
                                            Eigen::Ref<Eigen::VectorXd const> values, Rng &aux) const
{
  auto const view = cache_->lookup(step, remaining);
  std::vector<double> q(remaining.size(), 0.0);
  for (std::size_t p = 0; p < view.items.size(); ++p)
  {
    auto const slot = std::lower_bound(remaining.begin(), remaining.end(), view.items[p]) - remaining.begin();
    q[static_cast<std::size_t>(slot)] = view.step->q(static_cast<Index>(p));
  }
  // Compare log R_j = log F_j(v_j) / q_j. Dummies draw in item order.
  Index best       = 0;
  double best_score = -kInf;
  for (std::size_t slot = 0; slot < remaining.size(); ++slot)
  {
    Index const item = remaining[slot];
    if (q[slot] <= 0.0)
    {
      continue;
    }
    double const u = market().is_dummy(item) ? Distribution::canonical(aux) : market().marginal(item).cdf(values(item));
    double const score = std::log(u) / q[slot];
    if (score > best_score)
    {
      best_score = score;
      best       = static_cast<Index>(slot);
    }
  }
  return best;
}

MarketRun QuantileAllocationMechanism::run(ValuationProfile const &profile, Rng &aux) const
{
  if (profile.buyers() != buyers() || profile.items() != market().items())
  {
    throw ValidationError(id() + ": profile shape does not match the market");
  }
  MarketRun out;
  auto remaining = all_items(market().items());
  for (Index i = 0; i < buyers(); ++i)
  {
    PurchaseDecision decision;
    decision.buyer = i;
    Index removed  = -1;
    if (!remaining.empty())
    {
      Eigen::VectorXd const values = profile.values.row(i).transpose();
      removed = remaining[static_cast<std::size_t>(allocate(i + 1, remaining, values, aux))];
      if (!market().is_dummy(removed))
      {
        decision.bundle  = {removed};
        decision.value   = values(removed);
        decision.utility = decision.value;
      }
      erase_item(remaining, removed);
    }
    out.decisions.push_back(std::move(decision));
    out.removed.push_back(removed);
  }
  return out;
}

VcgMechanism::VcgMechanism(ValuationModel market, Index buyers)
  : Mechanism("vcg", std::move(market), buyers)
{}

MarketRun VcgMechanism::run(ValuationProfile const &profile, Rng &) const
{
  auto const outcome = vcg_separable(market().alphas(), profile.types);
  MarketRun out;
  for (Index i = 0; i < profile.buyers(); ++i)
  {
    PurchaseDecision decision;
    decision.buyer   = i;
    Index const item = outcome.item_of_buyer[static_cast<std::size_t>(i)];
    if (item >= 0 && !market().is_dummy(item))
    {
      decision.bundle  = {item};
      decision.value   = profile.values(i, item);
      decision.paid    = outcome.payments(i);
      decision.utility = decision.value - decision.paid;
    }
    out.decisions.push_back(std::move(decision));
    out.removed.push_back(item);
  }
  return out;
}

std::vector<std::string_view> mechanism_ids()
{
  return {"ladder", "mdp", "static-ind", "dyn-ind", "static-sep", "dyn-sep", "sub-dyn",
          "sub-static", "add-static", "add-dyn", "vcg", "quantile", "static-p"};
}

std::shared_ptr<Mechanism const> make_mechanism(std::string_view id, ValuationModel const &model, Index n,
                                                MechanismOptions const &options)
{
  using K = ValuationKind;
  std::string const name(id);
  if (n < 1)
  {
    throw ConfigError(name + ": need at least one buyer");
  }
  Index const m = model.items();
  auto single_item_table = [&](auto &&price_of_step) {
    require_single_item(model, name);
    Index const item      = single_real_item(model);
    Eigen::MatrixXd table = Eigen::MatrixXd::Constant(n, m, kUnavailable);
    for (Index i = 0; i < n; ++i)
    {
      table(i, item) = price_of_step(i);
    }
    return table;
  };

  if (id == "ladder")
  {
    Eigen::VectorXd const ladder = [&] {
      require_single_item(model, name);
      return single_item_ladder(model.marginal(single_real_item(model)), n);
    }();
    return std::make_shared<LadderMechanism>(name, model, n, single_item_table([&](Index i) { return ladder(i); }));
  }
  if (id == "mdp")
  {
    require_single_item(model, name);
    auto const mdp = mdp_optimal_prices(model.marginal(single_real_item(model)), n);
    return std::make_shared<LadderMechanism>(name, model, n,
                                             single_item_table([&](Index i) { return mdp.price_for_step(i + 1); }));
  }
  if (id == "static-p")
  {
    require_kind(model, name, {K::IndependentUnitDemand, K::AdditiveIndependent});
    if (!(options.static_price >= 0.0))
    {
      throw ConfigError("static-p: the posted price must be >= 0");
    }
    Eigen::VectorXd prices(m);
    for (Index j = 0; j < m; ++j)
    {
      prices(j) = model.is_dummy(j) ? kUnavailable : options.static_price;
    }
    return std::make_shared<StaticPriceMechanism>(name, model, n, prices);
  }
  if (id == "static-ind")
  {
    require_kind(model, name, {K::IndependentUnitDemand});
    return std::make_shared<StaticPriceMechanism>(name, model, n, static_independent_prices(model, n));
  }
  if (id == "dyn-ind" || id == "quantile")
  {
    require_kind(model, name, {K::IndependentUnitDemand});
    ValuationModel market = m < n ? pad_to_square(model, n) : model;
    auto cache            = std::make_shared<IndependentStepCache>(market, n, options);
    if (id == "dyn-ind")
    {
      return std::make_shared<DynamicIndependentMechanism>(std::move(market), n, std::move(cache));
    }
    return std::make_shared<QuantileAllocationMechanism>(std::move(market), n, std::move(cache));
  }
  if (id == "static-sep")
  {
    require_kind(model, name, {K::Separable});
    auto const plan = static_separable_prices(model.alphas(), model.type_distribution(), n);
    return std::make_shared<StaticPriceMechanism>(name, model, n, plan.prices);
  }
  if (id == "dyn-sep")
  {
    require_kind(model, name, {K::Separable});
    return std::make_shared<DynamicSeparableMechanism>(pad_to_square(model, n), n);
  }
  if (id == "vcg")
  {
    require_kind(model, name, {K::Separable});
    return std::make_shared<VcgMechanism>(model, n);
  }
  if (id == "sub-dyn")
  {
    require_kind(model, name, {K::IndependentUnitDemand, K::AdditiveIndependent});
    auto const plan = subadditive_group_prices(model, n);
    Eigen::MatrixXd table(n, m);
    for (Index i = 0; i < n; ++i)
    {
      table.row(i) = plan.menu(i).transpose();
    }
    return std::make_shared<LadderMechanism>(name, model, n, std::move(table));
  }
  if (id == "sub-static")
  {
    require_kind(model, name, {K::IndependentUnitDemand, K::AdditiveIndependent});
    return std::make_shared<StaticPriceMechanism>(name, model, n, subadditive_static_prices(model, n));
  }
  if (id == "add-static")
  {
    require_kind(model, name, {K::AdditiveIndependent});
    return std::make_shared<StaticPriceMechanism>(name, model, n, additive_static_prices(model, n));
  }
  if (id == "add-dyn")
  {
    require_kind(model, name, {K::AdditiveIndependent});
    return std::make_shared<LadderMechanism>(name, model, n, additive_dynamic_ladders(model, n));
  }
  std::string valid;
  for (auto v : mechanism_ids())
  {
    valid += (valid.empty() ? "" : ", ") + std::string(v);
  }
  throw ConfigError("unknown mechanism '" + name + "' (valid: " + valid + ")");
}

}  // namespace ppm
