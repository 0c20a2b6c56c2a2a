#include "ppm/oracle.hpp"

#include "ppm/error.hpp"
#include "ppm/matching.hpp"
#include "ppm/order_stats.hpp"
#include "ppm/parallel.hpp"
#include "ppm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace ppm {

double separable_optimum(Eigen::Ref<Eigen::VectorXd const> alphas, Eigen::Ref<Eigen::VectorXd const> types)
{
  for (Index j = 1; j < alphas.size(); ++j)
  {
    if (alphas(j) > alphas(j - 1))
    {
      throw ConfigError("separable_optimum: alphas must be non-increasing");
    }
  }
  std::vector<double> sorted(types.data(), types.data() + types.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double welfare    = 0.0;
  auto const common = std::min<std::size_t>(sorted.size(), static_cast<std::size_t>(alphas.size()));
  for (std::size_t j = 0; j < common; ++j)
  {
    welfare += alphas(static_cast<Index>(j)) * sorted[j];
  }
  return welfare;
}

double subadditive_upper_bound(std::span<std::optional<Distribution> const> marginals, std::int64_t n)
{
  double bound = 0.0;
  for (auto const &marginal : marginals)
  {
    if (marginal)
    {
      bound += max_expectation(*marginal, n);
    }
  }
  return bound;
}

double exante_item_bound(Distribution const &dist, double q1, std::int64_t n)
{
  if (!(q1 > 0.0 && q1 <= 1.0) || n < 1)
  {
    throw DomainError("exante_item_bound: need 0 < q1 <= 1 and n >= 1");
  }
  double const threshold = dist.upper_quantile(q1 / static_cast<double>(n));
  return q1 * dist.conditional_mean_above(threshold);
}

MatchProbabilities estimate_match_probabilities(ValuationModel const &model, Index buyers,
                                                std::span<Index const> remaining, std::int64_t trials,
                                                std::uint64_t seed)
{
  if (trials < 1 || buyers < 1)
  {
    throw DomainError("estimate_match_probabilities: need trials >= 1 and buyers >= 1");
  }
  auto const k = static_cast<Index>(remaining.size());
  unsigned const workers = worker_count();
  std::vector<Eigen::VectorXi> counts(workers, Eigen::VectorXi::Zero(k));
  parallel_for(
      static_cast<std::size_t>(trials),
      [&](unsigned worker, std::size_t t) {
        Rng rng             = stream(seed, t);
        auto const profile  = sample_profile(model, buyers, rng);
        Eigen::MatrixXd sub(buyers, k);
        for (Index c = 0; c < k; ++c)
        {
          sub.col(c) = profile.values.col(remaining[static_cast<std::size_t>(c)]);
        }
        auto const matching = max_weight_matching(sub);
        for (Index c = 0; c < k; ++c)
        {
          counts[worker](c) += matching.item_matched[static_cast<std::size_t>(c)] ? 1 : 0;
        }
      },
      workers);
  Eigen::VectorXi total = Eigen::VectorXi::Zero(k);
  for (auto const &c : counts)
  {
    total += c;
  }
  MatchProbabilities result;
  result.trials = trials;
  result.q      = total.cast<double>() / static_cast<double>(trials);
  result.se     = (result.q.array() * (1.0 - result.q.array()) / static_cast<double>(trials)).sqrt();
  return result;
}

OracleKind parse_oracle(std::string_view name)
{
  if (name == "auto")
  {
    return OracleKind::Auto;
  }
  if (name == "matching")
  {
    return OracleKind::Matching;
  }
  if (name == "separable")
  {
    return OracleKind::SeparableClosedForm;
  }
  if (name == "itemwise")
  {
    return OracleKind::ItemwiseMax;
  }
  if (name == "single")
  {
    return OracleKind::SingleItemMax;
  }
  throw ConfigError("unknown oracle '" + std::string(name) +
                    "' (valid: auto, matching, separable, itemwise, single)");
}

std::string_view to_string(OracleKind kind)
{
  switch (kind)
  {
  case OracleKind::Auto:
    return "auto";
  case OracleKind::Matching:
    return "matching";
  case OracleKind::SeparableClosedForm:
    return "separable";
  case OracleKind::ItemwiseMax:
    return "itemwise";
  case OracleKind::SingleItemMax:
    return "single";
  }
  return "auto";
}

double offline_welfare(ValuationModel const &model, ValuationProfile const &profile, OracleKind kind)
{
  std::vector<Index> real;
  for (Index j = 0; j < model.items(); ++j)
  {
    if (!model.is_dummy(j))
    {
      real.push_back(j);
    }
  }
  if (kind == OracleKind::Auto)
  {
    if (model.kind() == ValuationKind::Separable)
    {
      kind = OracleKind::SeparableClosedForm;
    }
    else if (model.kind() == ValuationKind::AdditiveIndependent)
    {
      kind = OracleKind::ItemwiseMax;
    }
    else
    {
      kind = real.size() == 1 ? OracleKind::SingleItemMax : OracleKind::Matching;
    }
  }
  if (real.empty())
  {
    return 0.0;
  }
  switch (kind)
  {
  case OracleKind::SeparableClosedForm:
    if (model.kind() != ValuationKind::Separable)
    {
      throw ConfigError("separable oracle requires a separable model");
    }
    return separable_optimum(model.alphas(), profile.types);
  case OracleKind::ItemwiseMax:
  {
    if (model.kind() != ValuationKind::AdditiveIndependent)
    {
      throw ConfigError("itemwise oracle requires additive buyers");
    }
    double sum = 0.0;
    for (Index j : real)
    {
      sum += profile.values.col(j).maxCoeff();
    }
    return sum;
  }
  case OracleKind::SingleItemMax:
    if (real.size() != 1 || !model.unit_demand())
    {
      throw ConfigError("single-item oracle requires exactly one real item");
    }
    return profile.values.col(real.front()).maxCoeff();
  case OracleKind::Matching:
  {
    if (!model.unit_demand())
    {
      throw ConfigError("matching oracle requires unit-demand buyers");
    }
    Eigen::MatrixXd sub(profile.buyers(), static_cast<Index>(real.size()));
    for (std::size_t c = 0; c < real.size(); ++c)
    {
      sub.col(static_cast<Index>(c)) = profile.values.col(real[c]);
    }
    return max_weight_matching(sub).welfare;
  }
  case OracleKind::Auto:
    break;
  }
  return 0.0;
}

}  // namespace ppm
