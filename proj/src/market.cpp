#include "ppm/market.hpp"

#include "ppm/error.hpp"

#include <cmath>
#include <cstdio>
#include <regex>

namespace ppm {

namespace {

std::string trim(std::string_view s)
{
  auto const begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos)
  {
    return {};
  }
  auto const end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

/// Splits on commas that are not nested inside parentheses or brackets.
std::vector<std::string> split_top_level(std::string_view s)
{
  std::vector<std::string> parts;
  int depth         = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
  {
    char const c = s[i];
    if (c == '(' || c == '[')
    {
      ++depth;
    }
    else if (c == ')' || c == ']')
    {
      --depth;
    }
    else if (c == ',' && depth == 0)
    {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  auto last = trim(s.substr(start));
  if (!last.empty() || !parts.empty())
  {
    parts.push_back(std::move(last));
  }
  return parts;
}

std::string strip_brackets(std::string const &s, std::string const &context)
{
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
  {
    throw ConfigError("expected a bracketed list in " + context + ", got '" + s + "'");
  }
  return s.substr(1, s.size() - 2);
}

std::vector<Distribution> parse_marginals(std::string const &body)
{
  std::vector<Distribution> result;
  for (auto const &part : split_top_level(strip_brackets(trim(body), "marginal list")))
  {
    result.push_back(Distribution::parse(part));
  }
  if (result.empty())
  {
    throw ConfigError("marginal list must not be empty");
  }
  return result;
}

void validate_alphas(Eigen::VectorXd const &alphas)
{
  if (alphas.size() == 0)
  {
    throw ConfigError("separable: alphas must not be empty");
  }
  for (Index j = 0; j < alphas.size(); ++j)
  {
    if (!std::isfinite(alphas(j)) || alphas(j) < 0.0)
    {
      throw ConfigError("separable: alphas must be finite and non-negative");
    }
    if (j > 0 && alphas(j) > alphas(j - 1))
    {
      throw ConfigError("separable: alphas must be sorted non-increasing");
    }
  }
}

std::string format_number(double v)
{
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.10g", v);
  return buffer;
}

}  // namespace

ValuationModel ValuationModel::independent(std::vector<Distribution> marginals)
{
  if (marginals.empty())
  {
    throw ConfigError("independent: at least one item is required");
  }
  ValuationModel model;
  model.kind_ = ValuationKind::IndependentUnitDemand;
  model.marginals_.assign(marginals.begin(), marginals.end());
  return model;
}

ValuationModel ValuationModel::additive(std::vector<Distribution> marginals)
{
  auto model  = independent(std::move(marginals));
  model.kind_ = ValuationKind::AdditiveIndependent;
  return model;
}

ValuationModel ValuationModel::separable(Eigen::VectorXd alphas, Distribution type)
{
  validate_alphas(alphas);
  ValuationModel model;
  model.kind_   = ValuationKind::Separable;
  model.alphas_ = std::move(alphas);
  model.type_   = type;
  return model;
}

ValuationModel ValuationModel::parse(std::string_view text)
{
  auto const colon = text.find(':');
  if (colon == std::string_view::npos)
  {
    throw ConfigError("model '" + std::string(text) +
                      "' must start with independent:, separable: or additive:");
  }
  auto const head = trim(text.substr(0, colon));
  auto const body = trim(text.substr(colon + 1));
  if (head == "independent")
  {
    return independent(parse_marginals(body));
  }
  if (head == "additive")
  {
    return additive(parse_marginals(body));
  }
  if (head == "separable")
  {
    std::optional<Eigen::VectorXd> alphas;
    std::optional<Distribution> type;
    for (auto const &field : split_top_level(body))
    {
      auto const eq = field.find('=');
      if (eq == std::string::npos)
      {
        throw ConfigError("separable: expected key=value, got '" + field + "'");
      }
      auto const key   = trim(std::string_view(field).substr(0, eq));
      auto const value = trim(std::string_view(field).substr(eq + 1));
      if (key == "alphas")
      {
        auto const items = split_top_level(strip_brackets(value, "alphas"));
        Eigen::VectorXd a(static_cast<Index>(items.size()));
        for (std::size_t j = 0; j < items.size(); ++j)
        {
          try
          {
            a(static_cast<Index>(j)) = std::stod(items[j]);
          }
          catch (std::logic_error const &)
          {
            throw ConfigError("separable: bad alpha '" + items[j] + "'");
          }
        }
        alphas = std::move(a);
      }
      else if (key == "type")
      {
        type = Distribution::parse(value);
      }
      else
      {
        throw ConfigError("separable: unknown key '" + key + "'");
      }
    }
    if (!alphas || !type)
    {
      throw ConfigError("separable: both alphas=[...] and type=... are required");
    }
    return separable(std::move(*alphas), *type);
  }
  throw ConfigError("unknown model family '" + head + "' (expected independent, separable, additive)");
}

Index ValuationModel::items() const noexcept
{
  return kind_ == ValuationKind::Separable ? alphas_.size() : static_cast<Index>(marginals_.size());
}

Index ValuationModel::real_items() const noexcept
{
  Index count = 0;
  for (Index j = 0; j < items(); ++j)
  {
    count += is_dummy(j) ? 0 : 1;
  }
  return count;
}

bool ValuationModel::is_dummy(Index item) const
{
  if (item < 0 || item >= items())
  {
    throw DomainError("item index out of range");
  }
  if (kind_ == ValuationKind::Separable)
  {
    return alphas_(item) == 0.0;
  }
  return !marginals_[static_cast<std::size_t>(item)].has_value();
}

Distribution const &ValuationModel::marginal(Index item) const
{
  if (kind_ == ValuationKind::Separable)
  {
    throw ConfigError("separable models have no independent marginals");
  }
  if (is_dummy(item))
  {
    throw DomainError("dummy items carry no distribution");
  }
  return *marginals_[static_cast<std::size_t>(item)];
}

bool ValuationModel::identical_marginals() const
{
  if (kind_ == ValuationKind::Separable)
  {
    return true;
  }
  std::optional<Distribution> first;
  for (auto const &m : marginals_)
  {
    if (!m)
    {
      continue;
    }
    if (!first)
    {
      first = m;
    }
    else if (!(*m == *first))
    {
      return false;
    }
  }
  return true;
}

Distribution const &ValuationModel::type_distribution() const
{
  if (!type_)
  {
    throw ConfigError("only separable models have a type distribution");
  }
  return *type_;
}

ValuationModel ValuationModel::with_dummies(Index count) const
{
  ValuationModel copy = *this;
  if (count <= 0)
  {
    return copy;
  }
  if (kind_ == ValuationKind::Separable)
  {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(alphas_.size() + count);
    a.head(alphas_.size()) = alphas_;
    copy.alphas_ = std::move(a);
  }
  else
  {
    copy.marginals_.resize(marginals_.size() + static_cast<std::size_t>(count));
  }
  return copy;
}

ValuationModel ValuationModel::truncated(Index count) const
{
  if (kind_ != ValuationKind::Separable)
  {
    throw ConfigError("only separable models can drop items");
  }
  ValuationModel copy = *this;
  copy.alphas_        = alphas_.head(std::min(count, alphas_.size())).eval();
  return copy;
}

std::string ValuationModel::to_string() const
{
  std::string out;
  if (kind_ == ValuationKind::Separable)
  {
    out = "separable: alphas=[";
    for (Index j = 0; j < alphas_.size(); ++j)
    {
      out += (j ? "," : "") + format_number(alphas_(j));
    }
    return out + "], type=" + type_->to_string();
  }
  out = kind_ == ValuationKind::AdditiveIndependent ? "additive: [" : "independent: [";
  for (std::size_t j = 0; j < marginals_.size(); ++j)
  {
    out += (j ? ", " : "") + (marginals_[j] ? marginals_[j]->to_string() : std::string("dummy"));
  }
  return out + "]";
}

ValuationProfile sample_profile(ValuationModel const &model, Index n, Rng &rng)
{
  if (n < 1)
  {
    throw DomainError("sample_profile: n must be >= 1");
  }
  Index const m = model.items();
  ValuationProfile profile{Eigen::MatrixXd::Zero(n, m), Eigen::VectorXd()};
  if (model.kind() == ValuationKind::Separable)
  {
    profile.types.resize(n);
    auto const &type = model.type_distribution();
    for (Index i = 0; i < n; ++i)
    {
      profile.types(i) = type.sample(rng);
    }
    profile.values.noalias() = profile.types * model.alphas().transpose();
    return profile;
  }
  for (Index i = 0; i < n; ++i)
  {
    for (Index j = 0; j < m; ++j)
    {
      auto const &marginal = model.marginals()[static_cast<std::size_t>(j)];
      if (marginal)
      {
        profile.values(i, j) = marginal->sample(rng);
      }
    }
  }
  return profile;
}

PurchaseDecision best_response(ValuationModel const &model, Eigen::Ref<Eigen::VectorXd const> values,
                               Eigen::Ref<Eigen::VectorXd const> prices, Index buyer)
{
  if (values.size() != prices.size() || values.size() != model.items())
  {
    throw ValidationError("best_response: value/price lengths do not match the model");
  }
  if (values.hasNaN() || prices.hasNaN())
  {
    throw ValidationError("best_response: NaN value or price");
  }
  PurchaseDecision decision;
  decision.buyer = buyer;
  if (model.unit_demand())
  {
    Index best         = -1;
    double best_margin = 0.0;
    for (Index j = 0; j < values.size(); ++j)
    {
      double const margin = values(j) - prices(j);
      if (margin > best_margin)
      {
        best        = j;
        best_margin = margin;
      }
    }
    if (best >= 0)
    {
      decision.bundle  = {best};
      decision.paid    = prices(best);
      decision.value   = values(best);
      decision.utility = values(best) - prices(best);
    }
    return decision;
  }
  for (Index j = 0; j < values.size(); ++j)
  {
    if (values(j) > prices(j))
    {
      decision.bundle.push_back(j);
      decision.paid += prices(j);
      decision.value += values(j);
    }
  }
  decision.utility = decision.value - decision.paid;
  return decision;
}

ValuationModel pad_to_square(ValuationModel const &model, Index n)
{
  Index const m = model.items();
  if (m == n)
  {
    return model;
  }
  if (m < n)
  {
    return model.with_dummies(n - m);
  }
  if (model.kind() == ValuationKind::Separable)
  {
    return model.truncated(n);
  }
  throw DomainError("pad_to_square: independent models with m > n cannot be squared");
}

}  // namespace ppm
