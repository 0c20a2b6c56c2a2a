#include "ppm/fixed_point.hpp"

#include "ppm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ppm {

namespace {

using Eigen::Index;

double purchase_probability(std::span<Distribution const> marginals, Eigen::Ref<Eigen::VectorXd const> x, Index j)
{
  auto const &own = marginals[static_cast<std::size_t>(j)];
  double const u0 = own.cdf(x(j));
  if (u0 >= 1.0)
  {
    return 0.0;
  }
  // Kinks of the integrand: other items entering or saturating their support.
  std::vector<double> breaks{u0, 1.0};
  for (Index k = 0; k < x.size(); ++k)
  {
    if (k == j)
    {
      continue;
    }
    auto const &other = marginals[static_cast<std::size_t>(k)];
    for (double edge : {other.support_lower(), other.support_upper()})
    {
      if (std::isfinite(edge))
      {
        double const u = own.cdf(x(j) - x(k) + edge);
        if (u > u0 && u < 1.0)
        {
          breaks.push_back(u);
        }
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](double u) {
    double const t = own.quantile_closed(u);
    double product = 1.0;
    for (Index k = 0; k < x.size() && product > 0.0; ++k)
    {
      if (k != j)
      {
        product *= marginals[static_cast<std::size_t>(k)].cdf(t - x(j) + x(k));
      }
    }
    return product;
  };
  return integrate_pieces(integrand, breaks, {1e-11, 12});
}

Eigen::VectorXd upper_bounds(std::span<Distribution const> marginals, Eigen::Ref<Eigen::VectorXd const> targets)
{
  Eigen::VectorXd caps(targets.size());
  for (Index j = 0; j < targets.size(); ++j)
  {
    caps(j) = marginals[static_cast<std::size_t>(j)].upper_quantile(targets(j));
  }
  return caps;
}

}  // namespace

Eigen::VectorXd purchase_probabilities(std::span<Distribution const> marginals, Eigen::Ref<Eigen::VectorXd const> prices)
{
  if (static_cast<Index>(marginals.size()) != prices.size())
  {
    throw ValidationError("purchase_probabilities: one price per marginal required");
  }
  Eigen::VectorXd r(prices.size());
  for (Index j = 0; j < prices.size(); ++j)
  {
    r(j) = purchase_probability(marginals, prices, j);
  }
  return r;
}

Eigen::VectorXd purchase_fixed_point_map(std::span<Distribution const> marginals,
                                         Eigen::Ref<Eigen::VectorXd const> targets,
                                         Eigen::Ref<Eigen::VectorXd const> prices)
{
  Eigen::VectorXd const r = purchase_probabilities(marginals, prices);
  return (r.array() / targets.array() * prices.array()).matrix();
}

FixedPointResult solve_purchase_prices(std::span<Distribution const> marginals,
                                       Eigen::Ref<Eigen::VectorXd const> targets,
                                       FixedPointSettings const &settings)
{
  Index const k = targets.size();
  if (static_cast<Index>(marginals.size()) != k)
  {
    throw ValidationError("solve_purchase_prices: one target per marginal required");
  }
  if ((targets.array() <= 0.0).any() || targets.sum() > 1.0 + 1e-9)
  {
    throw DomainError("solve_purchase_prices: targets must be positive and sum to at most 1");
  }

  FixedPointResult result;
  Eigen::VectorXd const caps = upper_bounds(marginals, targets);
  Eigen::VectorXd x          = caps;
  Eigen::VectorXd r          = purchase_probabilities(marginals, x);
  Eigen::VectorXd residual   = r - targets;
  auto clamp = [&](Eigen::VectorXd v) { return v.cwiseMax(0.0).cwiseMin(caps).eval(); };
  auto finish = [&](bool converged) {
    result.prices        = x;
    result.probabilities = r;
    result.residuals     = residual;
    result.converged     = converged;
    return result;
  };

  for (int it = 0; it < settings.max_iterations; ++it)
  {
    double const norm = residual.cwiseAbs().maxCoeff();
    if (norm <= settings.tolerance)
    {
      return finish(true);
    }
    result.iterations = it + 1;
    if (it < settings.map_iterations)
    {
      Eigen::VectorXd const phi = (r.array() / targets.array() * x.array()).matrix();
      x = clamp((1.0 - settings.damping) * x + settings.damping * phi);
    }
    else
    {
      // Forward-difference Jacobian of r; backward at the upper bound.
      Eigen::MatrixXd jac(k, k);
      for (Index j = 0; j < k; ++j)
      {
        double h = 1e-7 * std::max(1.0, std::abs(x(j)));
        if (x(j) + h > caps(j))
        {
          h = -h;
        }
        Eigen::VectorXd shifted = x;
        shifted(j) += h;
        jac.col(j) = (purchase_probabilities(marginals, shifted) - r) / h;
      }
      // Coordinates pinned at a bound with the step pushing outward are frozen.
      std::vector<Index> free;
      Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-residual);
      for (Index j = 0; j < k; ++j)
      {
        bool const at_low  = x(j) <= 0.0 && step(j) < 0.0;
        bool const at_high = x(j) >= caps(j) && step(j) > 0.0;
        if (!at_low && !at_high)
        {
          free.push_back(j);
        }
      }
      if (static_cast<Index>(free.size()) < k && !free.empty())
      {
        Eigen::MatrixXd reduced(k, static_cast<Index>(free.size()));
        for (std::size_t c = 0; c < free.size(); ++c)
        {
          reduced.col(static_cast<Index>(c)) = jac.col(free[c]);
        }
        Eigen::VectorXd const partial = reduced.completeOrthogonalDecomposition().solve(-residual);
        step.setZero();
        for (std::size_t c = 0; c < free.size(); ++c)
        {
          step(free[c]) = partial(static_cast<Index>(c));
        }
      }
      double const base = residual.squaredNorm();
      double scale      = 1.0;
      bool improved     = false;
      for (int halving = 0; halving < 40; ++halving, scale *= 0.5)
      {
        Eigen::VectorXd const candidate = clamp(x + scale * step);
        Eigen::VectorXd const rc        = purchase_probabilities(marginals, candidate);
        if ((rc - targets).squaredNorm() < base)
        {
          x        = candidate;
          improved = true;
          break;
        }
      }
      if (!improved)
      {
        r        = purchase_probabilities(marginals, x);
        residual = r - targets;
        result.residual_trace.push_back(residual.cwiseAbs().maxCoeff());
        break;
      }
    }
    r        = purchase_probabilities(marginals, x);
    residual = r - targets;
    result.residual_trace.push_back(residual.cwiseAbs().maxCoeff());
  }
  if (residual.cwiseAbs().maxCoeff() <= settings.tolerance)
  {
    return finish(true);
  }
  auto diagnostics         = finish(false);
  std::string const message = "solve_purchase_prices: no convergence after " +
                              std::to_string(diagnostics.iterations) + " iterations (max residual " +
                              std::to_string(diagnostics.residuals.cwiseAbs().maxCoeff()) + ")";
  throw FixedPointError(message, std::move(diagnostics));
}

}  // namespace ppm
