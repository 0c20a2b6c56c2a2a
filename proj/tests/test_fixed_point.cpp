#include "ppm/fixed_point.hpp"
#include "ppm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ppm;
using Eigen::Index;
using Eigen::VectorXd;

namespace {

// Purchase frequencies of a unit-demand buyer, counted directly from draws.
VectorXd simulate_purchases(std::vector<Distribution> const &d, VectorXd const &prices, int reps, std::uint64_t seed)
{
  Rng rng = stream(seed, 0);
  VectorXd freq = VectorXd::Zero(static_cast<Index>(d.size()));
  for (int r = 0; r < reps; ++r)
  {
    Index best = -1;
    double best_u = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j)
    {
      double const u = d[j].sample(rng) - prices(static_cast<Index>(j));
      if (u > best_u)
      {
        best_u = u;
        best = static_cast<Index>(j);
      }
    }
    if (best >= 0)
    {
      freq(best) += 1.0;
    }
  }
  return freq / reps;
}

}  // namespace

TEST_CASE("single item reproduces the ladder")
{
  for (auto const &d : {Distribution::exponential(1.0), Distribution::uniform(0, 1), Distribution::weibull(2, 1)})
  {
    std::vector<Distribution> one{d};
    for (int k : {1, 2, 5, 40})
    {
      auto const r = solve_purchase_prices(one, VectorXd::Constant(1, 1.0 / k));
      CHECK(r.converged);
      CHECK(std::abs(r.prices(0) - d.upper_quantile(1.0 / k)) <= 1e-6);
    }
  }
}

TEST_CASE("purchase probabilities in closed form")
{
  // two i.i.d. Exp(1) at prices (x, 0): item 1 wins when v1 - x > v2, probability e^{-x}/2
  std::vector<Distribution> iid(2, Distribution::exponential(1.0));
  VectorXd x(2);
  x << 0.7, 0.0;
  auto const r = purchase_probabilities(iid, x);
  CHECK(r(0) == doctest::Approx(std::exp(-0.7) / 2).epsilon(1e-8));
  CHECK(r(1) == doctest::Approx(1 - std::exp(-0.7) / 2).epsilon(1e-8));
  // symmetric prices p: item 1 sells when v1 > max(v2, p)
  x << 1.3, 1.3;
  auto const s = purchase_probabilities(iid, x);
  CHECK(s(0) == doctest::Approx(std::exp(-1.3) - std::exp(-2.6) / 2).epsilon(1e-8));
  CHECK(s(1) == doctest::Approx(s(0)).epsilon(1e-12));
  // phi leaves a solution in place
  auto const fx = purchase_fixed_point_map(iid, s, x);
  CHECK(fx(0) == doctest::Approx(1.3).epsilon(1e-8));
}

TEST_CASE("two i.i.d. exponentials split the sale")
{
  std::vector<Distribution> iid(2, Distribution::exponential(1.0));
  auto const r = solve_purchase_prices(iid, VectorXd::Constant(2, 0.5));
  CHECK(r.converged);
  CHECK(r.residuals.cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(std::abs(r.prices(0) - r.prices(1)) <= 1e-6);
  CHECK(r.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-8));
  auto const mc = simulate_purchases(iid, r.prices, 400000, 17);
  for (Index j = 0; j < 2; ++j)
  {
    CHECK(std::abs(mc(j) - 0.5) <= 4 * std::sqrt(0.25 / 400000));
  }
  CHECK_FALSE(r.residual_trace.empty());
  CHECK(r.residual_trace.back() <= 1e-8);
}

TEST_CASE("mixed marginals and partial targets")
{
  std::vector<Distribution> d{Distribution::exponential(1.0), Distribution::uniform(0, 2), Distribution::weibull(2, 1)};
  for (VectorXd t : {VectorXd((VectorXd(3) << 0.2, 0.3, 0.1).finished()),
                     VectorXd((VectorXd(3) << 0.5, 0.3, 0.2).finished()),
                     VectorXd((VectorXd(3) << 1.0 / 3, 1.0 / 3, 1.0 / 3).finished())})
  {
    auto const r = solve_purchase_prices(d, t);
    CHECK(r.converged);
    CHECK(r.residuals.cwiseAbs().maxCoeff() <= 1e-8);
    for (Index j = 0; j < 3; ++j)
    {
      CHECK(r.prices(j) >= 0.0);
      CHECK(r.prices(j) <= d[static_cast<std::size_t>(j)].upper_quantile(t(j)) + 1e-9);
    }
    auto const mc = simulate_purchases(d, r.prices, 200000, 23);
    for (Index j = 0; j < 3; ++j)
    {
      CHECK(std::abs(mc(j) - t(j)) <= 4 * std::sqrt(t(j) * (1 - t(j)) / 200000));
    }
  }
}

TEST_CASE("fixed point errors")
{
  std::vector<Distribution> iid(2, Distribution::exponential(1.0));
  CHECK_THROWS_AS(solve_purchase_prices(iid, VectorXd::Constant(2, 0.6)), DomainError);
  CHECK_THROWS_AS(solve_purchase_prices(iid, VectorXd::Constant(2, 0.0)), DomainError);
  CHECK_THROWS_AS(solve_purchase_prices(iid, VectorXd::Constant(3, 0.2)), ValidationError);

  FixedPointSettings tight;
  tight.max_iterations = 1;
  tight.map_iterations = 1;
  tight.tolerance = 1e-15;
  std::vector<Distribution> d{Distribution::exponential(1.0), Distribution::uniform(0, 2), Distribution::weibull(2, 1)};
  try
  {
    solve_purchase_prices(d, VectorXd::Constant(3, 1.0 / 3), tight);
    FAIL("expected FixedPointError");
  }
  catch (FixedPointError const &e)
  {
    CHECK_FALSE(e.diagnostics().converged);
    CHECK(e.diagnostics().residuals.size() == 3);
    CHECK(e.diagnostics().iterations >= 1);
  }
}
