#include "ppm/distribution.hpp"
#include "ppm/error.hpp"
#include "ppm/numeric.hpp"
#include "ppm/order_stats.hpp"
#include "ppm/quantile_lemmas.hpp"
#include "ppm/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace ppm;

namespace {

std::vector<Distribution> families()
{
  return {Distribution::exponential(1.0), Distribution::uniform(0.0, 1.0), Distribution::weibull(2.0, 1.0),
          Distribution::exponential(2.5), Distribution::uniform(1.0, 3.0), Distribution::weibull(1.5, 2.0)};
}

// Mean of the k-th highest of n draws, estimated by sorting samples.
std::pair<double, double> empirical_order_stat(Distribution const &d, int n, int k, int reps, std::uint64_t seed)
{
  Rng rng = stream(seed, 0, 3);
  std::vector<double> draw(static_cast<std::size_t>(n));
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < reps; ++r)
  {
    for (auto &x : draw)
    {
      x = d.sample(rng);
    }
    std::nth_element(draw.begin(), draw.begin() + (k - 1), draw.end(), std::greater<>());
    double const v = draw[static_cast<std::size_t>(k - 1)];
    sum += v;
    sq += v * v;
  }
  double const mean = sum / reps;
  return {mean, std::sqrt((sq / reps - mean * mean) / reps)};
}

}  // namespace

TEST_CASE("quantile examples")
{
  CHECK(Distribution::exponential(1.0).quantile(1.0 - std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(Distribution::uniform(0.0, 1.0).quantile(0.25) == 0.25);
  auto const w = Distribution::weibull(2.0, 1.0);
  double const q = 1.0 - std::exp(-1.0);
  CHECK(w.quantile(q) == doctest::Approx(1.0).epsilon(1e-14));
  // generic bisection agrees with the closed form
  CHECK(invert_cdf_bisection(w, q) == doctest::Approx(std::sqrt(-std::log(1.0 - q))).epsilon(1e-9));
  CHECK_THROWS_AS(w.quantile(0.0), DomainError);
  CHECK_THROWS_AS(w.quantile(1.0), DomainError);
  CHECK_THROWS_AS(w.quantile(-0.2), DomainError);
}

TEST_CASE("cdf and quantile round trip")
{
  for (auto const &d : families())
  {
    for (double q = 0.001; q < 0.999; q += 0.00731)
    {
      CHECK(std::abs(d.cdf(d.quantile(q)) - q) <= 1e-9);
    }
    CHECK(d.cdf(d.support_lower()) == 0.0);
    CHECK(d.cdf(d.quantile(0.999999)) <= 1.0);
    CHECK(d.upper_quantile(0.0) == d.support_upper());
    CHECK(d.upper_quantile(1.0) == d.support_lower());
  }
}

TEST_CASE("cdf is non-decreasing")
{
  for (auto const &d : families())
  {
    double prev = 0.0;
    for (double x = 0.0; x < 10.0; x += 0.01)
    {
      double const f = d.cdf(x);
      CHECK(f >= prev);
      prev = f;
    }
  }
}

TEST_CASE("hazard monotonicity")
{
  CHECK(hazard_monotone_check(Distribution::exponential(1.0), 200).monotone);
  CHECK(hazard_monotone_check(Distribution::uniform(0.0, 1.0), 200).monotone);
  CHECK(hazard_monotone_check(Distribution::weibull(3.0, 0.5), 200).monotone);
  CHECK(Distribution::exponential(1.0).hazard(3.7) == doctest::Approx(1.0));
  CHECK(Distribution::uniform(0.0, 1.0).hazard(0.75) == doctest::Approx(4.0));
  CHECK_THROWS_AS(Distribution::weibull(0.5, 1.0), DomainError);
  CHECK_THROWS_AS(Distribution::exponential(0.0), DomainError);
  CHECK_THROWS_AS(Distribution::uniform(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Distribution::uniform(-1.0, 1.0), DomainError);
}

TEST_CASE("parse")
{
  CHECK(Distribution::parse("exp(2)") == Distribution::exponential(2.0));
  CHECK(Distribution::parse(" unif(0, 2) ") == Distribution::uniform(0.0, 2.0));
  CHECK(Distribution::parse("weibull(2,1)") == Distribution::weibull(2.0, 1.0));
  CHECK(Distribution::parse(Distribution::weibull(1.5, 0.25).to_string()) == Distribution::weibull(1.5, 0.25));
  CHECK_THROWS(Distribution::parse("gamma(2,1)"));
  CHECK_THROWS(Distribution::parse("weibull(0.5,1)"));
}

TEST_CASE("samples are non-negative and follow the cdf")
{
  for (auto const &d : families())
  {
    Rng rng = stream(11, 0);
    int const reps = 20000;
    double const median = d.quantile(0.5);
    int below = 0;
    for (int i = 0; i < reps; ++i)
    {
      double const x = d.sample(rng);
      REQUIRE(x >= 0.0);
      below += x <= median ? 1 : 0;
    }
    CHECK(std::abs(below / double(reps) - 0.5) <= 4.0 * std::sqrt(0.25 / reps));
  }
}

TEST_CASE("tail integral against quadrature")
{
  for (auto const &d : families())
  {
    for (double x : {0.0, 0.3, 1.0, 2.2})
    {
      double const top = d.upper_quantile(1e-15);
      double const oracle = x >= top ? 0.0 : integrate([&](double t) { return d.survival(t); }, x, top);
      CHECK(d.tail_integral(x) == doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK(d.tail_integral(d.support_lower()) + d.support_lower() == doctest::Approx(d.mean()));
  }
}

TEST_CASE("order statistic examples")
{
  auto const e = Distribution::exponential(1.0);
  CHECK(order_stat_mean(e, 5, 1) == doctest::Approx(137.0 / 60.0).epsilon(1e-10));
  CHECK(order_stat_mean(e, 5, 3) == doctest::Approx(1.0 / 3 + 1.0 / 4 + 1.0 / 5).epsilon(1e-10));
  CHECK(order_stat_mean(Distribution::uniform(0.0, 1.0), 4, 2) == doctest::Approx(0.6).epsilon(1e-10));
  CHECK_THROWS_AS(order_stat_mean(e, 5, 6), DomainError);
  CHECK_THROWS_AS(order_stat_mean(e, 5, 0), DomainError);
  CHECK(std::abs(max_expectation(e, 1000) - harmonic(1000)) <= 1e-8);
}

TEST_CASE("exponential order statistics telescope")
{
  auto const e = Distribution::exponential(1.0);
  for (int n : {3, 17, 200})
  {
    auto const table = OrderStatsTable::build(e, n);
    for (int k = 1; k <= n; ++k)
    {
      double h = 0.0;
      for (int i = k; i <= n; ++i)
      {
        h += 1.0 / i;
      }
      CHECK(std::abs(table[k] - h) <= 1e-6);
    }
  }
}

TEST_CASE("order statistic table is monotone and matches the maximum")
{
  for (auto const &d : families())
  {
    auto const t = OrderStatsTable::build(d, 40);
    for (int k = 2; k <= 40; ++k)
    {
      CHECK(t[k - 1] >= t[k]);
    }
    CHECK(t[40] >= d.support_lower());
    CHECK(t[1] == doctest::Approx(max_expectation(d, 40)));
    CHECK(t.tail_bound < 1e-9);
  }
}

TEST_CASE("order statistics against Monte Carlo")
{
  std::uint64_t seed = 100;
  for (auto const &d : families())
  {
    for (auto [n, k] : {std::pair{5, 1}, std::pair{5, 3}, std::pair{20, 7}, std::pair{50, 50}})
    {
      auto const [mean, se] = empirical_order_stat(d, n, k, 50000, seed++);
      CHECK(std::abs(order_stat_mean(d, n, k) - mean) <= 4.0 * se);
    }
  }
}

TEST_CASE("quantile lemma examples")
{
  auto const e = Distribution::exponential(1.0);
  auto const u = Distribution::uniform(0.0, 1.0);

  auto const eq = check_quantiles1(e, 10, 3, 0.5);
  CHECK(eq.holds);
  CHECK(eq.lhs == doctest::Approx(eq.rhs).epsilon(1e-6));
  CHECK(check_quantiles1(u, 10, 1, 0.5).holds);
  double const floor = std::exp(-(harmonic(10) - harmonic(4)));
  CHECK_THROWS_AS(check_quantiles1(e, 10, 5, 0.9 * floor), DomainError);

  auto const k = static_cast<std::int64_t>(std::floor(100 * 0.1 + std::sqrt(100 * std::log(100.0))));
  auto const q2 = check_quantiles2(e, 100, 0.1);
  CHECK(q2.holds);
  CHECK(q2.lhs == doctest::Approx(-std::log(0.1)));
  CHECK(q2.rhs == doctest::Approx(order_stat_mean(e, 100, k)));
  CHECK(check_quantiles2(u, 400, 0.05).holds);
  auto const vac = check_quantiles2(u, 4, 0.9);
  CHECK(vac.holds);
  CHECK(vac.vacuous);

  // exponential: E[X | X >= F^{-1}(1 - z)] = 1 + ln(1/z) and E[max of k] = H_k
  double const alpha = (1.0 + std::log(10.0)) / 1.5;
  auto const qm = check_quantile_maximum(e, 0.1, 2, alpha);
  CHECK(qm.holds);
  CHECK(qm.lhs == doctest::Approx(1.0 + std::log(10.0)));
  CHECK(qm.rhs == doctest::Approx(alpha * 1.5));
  double const tight = quantile_maximum_alpha(0.2, 3);
  CHECK(tight == doctest::Approx((1.0 + std::log(5.0)) / (1.0 + 0.5 + 1.0 / 3)));
  CHECK(check_quantile_maximum(u, 0.2, 3, tight).holds);
  CHECK(quantile_maximum_alpha(0.2, 4) == 0.0);
  CHECK_THROWS_AS(check_quantile_maximum(e, 0.5, 3, 0.5), DomainError);
  CHECK_THROWS_AS(check_quantile_maximum(e, 0.1, 20, (1.0 + std::log(10.0)) / harmonic(20)), DomainError);

  auto const b = check_babaioff_ratio(e, 10, 100);
  CHECK(b.holds);
  CHECK(b.lhs == doctest::Approx(harmonic(10) / harmonic(100)).epsilon(1e-9));
  auto const bu = check_babaioff_ratio(u, 2, 8);
  CHECK(bu.lhs == doctest::Approx((2.0 / 3) / (8.0 / 9)).epsilon(1e-9));
  CHECK(bu.holds);
  CHECK(check_babaioff_ratio(Distribution::weibull(2.0, 1.0), 7, 7).holds);
}

TEST_CASE("exponential quantiles1 holds with equality on a grid")
{
  auto const e = Distribution::exponential(1.0);
  for (int n : {10, 100})
  {
    for (int j : {1, 2, n / 2, n})
    {
      double const low = std::exp(-harmonic_diff(j - 1, n));
      for (double t : {1.0, 0.6, 0.3, 0.1})
      {
        auto const c = check_quantiles1(e, n, j, std::pow(low, t));
        CHECK(c.holds);
        CHECK(std::abs(c.lhs - c.rhs) <= 1e-6 * std::abs(c.rhs));
      }
    }
  }
}
