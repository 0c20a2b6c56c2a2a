#include "ppm/error.hpp"
#include "ppm/market.hpp"
#include "ppm/prices.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ppm;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> xs)
{
  VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs)
  {
    v(i++) = x;
  }
  return v;
}

}  // namespace

TEST_CASE("model parsing")
{
  auto const ind = ValuationModel::parse("independent: [exp(1), unif(0,2)]");
  CHECK(ind.kind() == ValuationKind::IndependentUnitDemand);
  CHECK(ind.items() == 2);
  CHECK(ind.marginal(1) == Distribution::uniform(0.0, 2.0));
  CHECK_FALSE(ind.identical_marginals());
  CHECK(ValuationModel::parse(ind.to_string()).to_string() == ind.to_string());

  auto const sep = ValuationModel::parse("separable: alphas=[1,0.5,0], type=exp(1)");
  CHECK(sep.kind() == ValuationKind::Separable);
  CHECK(sep.items() == 3);
  CHECK(sep.real_items() == 2);
  CHECK(sep.is_dummy(2));
  CHECK(sep.type_distribution() == Distribution::exponential(1.0));

  auto const add = ValuationModel::parse("additive: [exp(1), exp(2)]");
  CHECK_FALSE(add.unit_demand());

  CHECK_THROWS_AS(ValuationModel::parse("separable: alphas=[0.5,1], type=exp(1)"), ConfigError);
  CHECK_THROWS_AS(ValuationModel::parse("separable: alphas=[1]"), ConfigError);
  CHECK_THROWS_AS(ValuationModel::parse("independent: []"), ConfigError);
  CHECK_THROWS_AS(ValuationModel::parse("bundles: [exp(1)]"), ConfigError);
  CHECK_THROWS(ValuationModel::parse("independent: [gamma(2)]"));
}

TEST_CASE("separable profile rows follow the multipliers")
{
  auto const model = ValuationModel::separable(vec({1.0, 0.0}), Distribution::exponential(1.0));
  Rng rng = stream(5, 0);
  auto const p = sample_profile(model, 3, rng);
  REQUIRE(p.values.rows() == 3);
  for (Index i = 0; i < 3; ++i)
  {
    CHECK(p.values(i, 0) == p.types(i));
    CHECK(p.values(i, 1) == 0.0);
  }
}

TEST_CASE("sampler mean and determinism")
{
  auto const model = ValuationModel::independent({Distribution::exponential(1.0)});
  Rng a = stream(9, 2);
  Rng b = stream(9, 2);
  auto const pa = sample_profile(model, 100000, a);
  auto const pb = sample_profile(model, 100000, b);
  CHECK(pa.values == pb.values);
  double const mean = pa.values.mean();
  double const sd = std::sqrt((pa.values.array() - mean).square().sum() / (pa.values.size() - 1));
  CHECK(std::abs(mean - 1.0) <= 4.0 * sd / std::sqrt(100000.0));
  Rng c = stream(9, 3);
  CHECK(sample_profile(model, 10, c).values != pa.values.topRows(10));
}

TEST_CASE("dummies consume no randomness")
{
  auto const model = ValuationModel::independent({Distribution::exponential(1.0), Distribution::uniform(0.0, 1.0)});
  auto const padded = pad_to_square(model, 5);
  Rng a = stream(3, 7);
  Rng b = stream(3, 7);
  auto const pa = sample_profile(model, 5, a);
  auto const pb = sample_profile(padded, 5, b);
  CHECK(pb.values.leftCols(2) == pa.values);
  CHECK(pb.values.rightCols(3).isZero(0.0));
}

TEST_CASE("best response")
{
  auto const two = ValuationModel::independent({Distribution::exponential(1.0), Distribution::exponential(1.0)});
  auto d = best_response(two, vec({3, 5}), vec({1, 4}));
  REQUIRE(d.bundle.size() == 1);
  CHECK(d.bundle[0] == 0);
  CHECK(d.paid == 1.0);
  CHECK(d.value == 3.0);
  CHECK(d.utility == 2.0);

  CHECK(best_response(two, vec({2, 2}), vec({3, 3})).empty());
  // zero utility is not a purchase
  CHECK(best_response(two, vec({2, 1}), vec({2, 3})).empty());
  CHECK(best_response(two, vec({2, 9}), vec({1, kUnavailable})).bundle == std::vector<Index>{0});

  auto const sep = ValuationModel::separable(vec({1, 1}), Distribution::exponential(1.0));
  auto const tie = best_response(sep, vec({5, 5}), vec({2, 2}));
  REQUIRE(tie.bundle.size() == 1);
  CHECK(tie.bundle[0] == 0);

  auto const add = ValuationModel::additive({Distribution::exponential(1.0), Distribution::exponential(1.0),
                                             Distribution::exponential(1.0)});
  auto const a = best_response(add, vec({3, 1, 5}), vec({1, 2, 4}), 4);
  CHECK(a.buyer == 4);
  CHECK(a.bundle == std::vector<Index>{0, 2});
  CHECK(a.paid == 5.0);
  CHECK(a.value == 8.0);
  CHECK(a.utility == 3.0);

  double const nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(best_response(two, vec({nan, 1}), vec({1, 1})), ValidationError);
  CHECK_THROWS_AS(best_response(two, vec({1, 1}), vec({1, nan})), ValidationError);
  CHECK_THROWS_AS(best_response(two, vec({1}), vec({1})), ValidationError);
}

TEST_CASE("pad to square")
{
  auto const ind = ValuationModel::independent({Distribution::exponential(1.0), Distribution::exponential(2.0)});
  auto const p = pad_to_square(ind, 4);
  CHECK(p.items() == 4);
  CHECK(p.real_items() == 2);
  CHECK(p.is_dummy(2));
  CHECK(p.is_dummy(3));
  CHECK_FALSE(p.is_dummy(1));

  auto const sep = ValuationModel::separable(vec({1, 0.5, 0.2}), Distribution::exponential(1.0));
  auto const s = pad_to_square(sep, 2);
  CHECK(s.alphas() == vec({1, 0.5}));

  CHECK(pad_to_square(ind, 2).to_string() == ind.to_string());
  CHECK_THROWS_AS(pad_to_square(ind, 1), DomainError);
}
