#include "ppm/error.hpp"
#include "ppm/matching.hpp"
#include "ppm/numeric.hpp"
#include "ppm/oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace ppm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Best assignment by enumerating injective maps of the smaller side.
double brute_force(MatrixXd const &v)
{
  bool const flip = v.rows() > v.cols();
  MatrixXd const w = flip ? MatrixXd(v.transpose()) : v;
  std::vector<int> cols(static_cast<std::size_t>(w.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = 0.0;
  do
  {
    double s = 0.0;
    for (Index i = 0; i < w.rows(); ++i)
    {
      s += w(i, cols[static_cast<std::size_t>(i)]);
    }
    best = std::max(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

}  // namespace

TEST_CASE("matching examples")
{
  MatrixXd a(2, 2);
  a << 3, 1, 2, 4;
  auto const r = max_weight_matching(a);
  CHECK(r.welfare == 7.0);
  CHECK(r.item_of_buyer == std::vector<Index>{0, 1});

  MatrixXd one(1, 1);
  one << 5;
  CHECK(max_weight_matching(one).welfare == 5.0);

  MatrixXd sep(2, 2);
  sep << 2 * 3, 1 * 3, 2 * 5, 1 * 5;
  VectorXd alphas(2), types(2);
  alphas << 2, 1;
  types << 3, 5;
  CHECK(max_weight_matching(sep).welfare == 13.0);
  CHECK(separable_optimum(alphas, types) == 13.0);

  MatrixXd bad = a;
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(max_weight_matching(bad), ValidationError);
  bad(0, 1) = -1;
  CHECK_THROWS_AS(max_weight_matching(bad), ValidationError);
}

TEST_CASE("matching agrees with brute force on random rectangles")
{
  Rng rng = stream(77, 0);
  std::uniform_int_distribution<int> size(1, 6);
  for (int t = 0; t < 300; ++t)
  {
    MatrixXd v(size(rng), size(rng));
    for (Index i = 0; i < v.size(); ++i)
    {
      v(i) = Distribution::canonical(rng) < 0.2 ? 0.0 : std::floor(Distribution::canonical(rng) * 20);
    }
    auto const r = max_weight_matching(v);
    CHECK(r.welfare == brute_force(v));
    double sum = 0.0;
    std::vector<bool> taken(static_cast<std::size_t>(v.cols()), false);
    for (Index i = 0; i < v.rows(); ++i)
    {
      Index const j = r.item_of_buyer[static_cast<std::size_t>(i)];
      if (j >= 0)
      {
        CHECK_FALSE(taken[static_cast<std::size_t>(j)]);
        taken[static_cast<std::size_t>(j)] = true;
        sum += v(i, j);
      }
    }
    CHECK(sum == r.welfare);
    CHECK(taken == r.item_matched);
  }
}

TEST_CASE("separable optimum")
{
  VectorXd types(3);
  types << 2, 7, 4;
  VectorXd a(2);
  a << 1, 0;
  CHECK(separable_optimum(a, types) == 7.0);
  a << 1, 1;
  CHECK(separable_optimum(a, types) == 11.0);
  VectorXd bad(2);
  bad << 0, 1;
  CHECK_THROWS_AS(separable_optimum(bad, types), ConfigError);

  Rng rng = stream(4, 0);
  auto const model = ValuationModel::separable((VectorXd(4) << 3, 2, 2, 0.5).finished(), Distribution::weibull(2, 1));
  for (int t = 0; t < 200; ++t)
  {
    auto const p = sample_profile(model, 5, rng);
    CHECK(max_weight_matching(p.values).welfare == separable_optimum(model.alphas(), p.types));
  }
}

TEST_CASE("offline welfare kinds agree")
{
  Rng rng = stream(8, 1);
  auto const sep = ValuationModel::separable((VectorXd(3) << 1, 0.7, 0.2).finished(), Distribution::exponential(1));
  auto const single = ValuationModel::independent({Distribution::exponential(1.0)}).with_dummies(2);
  auto const add = ValuationModel::additive({Distribution::exponential(1.0), Distribution::uniform(0, 1)});
  for (int t = 0; t < 50; ++t)
  {
    auto const ps = sample_profile(sep, 4, rng);
    CHECK(offline_welfare(sep, ps, OracleKind::SeparableClosedForm) ==
          doctest::Approx(offline_welfare(sep, ps, OracleKind::Matching)).epsilon(1e-14));
    auto const p1 = sample_profile(single, 6, rng);
    CHECK(offline_welfare(single, p1, OracleKind::SingleItemMax) == offline_welfare(single, p1, OracleKind::Matching));
    CHECK(offline_welfare(single, p1) == p1.values.col(0).maxCoeff());
    auto const pa = sample_profile(add, 6, rng);
    CHECK(offline_welfare(add, pa) == doctest::Approx(pa.values.colwise().maxCoeff().sum()));
  }
  CHECK(parse_oracle(to_string(OracleKind::Matching)) == OracleKind::Matching);
  CHECK_THROWS_AS(parse_oracle("magic"), ConfigError);
  auto const ps = sample_profile(sep, 4, rng);
  CHECK_THROWS_AS(offline_welfare(sep, ps, OracleKind::ItemwiseMax), ConfigError);
  auto const pa = sample_profile(add, 4, rng);
  CHECK_THROWS_AS(offline_welfare(add, pa, OracleKind::Matching), ConfigError);
}

TEST_CASE("upper bounds")
{
  std::vector<std::optional<Distribution>> one{Distribution::exponential(1.0)};
  CHECK(subadditive_upper_bound(one, 5) == doctest::Approx(harmonic(5)).epsilon(1e-9));
  std::vector<std::optional<Distribution>> two{Distribution::exponential(1.0), Distribution::uniform(0, 1)};
  CHECK(subadditive_upper_bound(two, 9) == doctest::Approx(harmonic(9) + 0.9).epsilon(1e-9));
  std::vector<std::optional<Distribution>> none{std::nullopt, std::nullopt};
  CHECK(subadditive_upper_bound(none, 9) == 0.0);

  CHECK(exante_item_bound(Distribution::exponential(1.0), 1.0, 10) == doctest::Approx(std::log(10.0) + 1).epsilon(1e-9));
  CHECK(exante_item_bound(Distribution::uniform(0, 1), 1.0, 2) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(exante_item_bound(Distribution::exponential(1.0), 1e-9, 10) < 1e-7);
  CHECK_THROWS_AS(exante_item_bound(Distribution::exponential(1.0), 0.0, 10), DomainError);
}

TEST_CASE("match probabilities")
{
  auto const model = ValuationModel::independent({Distribution::exponential(1.0), Distribution::uniform(0, 2)});
  auto const square = pad_to_square(model, 3);
  std::vector<Index> all{0, 1, 2};
  auto const mp = estimate_match_probabilities(square, 3, all, 4000, 12);
  CHECK(mp.trials == 4000);
  CHECK(mp.q(0) == 1.0);
  CHECK(mp.q(1) == 1.0);
  CHECK(mp.q.sum() == doctest::Approx(3.0));

  auto const iid = ValuationModel::independent({Distribution::exponential(1.0), Distribution::exponential(1.0)});
  std::vector<Index> both{0, 1};
  auto const half = estimate_match_probabilities(iid, 1, both, 20000, 3);
  for (Index j = 0; j < 2; ++j)
  {
    CHECK(std::abs(half.q(j) - 0.5) <= 3.0 * std::sqrt(0.25 / 20000));
  }
  CHECK(half.q.sum() == doctest::Approx(1.0));

  auto const with_dummy = iid.with_dummies(1);
  auto const d = estimate_match_probabilities(with_dummy, 1, all, 2000, 5);
  CHECK(d.q(2) == 0.0);

  auto const wide = ValuationModel::independent({Distribution::exponential(1.0), Distribution::uniform(0, 1),
                                                 Distribution::weibull(2, 1), Distribution::exponential(2)});
  std::vector<Index> four{0, 1, 2, 3};
  auto const w = estimate_match_probabilities(wide, 2, four, 3000, 9);
  CHECK(w.q.sum() == doctest::Approx(2.0));
  CHECK_THROWS_AS(estimate_match_probabilities(wide, 2, four, 0, 9), DomainError);
}
