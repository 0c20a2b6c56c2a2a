#include "ppm/error.hpp"
#include "ppm/mechanism.hpp"
#include "ppm/numeric.hpp"
#include "ppm/prices.hpp"
#include "ppm/report.hpp"
#include "ppm/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ppm;
using Eigen::VectorXd;

namespace {

Distribution const exp1 = Distribution::exponential(1.0);
ValuationModel const single = ValuationModel::independent({exp1});

}  // namespace

TEST_CASE("one buyer at price zero always buys")
{
  auto const mech = make_mechanism("ladder", single, 1);
  auto const s = run_trials(single, *mech, 100000, 1);
  CHECK(std::abs(s.sw_pp_mean - 1.0) <= 3 * s.sw_pp_se);
  CHECK(s.ratio == 1.0);
  CHECK(s.revenue_mean == 0.0);
  CHECK(s.trials_all_sold == 100000);
}

TEST_CASE("exponential optimum is the harmonic number")
{
  auto const mech = make_mechanism("ladder", single, 200);
  auto const s = run_trials(single, *mech, 20000, 2);
  CHECK(std::abs(s.sw_opt_mean - harmonic(200)) <= 3 * s.sw_opt_se);
  CHECK(s.trials_above_optimum == 0);
  CHECK(s.ratio <= 1.0);
}

TEST_CASE("dynamic separable sells every item")
{
  VectorXd alphas = VectorXd::LinSpaced(16, 2.0, 0.5);
  auto const model = ValuationModel::separable(alphas, exp1);
  auto const mech = make_mechanism("dyn-sep", model, 16);
  RunOptions o;
  o.track_allocations = true;
  auto const s = run_trials(model, *mech, 2000, 3, o);
  CHECK(s.trials_all_sold == 2000);
  CHECK(s.trials_one_per_step == 2000);
  CHECK(s.sale_frequency.minCoeff() == 1.0);
  CHECK(s.max_accounting_error <= 1e-12 * s.sw_opt_mean);
  CHECK(s.trials_above_optimum == 0);
  REQUIRE(s.allocation_counts);
  CHECK(s.allocation_counts->rowwise().sum().minCoeff() == 2000);
}

TEST_CASE("per-trial accounting and summary statistics")
{
  auto const model = ValuationModel::independent({exp1, Distribution::uniform(0, 2), Distribution::weibull(2, 1)});
  auto const mech = make_mechanism("static-ind", model, 40);
  RunOptions o;
  o.keep_trials = true;
  auto const s = run_trials(model, *mech, 3000, 4, o);
  REQUIRE(s.outcomes.size() == 3000);
  double sw = 0, opt = 0, sw2 = 0, opt2 = 0, cross = 0;
  for (auto const &t : s.outcomes)
  {
    CHECK(std::abs(t.welfare - t.revenue - t.utility) <= 1e-12 * (1 + t.welfare));
    CHECK(t.welfare <= t.optimum + 1e-12);
    CHECK(t.welfare >= 0.0);
    Index sold = 0;
    for (bool b : t.sold)
    {
      sold += b ? 1 : 0;
    }
    Index steps = 0;
    for (Index j : t.item_of_step)
    {
      steps += j >= 0 ? 1 : 0;
    }
    CHECK(sold == steps);
    sw += t.welfare;
    opt += t.optimum;
    sw2 += t.welfare * t.welfare;
    opt2 += t.optimum * t.optimum;
    cross += t.welfare * t.optimum;
  }
  double const T = 3000;
  double const mw = sw / T, mo = opt / T;
  double const vw = (sw2 - T * mw * mw) / (T - 1);
  double const vo = (opt2 - T * mo * mo) / (T - 1);
  double const cov = (cross - T * mw * mo) / (T - 1);
  double const R = mw / mo;
  CHECK(s.sw_pp_mean == doctest::Approx(mw).epsilon(1e-12));
  CHECK(s.sw_pp_se == doctest::Approx(std::sqrt(vw / T)).epsilon(1e-8));
  CHECK(s.sw_opt_se == doctest::Approx(std::sqrt(vo / T)).epsilon(1e-8));
  CHECK(s.ratio == doctest::Approx(R).epsilon(1e-12));
  CHECK(s.ratio_se == doctest::Approx(std::sqrt((vw - 2 * R * cov + R * R * vo) / (mo * mo) / T)).epsilon(1e-6));
}

TEST_CASE("results do not depend on the worker count")
{
  auto const model = ValuationModel::independent({exp1, exp1});
  MechanismOptions mo;
  mo.match_trials = 300;
  auto const mech = make_mechanism("dyn-ind", model, 5, mo);
  std::vector<SimulationSummary> rows;
  for (unsigned w : {1u, 3u, 8u})
  {
    RunOptions o;
    o.workers = w;
    o.track_allocations = true;
    rows.push_back(run_trials(model, *mech, 1500, 9, o));
  }
  CHECK(summaries_csv(std::span(rows).subspan(0, 1)) == summaries_csv(std::span(rows).subspan(1, 1)));
  CHECK(summaries_csv(std::span(rows).subspan(0, 1)) == summaries_csv(std::span(rows).subspan(2, 1)));
  CHECK(summaries_json(std::span(rows).subspan(0, 1)).dump() == summaries_json(std::span(rows).subspan(2, 1)).dump());
  CHECK(*rows[0].allocation_counts == *rows[1].allocation_counts);
}

TEST_CASE("sweep rows equal direct runs")
{
  ModelFamily family = [](Index) { return ValuationModel::independent({Distribution::exponential(1.0)}); };
  MechanismFactory factory = [](ValuationModel const &m, Index n) { return make_mechanism("ladder", m, n); };
  std::vector<Index> ns{4};
  auto const rows = sweep(family, factory, ns, 5000, 21);
  auto const direct = run_trials(single, *make_mechanism("ladder", single, 4), 5000, 21);
  REQUIRE(rows.size() == 1);
  CHECK(summaries_csv(rows) == summaries_csv(std::span(&direct, 1)));
  CHECK(rows[0].sw_pp_mean == direct.sw_pp_mean);
  CHECK(rows[0].ratio_se == direct.ratio_se);
}

TEST_CASE("mismatched market is rejected")
{
  auto const mech = make_mechanism("ladder", single, 4);
  auto const other = ValuationModel::independent({Distribution::uniform(0, 1)});
  CHECK_THROWS_AS(run_trials(other, *mech, 10, 1), ConfigError);
  CHECK_THROWS_AS(run_trials(single, *mech, 0, 1), DomainError);
  // padded markets are accepted for the model they came from
  auto const two = ValuationModel::independent({exp1, exp1});
  auto const dyn = make_mechanism("dyn-ind", two, 3);
  CHECK_NOTHROW(run_trials(two, *dyn, 5, 1));
}

TEST_CASE("allocation audit")
{
  VectorXd alphas(6);
  alphas << 1, 0.9, 0.5, 0.4, 0.2, 0.1;
  auto const model = ValuationModel::separable(alphas, Distribution::uniform(0, 1));
  RunOptions o;
  o.track_allocations = true;
  auto const good = allocation_frequency_audit(run_trials(model, *make_mechanism("dyn-sep", model, 6), 20000, 5, o));
  CHECK(good.passed());
  CHECK(good.target == doctest::Approx(1.0 / 6));
  CHECK(good.frequency.rows() == 6);
  CHECK(good.max_abs_z < 4.0);

  // a zero price sells item 1 to the first buyer every time
  MechanismOptions mo;
  mo.static_price = 0.0;
  auto const bad =
      allocation_frequency_audit(run_trials(single, *make_mechanism("static-p", single, 4, mo), 2000, 5, o));
  CHECK_FALSE(bad.passed());
  CHECK(bad.frequency(0, 0) == 1.0);
  CHECK(bad.flagged >= 1);
  CHECK_THROWS(allocation_frequency_audit(run_trials(single, *make_mechanism("ladder", single, 4), 10, 5)));
}

TEST_CASE("mdp dominates other single item policies")
{
  std::int64_t const n = 60;
  auto const mdp = run_trials(single, *make_mechanism("mdp", single, n), 20000, 6);
  CHECK(mdp_optimal_prices(exp1, n).value() == doctest::Approx(mdp.sw_pp_mean).epsilon(3 * mdp.sw_pp_se / mdp.sw_pp_mean));
  MechanismOptions o;
  o.static_price = exp_static_best(n).price;
  for (auto const &[id, opts] : {std::pair{"ladder", MechanismOptions{}}, std::pair{"static-ind", MechanismOptions{}},
                                  std::pair{"static-p", o}})
  {
    auto const other = run_trials(single, *make_mechanism(id, single, n, opts), 20000, 6);
    CAPTURE(id);
    CHECK(mdp.sw_pp_mean >= other.sw_pp_mean - 3 * std::hypot(mdp.sw_pp_se, other.sw_pp_se));
  }
}

TEST_CASE("group pricing sells every item at its ladder price")
{
  auto const model = ValuationModel::independent({exp1, Distribution::uniform(0, 1), Distribution::weibull(2, 1)});
  std::int64_t const n = 13;
  auto const plan = subadditive_group_prices(model, n);
  RunOptions o;
  o.keep_trials = true;
  auto const s = run_trials(model, *make_mechanism("sub-dyn", model, n), 3000, 8, o);
  CHECK(s.trials_all_sold == 3000);
  for (auto const &t : s.outcomes)
  {
    double revenue = 0.0;
    for (std::size_t step = 0; step < t.item_of_step.size(); ++step)
    {
      if (Index const j = t.item_of_step[step]; j >= 0)
      {
        auto const buyer = static_cast<Index>(step);
        REQUIRE(buyer / plan.group_size == j);
        revenue += plan.ladder(buyer % plan.group_size, j);
      }
    }
    CHECK(t.revenue == doctest::Approx(revenue).epsilon(1e-14));
  }
}

TEST_CASE("additive dynamic sells each item to each buyer with probability 1/n")
{
  auto const model = ValuationModel::additive({exp1, exp1});
  RunOptions o;
  o.track_allocations = true;
  auto const s = run_trials(model, *make_mechanism("add-dyn", model, 5), 20000, 10, o);
  auto const audit = allocation_frequency_audit(s);
  CHECK(audit.passed());
  CHECK(s.trials_all_sold == 20000);
}
