#include "ppm/verify.hpp"

#include "ppm/bounds.hpp"
#include "ppm/error.hpp"
#include "ppm/fixed_point.hpp"
#include "ppm/matching.hpp"
#include "ppm/mechanism.hpp"
#include "ppm/numeric.hpp"
#include "ppm/oracle.hpp"
#include "ppm/quantile_lemmas.hpp"
#include "ppm/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace ppm {

namespace {

std::int64_t scaled(std::int64_t trials, VerifyOptions const &o)
{
  return std::max<std::int64_t>(1, std::llround(static_cast<double>(trials) * o.trial_scale));
}

std::string fmt(char const *format, auto... args)
{
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

ValuationModel single_exp()
{
  return ValuationModel::independent({Distribution::exponential(1.0)});
}

ClaimResult exp_optimum(VerifyOptions const &o)
{
  Index const n   = 1000;
  auto const mkt  = single_exp();
  auto const mech = make_mechanism("ladder", mkt, n);
  auto const s    = run_trials(mkt, *mech, scaled(100000, o), o.seed);
  double const hn = harmonic(n);
  bool const ok   = std::abs(s.sw_opt_mean - hn) <= 3.0 * s.sw_opt_se;
  return {"", ok, fmt("E[SW_opt]=%.6f H_n=%.6f se=%.2e", s.sw_opt_mean, hn, s.sw_opt_se)};
}

ClaimResult mdp_recursion(VerifyOptions const &)
{
  std::int64_t const n = 50;
  auto const mdp       = mdp_optimal_prices(Distribution::exponential(1.0), n);
  double const last    = mdp.thresholds(n - 1);
  double const second  = mdp.thresholds(n - 2);
  auto const report    = mdp_bound_check(100000);
  bool const ok = std::abs(last - 1.0) <= 1e-9 && std::abs(second - (1.0 + std::exp(-1.0))) <= 1e-9 && report.passed;
  return {"", ok,
          fmt("p(n-1)=%.12f p(n-2)=%.12f worst margin over k<=1e5: %.3e", last, second, report.max_violation)};
}

ClaimResult static_closed_form(VerifyOptions const &o)
{
  auto const mkt = single_exp();
  bool ok        = true;
  double worst   = 0.0;
  for (Index n : {10, 100, 1000})
  {
    double const ln = std::log(static_cast<double>(n));
    for (double p : {1.0, ln, harmonic(n)})
    {
      MechanismOptions mo;
      mo.static_price  = p;
      auto const mech  = make_mechanism("static-p", mkt, n, mo);
      auto const s     = run_trials(mkt, *mech, scaled(100000, o), o.seed + static_cast<std::uint64_t>(n));
      double const z   = std::abs(s.sw_pp_mean - exp_static_welfare(n, p)) / s.sw_pp_se;
      worst            = std::max(worst, z);
      ok               = ok && z <= 3.0;
    }
  }
  return {"", ok, fmt("max |z| over 9 (n,p) cells: %.2f", worst)};
}

ClaimResult allocation_audit(VerifyOptions const &o)
{
  Index const n = 8;
  Eigen::VectorXd alphas(n);
  for (Index j = 0; j < n; ++j)
  {
    alphas(j) = static_cast<double>(n - j) / static_cast<double>(n);
  }
  auto const sep = ValuationModel::separable(alphas, Distribution::exponential(1.0));
  auto const ind = ValuationModel::independent(std::vector<Distribution>(n, Distribution::exponential(1.0)));
  RunOptions ro;
  ro.track_allocations = true;
  auto const a = allocation_frequency_audit(run_trials(sep, *make_mechanism("dyn-sep", sep, n), scaled(100000, o), o.seed, ro));
  auto const b = allocation_frequency_audit(run_trials(ind, *make_mechanism("quantile", ind, n), scaled(100000, o), o.seed, ro));
  return {"", a.passed() && b.passed(),
          fmt("dyn-sep max|z|=%.2f, quantile max|z|=%.2f (threshold 4)", a.max_abs_z, b.max_abs_z)};
}

ClaimResult quantile_lemmas(VerifyOptions const &)
{
  std::vector<Distribution> const dists{Distribution::exponential(1.0), Distribution::uniform(0.0, 1.0),
                                        Distribution::weibull(2.0, 1.0)};
  int checks = 0;
  int failed = 0;
  double exp_gap = 0.0;
  auto tally = [&](LemmaCheck const &c) {
    ++checks;
    failed += c.holds ? 0 : 1;
  };
  for (std::size_t d = 0; d < dists.size(); ++d)
  {
    auto const &dist = dists[d];
    for (std::int64_t n : {10, 100, 1000})
    {
      std::vector<std::int64_t> js{1, 2, n / 2, n};
      for (auto j : js)
      {
        double const low = std::exp(-harmonic_diff(j - 1, n));
        for (double t : {1.0, 0.75, 0.5, 0.25, 0.05})
        {
          auto const c = check_quantiles1(dist, n, j, std::pow(low, t));
          tally(c);
          if (d == 0)
          {
            exp_gap = std::max(exp_gap, std::abs(c.lhs - c.rhs) / std::max(std::abs(c.rhs), 1e-300));
          }
        }
      }
      for (double q : {0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.9})
      {
        tally(check_quantiles2(dist, n, q));
      }
      for (double z : {0.5, 0.2, 0.1, 0.01})
      {
        for (std::int64_t k : {std::int64_t{1}, std::int64_t{2}, std::int64_t{3}, std::int64_t{5}, n / 10, n})
        {
          double const alpha = quantile_maximum_alpha(z, k);
          if (alpha <= 0.0)
          {
            continue;
          }
          tally(check_quantile_maximum(dist, z, k, alpha));
          tally(check_quantile_maximum(dist, z, k, 0.5 * (alpha + 1.0 / (z * static_cast<double>(k)))));
        }
      }
      for (std::int64_t small : {std::int64_t{1}, n / 10, n / 2, n})
      {
        tally(check_babaioff_ratio(dist, std::max<std::int64_t>(1, small), n));
      }
    }
  }
  bool const ok = failed == 0 && exp_gap <= 1e-6;
  return {"", ok, fmt("%d checks, %d failed; Exp quantiles1 max relative gap %.2e", checks, failed, exp_gap)};
}

double brute_force_welfare(Eigen::MatrixXd const &v)
{
  // Enumerate assignments of the smaller side; sums run in item order like the solver's.
  bool const by_buyer = v.rows() <= v.cols();
  Index const small   = by_buyer ? v.rows() : v.cols();
  Index const large   = by_buyer ? v.cols() : v.rows();
  std::vector<Index> perm(static_cast<std::size_t>(large));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = 0.0;
  do
  {
    std::vector<Index> buyer_of_item(static_cast<std::size_t>(v.cols()), -1);
    for (Index s = 0; s < small; ++s)
    {
      Index const other = perm[static_cast<std::size_t>(s)];
      if (by_buyer)
      {
        buyer_of_item[static_cast<std::size_t>(other)] = s;
      }
      else
      {
        buyer_of_item[static_cast<std::size_t>(s)] = other;
      }
    }
    double total = 0.0;
    for (Index j = 0; j < v.cols(); ++j)
    {
      if (buyer_of_item[static_cast<std::size_t>(j)] >= 0)
      {
        total += v(buyer_of_item[static_cast<std::size_t>(j)], j);
      }
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

ClaimResult oracle_equivalence(VerifyOptions const &o)
{
  Rng rng = stream(o.seed, 0, 7);
  std::uniform_int_distribution<int> size(1, 6);
  auto const exp1 = Distribution::exponential(1.0);
  int mismatches  = 0;
  for (int t = 0; t < 1000; ++t)
  {
    Eigen::MatrixXd v(size(rng), size(rng));
    for (Index i = 0; i < v.rows(); ++i)
    {
      for (Index j = 0; j < v.cols(); ++j)
      {
        v(i, j) = exp1.sample(rng);
      }
    }
    mismatches += max_weight_matching(v).welfare == brute_force_welfare(v) ? 0 : 1;
  }
  int sep_mismatches = 0;
  for (int t = 0; t < 1000; ++t)
  {
    Index const n = size(rng);
    Index const m = size(rng);
    Eigen::VectorXd alphas(m);
    for (Index j = 0; j < m; ++j)
    {
      alphas(j) = Distribution::canonical(rng);
    }
    std::sort(alphas.begin(), alphas.end(), std::greater<>());
    auto const model   = ValuationModel::separable(alphas, exp1);
    auto const profile = sample_profile(model, n, rng);
    auto const match   = max_weight_matching(profile.values);
    sep_mismatches += match.welfare == separable_optimum(alphas, profile.types) ? 0 : 1;
  }
  return {"", mismatches == 0 && sep_mismatches == 0,
          fmt("brute force mismatches %d/1000, separable mismatches %d/1000", mismatches, sep_mismatches)};
}

ClaimResult ratio_trends(VerifyOptions const &o)
{
  std::vector<Index> const ns{64, 256, 1024, 4096, 16384};
  auto const mkt     = single_exp();
  auto const trials  = scaled(10000, o);
  auto const rows    = sweep([&](Index) { return mkt; },
                             [](ValuationModel const &m, Index n) { return make_mechanism("ladder", m, n); }, ns,
                             trials, o.seed);
  bool increasing = true;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < rows.size(); ++k)
  {
    xs.push_back(static_cast<double>(ns[k]));
    ys.push_back(rows[k].ratio);
    if (k > 0)
    {
      double const se = std::hypot(rows[k].ratio_se, rows[k - 1].ratio_se);
      increasing      = increasing && rows[k].ratio - rows[k - 1].ratio > 3.0 * se;
    }
  }
  auto const fit = ratio_trend_fit(xs, ys, TrendModel::OneOverLog);
  MechanismOptions mo;
  mo.static_price      = exp_static_best(4096).price;
  auto const fixed     = run_trials(mkt, *make_mechanism("static-p", mkt, 4096, mo), trials, o.seed);
  auto const &dynamic  = rows[3];
  double const sep_se  = std::hypot(dynamic.ratio_se, fixed.ratio_se);
  bool const separated = dynamic.ratio - fixed.ratio > 3.0 * sep_se;
  bool const ok        = increasing && fit.c > 0.0 && fit.r_squared >= 0.9 && separated;
  return {"", ok,
          fmt("ratios %.4f %.4f %.4f %.4f %.4f; c=%.3f R2=%.3f; dynamic-static at 4096: %.4f (3se=%.4f)", ys[0],
              ys[1], ys[2], ys[3], ys[4], fit.c, fit.r_squared, dynamic.ratio - fixed.ratio, 3.0 * sep_se)};
}

std::vector<Distribution> mixed_marginals(Index m)
{
  std::vector<Distribution> const cycle{Distribution::exponential(1.0), Distribution::uniform(0.0, 2.0),
                                        Distribution::weibull(2.0, 1.0)};
  std::vector<Distribution> out;
  for (Index j = 0; j < m; ++j)
  {
    out.push_back(cycle[static_cast<std::size_t>(j) % cycle.size()]);
  }
  return out;
}

ClaimResult welfare_domination(VerifyOptions const &o)
{
  bool ok = true;
  std::string detail;
  for (Index n : {2, 4, 8})
  {
    auto const mkt = ValuationModel::independent(mixed_marginals(n));
    RunOptions ro;
    ro.keep_trials  = true;
    auto const tr   = scaled(20000, o);
    auto const pp   = run_trials(mkt, *make_mechanism("dyn-ind", mkt, n), tr, o.seed, ro);
    auto const qa   = run_trials(mkt, *make_mechanism("quantile", mkt, n), tr, o.seed, ro);
    std::vector<double> diff(static_cast<std::size_t>(tr));
    for (std::size_t t = 0; t < diff.size(); ++t)
    {
      diff[t] = pp.outcomes[t].welfare - qa.outcomes[t].welfare;
    }
    double const mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(tr);
    double var        = 0.0;
    for (double d : diff)
    {
      var += (d - mean) * (d - mean);
    }
    double const se = std::sqrt(var / static_cast<double>(tr - 1) / static_cast<double>(tr));
    ok              = ok && mean >= -3.0 * se;
    detail += fmt("m=n=%d: pp-quantile %.4f (se %.4f); ", static_cast<int>(n), mean, se);
  }
  return {"", ok, detail};
}

ClaimResult subadditive(VerifyOptions const &o)
{
  auto const unit = ValuationModel::independent({Distribution::exponential(1.0), Distribution::uniform(0.0, 1.0),
                                                 Distribution::weibull(2.0, 1.0), Distribution::exponential(2.0)});
  auto const g    = run_trials(unit, *make_mechanism("sub-dyn", unit, 40), scaled(10000, o), o.seed);
  bool const all_sold = g.trials_all_sold == g.trials;

  Index const n   = 10000;
  auto const add  = ValuationModel::additive({Distribution::exponential(1.0), Distribution::uniform(0.0, 1.0)});
  auto const tr   = scaled(10000, o);
  auto const s    = run_trials(add, *make_mechanism("add-static", add, n), tr, o.seed);
  double const bound = 1.0 / std::log(static_cast<double>(n));
  bool low_unsold    = true;
  double worst       = 0.0;
  for (Index j = 0; j < 2; ++j)
  {
    double const unsold = 1.0 - s.sale_frequency(j);
    double const se     = std::sqrt(std::max(unsold * (1.0 - unsold), 1e-12) / static_cast<double>(tr));
    low_unsold          = low_unsold && unsold <= bound + 3.0 * se;
    worst               = std::max(worst, unsold);
  }
  return {"", all_sold && low_unsold,
          fmt("group split sold all items in %lld/%lld trials; additive static max unsold %.4f vs 1/ln n=%.4f",
              static_cast<long long>(g.trials_all_sold), static_cast<long long>(g.trials), worst, bound)};
}

ClaimResult fixed_point(VerifyOptions const &o)
{
  std::vector<Distribution> const marginals(2, Distribution::exponential(1.0));
  Eigen::Vector2d const targets(0.5, 0.5);
  auto const sol       = solve_purchase_prices(marginals, targets);
  double const resid   = sol.residuals.cwiseAbs().maxCoeff();
  auto const mkt       = ValuationModel::independent(marginals);
  std::int64_t const T = scaled(1000000, o);
  Rng rng              = stream(o.seed, 0, 9);
  Eigen::Vector2i counts = Eigen::Vector2i::Zero();
  Eigen::Vector2d v;
  for (std::int64_t t = 0; t < T; ++t)
  {
    v << marginals[0].sample(rng), marginals[1].sample(rng);
    auto const d = best_response(mkt, v, sol.prices);
    if (!d.empty())
    {
      counts(d.bundle.front()) += 1;
    }
  }
  double const se = std::sqrt(0.25 / static_cast<double>(T));
  Eigen::Vector2d const freq = counts.cast<double>() / static_cast<double>(T);
  double const z  = (freq.array() - 0.5).abs().maxCoeff() / se;
  return {"", resid <= 1e-6 && z <= 4.0,
          fmt("prices (%.6f, %.6f), residual %.2e, Monte Carlo max |z| %.2f", sol.prices(0), sol.prices(1), resid, z)};
}

ClaimResult static_cases(VerifyOptions const &)
{
  bool ok = true;
  std::string detail;
  for (std::int64_t n : {std::int64_t{1000}, std::int64_t{1000000}, std::int64_t{1000000000}})
  {
    auto const r = exp_static_case_check(n);
    ok           = ok && r.passed;
    detail += fmt("n=%lld max excess %.3e%s; ", static_cast<long long>(n), r.max_violation,
                  r.note.empty() ? "" : (" (" + r.note + ")").c_str());
  }
  return {"", ok, detail};
}

struct Entry
{
  std::string_view id;
  ClaimResult (*run)(VerifyOptions const &);
};

constexpr Entry kClaims[] = {
    {"exp-optimum", exp_optimum},
    {"mdp-recursion", mdp_recursion},
    {"static-closed-form", static_closed_form},
    {"allocation-audit", allocation_audit},
    {"quantile-lemmas", quantile_lemmas},
    {"oracle-equivalence", oracle_equivalence},
    {"ratio-trends", ratio_trends},
    {"welfare-domination", welfare_domination},
    {"subadditive", subadditive},
    {"fixed-point", fixed_point},
    {"static-cases", static_cases},
};

}  // namespace

std::vector<std::string_view> claim_ids()
{
  std::vector<std::string_view> ids;
  for (auto const &e : kClaims)
  {
    ids.push_back(e.id);
  }
  return ids;
}

ClaimResult run_claim(std::string_view id, VerifyOptions const &options)
{
  for (auto const &e : kClaims)
  {
    if (e.id == id)
    {
      auto const start = std::chrono::steady_clock::now();
      ClaimResult r;
      try
      {
        r = e.run(options);
      }
      catch (NumericError const &err)
      {
        r.passed = false;
        r.detail = std::string("numeric error: ") + err.what();
      }
      r.id      = std::string(id);
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return r;
    }
  }
  std::string valid;
  for (auto v : claim_ids())
  {
    valid += (valid.empty() ? "" : ", ") + std::string(v);
  }
  throw ConfigError("unknown claim '" + std::string(id) + "' (valid: " + valid + ")");
}

std::vector<ClaimResult> run_verification(VerifyOptions const &options, std::span<std::string const> only)
{
  std::vector<ClaimResult> out;
  if (only.empty())
  {
    for (auto id : claim_ids())
    {
      out.push_back(run_claim(id, options));
    }
  }
  else
  {
    for (auto const &id : only)
    {
      out.push_back(run_claim(id, options));
    }
  }
  return out;
}

}  // namespace ppm
