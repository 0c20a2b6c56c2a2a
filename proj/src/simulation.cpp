#include "ppm/simulation.hpp"

#include "ppm/error.hpp"
#include "ppm/parallel.hpp"
#include "ppm/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ppm {

namespace {

bool same_market(ValuationModel const &model, ValuationModel const &market, Index n)
{
  if (model.kind() != market.kind())
  {
    return false;
  }
  if (model.to_string() == market.to_string())
  {
    return true;
  }
  try
  {
    return pad_to_square(model, n).to_string() == market.to_string();
  }
  catch (std::exception const &)
  {
    return false;
  }
}

struct Moments
{
  double mean = 0.0;
  double var  = 0.0;  // sample variance
};

Moments moments(std::vector<double> const &x)
{
  Moments m;
  double const count = static_cast<double>(x.size());
  for (double v : x)
  {
    m.mean += v;
  }
  m.mean /= count;
  if (x.size() > 1)
  {
    for (double v : x)
    {
      m.var += (v - m.mean) * (v - m.mean);
    }
    m.var /= count - 1.0;
  }
  return m;
}

double covariance(std::vector<double> const &x, double mx, std::vector<double> const &y, double my)
{
  if (x.size() < 2)
  {
    return 0.0;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    s += (x[i] - mx) * (y[i] - my);
  }
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace

void to_json(nlohmann::json &out, SimulationSummary const &s)
{
  out = nlohmann::json{{"mechanism", s.mechanism},
                       {"model", s.model},
                       {"n", s.n},
                       {"trials", s.trials},
                       {"seed", s.seed},
                       {"sw_pp_mean", s.sw_pp_mean},
                       {"sw_pp_se", s.sw_pp_se},
                       {"sw_opt_mean", s.sw_opt_mean},
                       {"sw_opt_se", s.sw_opt_se},
                       {"ratio", s.ratio},
                       {"ratio_se", s.ratio_se},
                       {"revenue_mean", s.revenue_mean},
                       {"revenue_se", s.revenue_se},
                       {"utility_mean", s.utility_mean},
                       {"trials_all_sold", s.trials_all_sold},
                       {"trials_one_per_step", s.trials_one_per_step},
                       {"sale_frequency", std::vector<double>(s.sale_frequency.data(),
                                                              s.sale_frequency.data() + s.sale_frequency.size())}};
  if (s.allocation_counts)
  {
    auto const &c = *s.allocation_counts;
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < c.rows(); ++i)
    {
      std::vector<int> row(static_cast<std::size_t>(c.cols()));
      for (Index j = 0; j < c.cols(); ++j)
      {
        row[static_cast<std::size_t>(j)] = c(i, j);
      }
      rows.push_back(row);
    }
    out["allocation_counts"] = rows;
  }
}

SimulationSummary run_trials(ValuationModel const &model, Mechanism const &mechanism, std::int64_t trials,
                             std::uint64_t seed, RunOptions const &options)
{
  if (trials < 1)
  {
    throw DomainError("run_trials: need trials >= 1");
  }
  Index const n             = mechanism.buyers();
  ValuationModel const &mkt = mechanism.market();
  if (!same_market(model, mkt, n))
  {
    throw ConfigError("mechanism " + mechanism.id() + " was built for '" + mkt.to_string() +
                      "' and cannot run on '" + model.to_string() + "'");
  }
  Index const m        = mkt.items();
  unsigned const slots = options.workers ? options.workers : worker_count();
  auto const count     = static_cast<std::size_t>(trials);

  std::vector<double> welfare(count), revenue(count), utility(count), optimum(count), accounting(count);
  std::vector<char> all_sold(count), one_per_step(count), above(count);
  std::vector<Eigen::VectorXi> sold_counts(slots, Eigen::VectorXi::Zero(m));
  std::vector<Eigen::MatrixXi> alloc(options.track_allocations ? slots : 0, Eigen::MatrixXi::Zero(n, m));
  std::vector<TrialOutcome> outcomes(options.keep_trials ? count : 0);

  parallel_for(
      count,
      [&](unsigned worker, std::size_t t) {
        Rng profile_rng    = stream(seed, t, 0);
        Rng aux            = stream(seed, t, 1);
        auto const profile = sample_profile(mkt, n, profile_rng);
        auto const run     = mechanism.run(profile, aux);
        double w = 0.0, r = 0.0, u = 0.0;
        std::vector<bool> sold(static_cast<std::size_t>(m), false);
        for (auto const &d : run.decisions)
        {
          w += d.value;
          r += d.paid;
          u += d.utility;
          for (Index j : d.bundle)
          {
            sold[static_cast<std::size_t>(j)] = true;
          }
        }
        double const opt = offline_welfare(mkt, profile, options.oracle);
        welfare[t]       = w;
        revenue[t]       = r;
        utility[t]       = u;
        optimum[t]       = opt;
        accounting[t]    = std::abs(w - r - u);
        above[t]         = w > opt * (1.0 + 1e-12) + 1e-12;

        bool every = true;
        for (Index j = 0; j < m; ++j)
        {
          bool const s = sold[static_cast<std::size_t>(j)];
          sold_counts[worker](j) += s ? 1 : 0;
          every = every && (s || mkt.is_dummy(j));
        }
        all_sold[t] = every;
        bool steady = true;
        Index left  = m;
        for (Index i = 0; i < n; ++i)
        {
          Index const item = run.removed[static_cast<std::size_t>(i)];
          if (left > 0)
          {
            steady = steady && item >= 0;
          }
          if (item >= 0)
          {
            --left;
          }
          if (options.track_allocations)
          {
            auto const &bundle = run.decisions[static_cast<std::size_t>(i)].bundle;
            for (Index j : bundle)
            {
              alloc[worker](i, j) += 1;
            }
            if (bundle.empty() && item >= 0)
            {
              alloc[worker](i, item) += 1;
            }
          }
        }
        one_per_step[t] = steady;
        if (options.keep_trials)
        {
          auto &o        = outcomes[t];
          o.trial        = t;
          o.welfare      = w;
          o.revenue      = r;
          o.utility      = u;
          o.optimum      = opt;
          o.item_of_step = run.removed;
          o.sold         = std::move(sold);
        }
      },
      slots);

  SimulationSummary s;
  s.mechanism = mechanism.id();
  s.model     = model.to_string();
  s.n         = n;
  s.trials    = trials;
  s.seed      = seed;
  double const root = std::sqrt(static_cast<double>(trials));
  auto const w      = moments(welfare);
  auto const r      = moments(revenue);
  auto const o      = moments(optimum);
  s.sw_pp_mean      = w.mean;
  s.sw_pp_se        = std::sqrt(w.var) / root;
  s.revenue_mean    = r.mean;
  s.revenue_se      = std::sqrt(r.var) / root;
  s.utility_mean    = moments(utility).mean;
  s.sw_opt_mean     = o.mean;
  s.sw_opt_se       = std::sqrt(o.var) / root;
  if (o.mean > 0.0)
  {
    s.ratio            = w.mean / o.mean;
    double const cov   = covariance(welfare, w.mean, optimum, o.mean);
    double const ratio = s.ratio;
    double const var   = (w.var - 2.0 * ratio * cov + ratio * ratio * o.var) / (o.mean * o.mean);
    s.ratio_se         = std::sqrt(std::max(0.0, var)) / root;
  }
  Eigen::VectorXi sold_total = Eigen::VectorXi::Zero(m);
  for (auto const &c : sold_counts)
  {
    sold_total += c;
  }
  s.sale_frequency = sold_total.cast<double>() / static_cast<double>(trials);
  for (std::size_t t = 0; t < count; ++t)
  {
    s.trials_all_sold += all_sold[t] ? 1 : 0;
    s.trials_one_per_step += one_per_step[t] ? 1 : 0;
    s.trials_above_optimum += above[t] ? 1 : 0;
    s.max_accounting_error = std::max(s.max_accounting_error, accounting[t]);
  }
  if (options.track_allocations)
  {
    Eigen::MatrixXi total = Eigen::MatrixXi::Zero(n, m);
    for (auto const &a : alloc)
    {
      total += a;
    }
    s.allocation_counts = std::move(total);
  }
  s.outcomes = std::move(outcomes);
  return s;
}

std::vector<SimulationSummary> sweep(ModelFamily const &family, MechanismFactory const &factory,
                                     std::span<Index const> ns, std::int64_t trials, std::uint64_t seed,
                                     RunOptions const &options)
{
  if (ns.empty())
  {
    throw DomainError("sweep: need at least one n");
  }
  std::vector<SimulationSummary> rows;
  for (Index n : ns)
  {
    auto const model     = family(n);
    auto const mechanism = factory(model, n);
    rows.push_back(run_trials(model, *mechanism, trials, seed, options));
  }
  return rows;
}

AllocationAudit allocation_frequency_audit(SimulationSummary const &summary, double threshold)
{
  if (!summary.allocation_counts)
  {
    throw DomainError("allocation_frequency_audit: summary was collected without allocation tracking");
  }
  auto const &counts = *summary.allocation_counts;
  AllocationAudit audit;
  audit.threshold   = threshold;
  audit.target      = 1.0 / static_cast<double>(summary.n);
  double const T    = static_cast<double>(summary.trials);
  double const se   = std::sqrt(audit.target * (1.0 - audit.target) / T);
  audit.frequency   = counts.cast<double>() / T;
  audit.z           = (audit.frequency.array() - audit.target) / (se > 0.0 ? se : 1.0);
  audit.max_abs_z   = audit.z.size() ? audit.z.cwiseAbs().maxCoeff() : 0.0;
  audit.chi_square  = audit.z.squaredNorm();
  audit.flagged     = (audit.z.array().abs() > threshold).count();
  return audit;
}

}  // namespace ppm
