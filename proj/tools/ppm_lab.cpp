#include "ppm/bounds.hpp"
#include "ppm/config.hpp"
#include "ppm/error.hpp"
#include "ppm/mechanism.hpp"
#include "ppm/numeric.hpp"
#include "ppm/report.hpp"
#include "ppm/simulation.hpp"
#include "ppm/verify.hpp"

#include <cstdio>
#include <iostream>

namespace {

enum Exit
{
  kOk           = 0,
  kVerifyFailed = 1,
  kUsage        = 2,
  kRuntime      = 3,
};

int simulate(ppm::RunConfig const &cfg)
{
  auto const model = ppm::ValuationModel::parse(cfg.model);
  ppm::MechanismOptions mo;
  mo.static_price = cfg.price.value_or(0.0);
  mo.seed         = cfg.seed;
  ppm::RunOptions ro;
  ro.oracle = ppm::parse_oracle(cfg.oracle);
  auto const rows = ppm::sweep([&](ppm::Index) { return model; },
                               [&](ppm::ValuationModel const &m, ppm::Index n) {
                                 return ppm::make_mechanism(cfg.mechanism, m, n, mo);
                               },
                               cfg.ns, cfg.trials, cfg.seed, ro);
  ppm::emit_report(ppm::render(rows, cfg.format), cfg.output);
  return kOk;
}

int bounds(ppm::RunConfig const &cfg)
{
  std::vector<ppm::BoundReport> reports;
  if (cfg.claim == "mdp")
  {
    reports.push_back(ppm::mdp_bound_check(cfg.nmax));
  }
  else if (cfg.claim == "static-cases")
  {
    auto ns = cfg.ns.empty() ? std::vector<ppm::Index>{1000, 1000000, 1000000000} : cfg.ns;
    for (auto n : ns)
    {
      reports.push_back(ppm::exp_static_case_check(n));
    }
  }
  else
  {
    auto ns = cfg.ns.empty() ? std::vector<ppm::Index>{100, 1000, 10000, 100000} : cfg.ns;
    ppm::BoundReport r;
    r.claim     = "static-best";
    r.parameter = "n";
    r.slack     = 0.0;
    for (auto n : ns)
    {
      auto const best = ppm::exp_static_best(n);
      r.add(static_cast<double>(n), best.welfare, ppm::harmonic(n));
      r.note += (r.note.empty() ? "" : "; ") + ("n=" + std::to_string(n) + " p*=" + ppm::format_number(best.price) +
                                               " gap=" + ppm::format_number(best.gap));
    }
    reports.push_back(std::move(r));
  }
  ppm::emit_report(ppm::render(reports, cfg.format), cfg.output);
  bool passed = true;
  for (auto const &r : reports)
  {
    passed = passed && r.passed;
  }
  return passed ? kOk : kVerifyFailed;
}

int verify(ppm::RunConfig const &cfg)
{
  ppm::VerifyOptions vo;
  vo.trial_scale = cfg.trial_scale;
  vo.seed        = cfg.seed;
  auto const results = ppm::run_verification(vo, cfg.claims);
  bool passed        = true;
  std::string text;
  if (cfg.format == ppm::OutputFormat::Csv)
  {
    text = "claim,passed,seconds,detail\n";
    for (auto const &r : results)
    {
      text += r.id + ',' + (r.passed ? "true" : "false") + ',' + ppm::format_number(r.seconds) + ",\"" + r.detail +
              "\"\n";
    }
  }
  else
  {
    nlohmann::json doc = nlohmann::json::array();
    for (auto const &r : results)
    {
      doc.push_back({{"claim", r.id}, {"passed", r.passed}, {"seconds", r.seconds}, {"detail", r.detail}});
    }
    text = ppm::round_numbers(doc).dump(2) + '\n';
  }
  for (auto const &r : results)
  {
    passed = passed && r.passed;
    std::fprintf(stderr, "%s %s (%.1fs) %s\n", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.seconds,
                 r.detail.c_str());
  }
  ppm::emit_report(text, cfg.output);
  return passed ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char **argv)
{
  try
  {
    auto const cfg = ppm::parse_config(argc, argv);
    if (!cfg)
    {
      return kOk;
    }
    switch (cfg->command)
    {
    case ppm::Command::Simulate:
    case ppm::Command::Sweep: return simulate(*cfg);
    case ppm::Command::Bounds: return bounds(*cfg);
    case ppm::Command::Verify: return verify(*cfg);
    }
  }
  catch (ppm::UsageError const &e)
  {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  catch (ppm::ConfigError const &e)
  {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  }
  catch (ppm::ValidationError const &e)
  {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  }
  catch (ppm::DomainError const &e)
  {
    std::cerr << "domain error: " << e.what() << "\n";
    return kUsage;
  }
  catch (std::exception const &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}
