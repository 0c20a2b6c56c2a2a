#include "ppm/config.hpp"

#include "ppm/bounds.hpp"
#include "ppm/error.hpp"
#include "ppm/mechanism.hpp"
#include "ppm/oracle.hpp"
#include "ppm/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

namespace ppm {

namespace {

std::string joined(std::vector<std::string_view> const &ids)
{
  std::string out;
  for (auto id : ids)
  {
    out += (out.empty() ? "" : ", ") + std::string(id);
  }
  return out;
}

struct Raw
{
  std::string model, mech, output, format = "csv", oracle = "auto", claim;
  std::vector<std::string> claims;
  Index n = 0;
  std::vector<Index> ns;
  std::int64_t trials = 10000, nmax = 100000;
  std::uint64_t seed  = 1;
  double price        = 0.0;
  double scale        = 1.0;
};

void add_output(CLI::App *sub, Raw &raw)
{
  sub->add_option("-o,--output", raw.output, "output file (default: stdout)");
  sub->add_option("--format", raw.format, "csv or json")->capture_default_str();
}

void add_market(CLI::App *sub, Raw &raw)
{
  sub->add_option("--model", raw.model, "valuation model, e.g. \"independent: [exp(1)]\"");
  sub->add_option("--mech", raw.mech, "mechanism id: " + joined(mechanism_ids()));
  sub->add_option("--trials", raw.trials, "Monte Carlo trials")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--seed", raw.seed, "master seed")->capture_default_str();
  sub->add_option("--oracle", raw.oracle, "auto, matching, separable, itemwise or single")->capture_default_str();
  sub->add_option("--price", raw.price, "posted price for static-p");
  add_output(sub, raw);
}

}  // namespace

std::optional<RunConfig> parse_config(int argc, char const *const *argv)
{
  Raw raw;
  CLI::App app{"Posted-price mechanism simulation lab", "ppm-lab"};
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file with one [command] section of key = value lines");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  auto *simulate = app.add_subcommand("simulate", "run one market size");
  add_market(simulate, raw);
  simulate->add_option("--n", raw.n, "number of buyers")->check(CLI::PositiveNumber);

  auto *sweep = app.add_subcommand("sweep", "run a list of market sizes");
  add_market(sweep, raw);
  sweep->add_option("--ns", raw.ns, "comma separated numbers of buyers")->delimiter(',');

  auto *bounds = app.add_subcommand("bounds", "closed-form bound checks");
  bounds->add_option("--claim", raw.claim, "mdp, static-cases or static-best");
  bounds->add_option("--nmax", raw.nmax, "largest k for the mdp claim")->capture_default_str();
  bounds->add_option("--ns", raw.ns, "market sizes for the static claims")->delimiter(',');
  add_output(bounds, raw);

  auto *verify = app.add_subcommand("verify", "run the named claims");
  verify->add_option("--claim", raw.claims, "claim ids (default: all): " + joined(claim_ids()))->delimiter(',');
  verify->add_option("--scale", raw.scale, "multiplier on Monte Carlo trial counts")->capture_default_str();
  verify->add_option("--seed", raw.seed, "master seed");
  add_output(verify, raw);

  for (auto *sub : {simulate, sweep, bounds, verify})
  {
    sub->allow_config_extras(CLI::config_extras_mode::error);
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::CallForHelp const &)
  {
    std::cout << app.help();
    return std::nullopt;
  }
  catch (CLI::CallForAllHelp const &)
  {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  }
  catch (CLI::ParseError const &e)
  {
    throw UsageError(e.get_name() + ": " + e.what());
  }

  RunConfig cfg;
  cfg.trials = raw.trials;
  cfg.seed   = raw.seed;
  cfg.output = raw.output;
  cfg.oracle = raw.oracle;
  try
  {
    cfg.format = parse_format(raw.format);
    (void)parse_oracle(raw.oracle);
  }
  catch (ConfigError const &e)
  {
    throw UsageError(e.what());
  }

  auto require_market = [&](CLI::App *sub) {
    if (raw.mech.empty())
    {
      throw UsageError("missing --mech (valid: " + joined(mechanism_ids()) + ")");
    }
    auto const ids = mechanism_ids();
    if (std::find(ids.begin(), ids.end(), raw.mech) == ids.end())
    {
      throw UsageError("unknown mechanism '" + raw.mech + "' (valid: " + joined(ids) + ")");
    }
    if (raw.model.empty())
    {
      throw UsageError("missing --model");
    }
    try
    {
      (void)ValuationModel::parse(raw.model);
    }
    catch (std::invalid_argument const &e)
    {
      throw UsageError(std::string("bad --model: ") + e.what());
    }
    bool const priced = sub->count("--price") > 0;
    if (priced != (raw.mech == "static-p"))
    {
      throw UsageError(priced ? "--price only applies to --mech static-p" : "--mech static-p needs --price");
    }
    if (priced)
    {
      cfg.price = raw.price;
    }
    cfg.model     = raw.model;
    cfg.mechanism = raw.mech;
  };

  if (app.got_subcommand(simulate))
  {
    cfg.command = Command::Simulate;
    require_market(simulate);
    if (raw.n < 1)
    {
      throw UsageError("simulate needs --n");
    }
    cfg.ns = {raw.n};
  }
  else if (app.got_subcommand(sweep))
  {
    cfg.command = Command::Sweep;
    require_market(sweep);
    if (raw.ns.empty() || std::any_of(raw.ns.begin(), raw.ns.end(), [](Index n) { return n < 1; }))
    {
      throw UsageError("sweep needs --ns with positive entries");
    }
    cfg.ns = raw.ns;
  }
  else if (app.got_subcommand(bounds))
  {
    cfg.command = Command::Bounds;
    if (raw.claim != "mdp" && raw.claim != "static-cases" && raw.claim != "static-best")
    {
      throw UsageError("bounds needs --claim mdp, static-cases or static-best");
    }
    if (raw.claim == "mdp" && !raw.ns.empty())
    {
      throw UsageError("--ns does not apply to --claim mdp");
    }
    if (raw.claim != "mdp" && bounds->count("--nmax") > 0)
    {
      throw UsageError("--nmax only applies to --claim mdp");
    }
    if (raw.nmax < 2)
    {
      throw UsageError("--nmax must be at least 2");
    }
    cfg.claim = raw.claim;
    cfg.nmax  = raw.nmax;
    cfg.ns    = raw.ns;
  }
  else
  {
    cfg.command = Command::Verify;
    auto const ids = claim_ids();
    for (auto const &c : raw.claims)
    {
      if (std::find(ids.begin(), ids.end(), c) == ids.end())
      {
        throw UsageError("unknown claim '" + c + "' (valid: " + joined(ids) + ")");
      }
    }
    if (!(raw.scale > 0.0))
    {
      throw UsageError("--scale must be positive");
    }
    cfg.claims      = raw.claims;
    cfg.trial_scale = raw.scale;
    if (verify->count("--seed") == 0)
    {
      cfg.seed = VerifyOptions{}.seed;
    }
  }
  return cfg;
}

}  // namespace ppm
