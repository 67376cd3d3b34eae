// hputune command-line front end: infer, allocate, simulate, experiment, compare.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "hputune/config.hpp"
#include "hputune/errors.hpp"
#include "hputune/experiment.hpp"
#include "hputune/io.hpp"
#include "hputune/market.hpp"
#include "hputune/simulator.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputError = 2,
  kNumericalError = 3,
  kInsufficientBudget = 4,
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::string out;
  std::string norm;
  std::string strategy;
};

hputune::ExperimentConfig load_with_overrides(const std::string& path, const Overrides& o) {
  auto config = hputune::load_config(path);
  if (o.seed) config.seed = *o.seed;
  if (o.trials) config.trials = *o.trials;
  if (!o.out.empty()) config.output = o.out;
  if (o.norm == "l1") config.norm = hputune::ClosenessNorm::L1;
  if (o.norm == "l2") config.norm = hputune::ClosenessNorm::L2;
  if (!o.strategy.empty()) {
    try {
      config.strategies = {hputune::parse_strategy(o.strategy)};
    } catch (const hputune::DomainError& e) {
      throw hputune::ConfigError("--strategy", 0, e.what());
    }
  }
  config.validate(path);
  return config;
}

// Writes to config.output when set, stdout otherwise.
template <class Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw hputune::ConfigError(path, 0, "cannot open output file");
  write(file);
}

int run_infer(const std::vector<std::string>& probes, const std::string& overall,
              const std::string& estimator_name, const std::string& out) {
  using namespace hputune;
  std::vector<ProbeObservation> observations;
  for (const auto& path : probes) observations.push_back(load_probe(path));

  std::ostringstream report;
  report << "# hputune-inference v1\n";
  report << "file,mode,price,type,events,duration,rate_mle,rate_debiased,degenerate\n";
  std::vector<PricePoint> points;
  std::vector<double> estimates;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& obs = observations[i];
    const auto est = infer_onhold_rate(obs);
    estimates.push_back(est.mle);
    points.push_back({static_cast<double>(obs.price), est.mle});
    report << probes[i] << ',' << (obs.mode == ObservationMode::FixedPeriod ? "fixed" : "random")
           << ',' << obs.price << ',' << obs.task_type << ',' << obs.events << ','
           << format_number(obs.duration) << ',' << format_number(est.mle) << ','
           << (est.debiased ? format_number(*est.debiased) : "") << ','
           << (est.degenerate ? "yes" : "no") << '\n';
  }

  std::set<double> prices;
  for (const auto& p : points) prices.insert(p.price);
  if (prices.size() >= 2) {
    const auto fit = fit_linear_model(points);
    report << "\nfit,slope,intercept,r_squared\n";
    report << "linear," << format_number(fit.slope) << ',' << format_number(fit.intercept) << ','
           << format_number(fit.r_squared) << '\n';
  }

  if (!overall.empty()) {
    const auto estimator = estimator_name == "harmonic" ? ProcessingEstimator::Harmonic
                                                        : ProcessingEstimator::Subtraction;
    const auto full = load_probe(overall);
    const auto est = infer_processing_rate(full, estimates.front(), estimator);
    report << "\nprocessing,estimator,overall_rate,onhold_rate,processing_rate\n";
    report << overall << ',' << estimator_name << ','
           << format_number(infer_onhold_rate(full).mle) << ','
           << format_number(estimates.front()) << ',' << format_number(est.rate) << '\n';
  }
  emit(out, [&](std::ostream& os) { os << report.str(); });
  return kOk;
}

int run_allocate(const hputune::ExperimentConfig& config) {
  using namespace hputune;
  const auto& named = config.rate_models.front();
  const auto groups = build_groups(config, named.model);
  const auto plan = allocate_with(config.strategies.front(), config.budgets.front(), groups,
                                  config.norm, config.seed);
  emit(config.output, [&](std::ostream& os) { write_allocation(os, plan, groups); });
  return kOk;
}

int run_simulate(const hputune::ExperimentConfig& config, const std::string& allocation_path) {
  using namespace hputune;
  const auto groups = build_groups(config, config.rate_models.front().model);
  std::ifstream in(allocation_path);
  if (!in) throw ConfigError(allocation_path, 0, "cannot open file");
  auto plan = read_allocation(in, groups, allocation_path);
  JobSpec spec{groups, std::move(plan), config.trials, config.seed, 0};
  const auto stats = simulate_job(spec);
  emit(config.output, [&](std::ostream& os) { write_simulation(os, stats, groups); });
  return kOk;
}

int run_experiment_cmd(const hputune::ExperimentConfig& config) {
  const auto rows = hputune::run_experiment(config);
  emit(config.output, [&](std::ostream& os) { hputune::write_experiment(os, config, rows); });
  return kOk;
}

int run_compare(const hputune::ExperimentConfig& config) {
  const auto rows = hputune::compare_with_oracle(config);
  emit(config.output, [&](std::ostream& os) { hputune::write_comparison(os, config, rows); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget allocation and latency simulation for crowdsourced task sets"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path;
  std::string config_positional;
  auto add_common = [&](CLI::App* cmd, bool positional_config) {
    if (positional_config) cmd->add_option("config_file", config_positional, "Configuration file");
    cmd->add_option("--config", config_path, "Configuration file");
    cmd->add_option("--seed", overrides.seed, "Random seed (u64)");
    cmd->add_option("--trials", overrides.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    cmd->add_option("--out", overrides.out, "Output path (default: stdout)");
    cmd->add_option("--norm", overrides.norm, "Closeness norm for HA")
        ->check(CLI::IsMember({"l1", "l2"}));
    cmd->add_option("--strategy", overrides.strategy, "Strategy override");
  };

  std::vector<std::string> probes;
  std::string overall_probe;
  std::string estimator = "subtraction";
  std::string infer_out;
  auto* infer = app.add_subcommand("infer", "Estimate clock rates from probe files");
  infer->add_option("probes", probes, "Probe observation files")->required();
  infer->add_option("--overall", overall_probe,
                    "Full-cycle probe; estimates the processing rate against the first probe");
  infer->add_option("--estimator", estimator, "Processing-rate estimator")
      ->check(CLI::IsMember({"subtraction", "harmonic"}));
  infer->add_option("--out", infer_out, "Output path (default: stdout)");

  auto* allocate = app.add_subcommand("allocate", "Allocate the first budget with one strategy");
  add_common(allocate, true);

  std::string allocation_path;
  auto* simulate = app.add_subcommand("simulate", "Simulate a job under an allocation CSV");
  simulate->add_option("config_file", config_positional, "Configuration file");
  simulate->add_option("allocation", allocation_path, "Allocation CSV");
  simulate->add_option("--config", config_path, "Configuration file");
  simulate->add_option("--seed", overrides.seed, "Random seed (u64)");
  simulate->add_option("--trials", overrides.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  simulate->add_option("--out", overrides.out, "Output path (default: stdout)");

  auto* experiment = app.add_subcommand("experiment", "Run the full experiment grid");
  add_common(experiment, true);
  auto* compare = app.add_subcommand("compare", "Score strategies against exhaustive oracles");
  add_common(compare, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (infer->parsed()) return run_infer(probes, overall_probe, estimator, infer_out);
    if (simulate->parsed() && !config_path.empty() && allocation_path.empty()) {
      allocation_path = config_positional;
    } else if (config_path.empty()) {
      config_path = config_positional;
    }
    if (simulate->parsed() && allocation_path.empty()) {
      std::cerr << "error: simulate needs an allocation CSV\n";
      return kUsage;
    }
    if (config_path.empty()) {
      std::cerr << "error: a configuration file is required\n";
      return kUsage;
    }
    const auto config = load_with_overrides(config_path, overrides);
    if (allocate->parsed()) return run_allocate(config);
    if (simulate->parsed()) return run_simulate(config, allocation_path);
    if (experiment->parsed()) return run_experiment_cmd(config);
    if (compare->parsed()) return run_compare(config);
  } catch (const hputune::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kInputError;
  } catch (const hputune::InsufficientBudget& e) {
    std::cerr << "insufficient budget: " << e.what() << '\n';
    return kInsufficientBudget;
  } catch (const hputune::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const hputune::InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kUsage;
}
