#pragma once

// Experiment grid runner and strategy-vs-oracle comparison behind the CLI.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hputune/allocator.hpp"
#include "hputune/config.hpp"
#include "hputune/simulator.hpp"

namespace hputune {

inline constexpr std::string_view kExperimentSchema = "# hputune-experiment v1";
inline constexpr std::string_view kComparisonSchema = "# hputune-compare v1";

/// Payment plan chosen by one strategy. Throws InsufficientBudget when the
/// budget cannot pay every repetition.
PaymentPlan allocate_with(const Strategy& strategy, std::int64_t budget,
                          std::span<const TaskGroup> groups, ClosenessNorm norm, std::uint64_t seed);

struct ExperimentRow {
  std::string rate_model;
  std::int64_t budget = 0;
  std::string strategy;
  bool feasible = false;
  std::int64_t spent = 0;
  ObjectivePoint point;
  double closeness = 0.0;
  SimulationStats stats;
};

/// One row per (rate model, budget, strategy) in that order. Infeasible
/// cells are kept and flagged.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

void write_experiment(std::ostream& out, const ExperimentConfig& config,
                      std::span<const ExperimentRow> rows);

struct ComparisonRow {
  std::string rate_model;
  std::int64_t budget = 0;
  std::string strategy;
  /// ok, infeasible or too-large
  std::string status;
  /// exact-max, phase1-sum or closeness
  std::string objective;
  double strategy_value = 0.0;
  double oracle_value = 0.0;
  std::uint64_t states = 0;

  double relative_gap() const { return (strategy_value - oracle_value) / oracle_value; }
};

/// Scores every strategy against the exhaustive oracle of the objective it
/// targets: exact job E[max] for homogeneous strategies, the summed group
/// latency for RA and the grouped baselines, closeness for HA.
std::vector<ComparisonRow> compare_with_oracle(const ExperimentConfig& config,
                                               std::uint64_t state_limit = kOracleStateLimit);

void write_comparison(std::ostream& out, const ExperimentConfig& config,
                      std::span<const ComparisonRow> rows);

}  // namespace hputune
