#pragma once

// Experiment configuration: a sectioned key/value text format. See
// docs/formats.md for the grammar.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hputune/allocator.hpp"
#include "hputune/market.hpp"

namespace hputune {

enum class Scenario { Homogeneous, Repetition, Heterogeneous };

std::string_view to_string(Scenario scenario);

struct Strategy {
  enum class Kind { Even, Repetition, Heterogeneous, Biased, TaskEven, RepEven };
  Kind kind = Kind::Even;
  double alpha = 0.0;  // Biased only

  /// Canonical name: EA, RA, HA, bias(<alpha>), task-even, rep-even.
  std::string name() const;
};

/// Case-insensitive; throws DomainError for unknown names.
Strategy parse_strategy(std::string_view text);

struct NamedRateModel {
  std::string name;
  RateModel model;
};

struct GroupSpec {
  std::string id;
  int tasks = 0;
  int repetitions = 0;
  double processing_rate = 0.0;
  std::string type = "task";
};

struct ExperimentConfig {
  Scenario scenario = Scenario::Homogeneous;
  std::vector<NamedRateModel> rate_models;
  std::vector<GroupSpec> groups;
  std::vector<std::int64_t> budgets;
  std::vector<Strategy> strategies;
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  ClosenessNorm norm = ClosenessNorm::L1;
  /// Currency per payment unit; only used for reporting.
  double unit_value = 1.0;
  std::string output;

  /// Throws ConfigError (line 0) on scenario/strategy incompatibilities.
  void validate(const std::string& source = "config") const;
};

/// Throws ConfigError carrying the offending line.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Task groups of the configuration priced under one rate model.
std::vector<TaskGroup> build_groups(const ExperimentConfig& config, const RateModel& model);

}  // namespace hputune
