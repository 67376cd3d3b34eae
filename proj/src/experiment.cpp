#include "hputune/experiment.hpp"

#include <ostream>

#include "hputune/errors.hpp"
#include "hputune/io.hpp"

namespace hputune {

PaymentPlan allocate_with(const Strategy& strategy, std::int64_t budget,
                          std::span<const TaskGroup> groups, ClosenessNorm norm,
                          std::uint64_t seed) {
  auto single = [&]() -> const TaskGroup& {
    if (groups.size() != 1) throw DomainError(strategy.name() + " needs exactly one task group");
    return groups.front();
  };
  switch (strategy.kind) {
    case Strategy::Kind::Even: {
      const auto& g = single();
      return even_allocation(budget, g.tasks, g.repetitions, seed);
    }
    case Strategy::Kind::Biased: {
      const auto& g = single();
      return baseline_biased(budget, g.tasks, g.repetitions, strategy.alpha, seed);
    }
    case Strategy::Kind::Repetition:
      return to_plan(repetition_allocate(budget, groups).allocation, groups);
    case Strategy::Kind::Heterogeneous:
      return to_plan(heterogeneous_allocate(budget, groups, norm).allocation, groups);
    case Strategy::Kind::TaskEven:
      return to_plan(baseline_task_even(budget, groups), groups);
    case Strategy::Kind::RepEven:
      return to_plan(baseline_rep_even(budget, groups), groups);
  }
  throw DomainError("unknown strategy");
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<ExperimentRow> rows;
  for (const auto& named : config.rate_models) {
    const auto groups = build_groups(config, named.model);
    for (const auto budget : config.budgets) {
      std::optional<ObjectivePoint> utopia;
      try {
        utopia = utopia_point(budget, groups);
      } catch (const InsufficientBudget&) {
      }
      for (const auto& strategy : config.strategies) {
        ExperimentRow row;
        row.rate_model = named.name;
        row.budget = budget;
        row.strategy = strategy.name();
        PaymentPlan plan;
        try {
          plan = allocate_with(strategy, budget, groups, config.norm, config.seed);
        } catch (const InsufficientBudget&) {
          rows.push_back(std::move(row));
          continue;
        }
        row.feasible = true;
        row.spent = plan.spent();
        row.point = evaluate_plan(plan, groups);
        if (utopia) row.closeness = closeness(row.point, *utopia, config.norm);
        JobSpec spec{groups, std::move(plan), config.trials, config.seed, 0};
        row.stats = simulate_job(spec);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_experiment(std::ostream& out, const ExperimentConfig& config,
                      std::span<const ExperimentRow> rows) {
  out << kExperimentSchema << '\n';
  out << "scenario,rate_model,budget,strategy,status,spent,spent_value,phase1_sum,bottleneck,"
         "closeness,sim_mean,sim_std_error,sim_ci_low,sim_ci_high,trials\n";
  const auto scenario = to_string(config.scenario);
  for (const auto& row : rows) {
    out << scenario << ',' << row.rate_model << ',' << row.budget << ',' << row.strategy << ',';
    if (!row.feasible) {
      out << "infeasible,,,,,,,,,," << '\n';
      continue;
    }
    const auto& s = row.stats;
    out << "ok," << row.spent << ',' << format_number(row.spent * config.unit_value) << ','
        << format_number(row.point.phase1_sum) << ',' << format_number(row.point.bottleneck) << ','
        << format_number(row.closeness) << ',' << format_number(s.mean) << ','
        << format_number(s.std_error) << ',' << format_number(s.mean - s.ci_half_width) << ','
        << format_number(s.mean + s.ci_half_width) << ',' << s.trials << '\n';
  }
}

std::vector<ComparisonRow> compare_with_oracle(const ExperimentConfig& config,
                                               std::uint64_t state_limit) {
  config.validate();
  std::vector<ComparisonRow> rows;
  for (const auto& named : config.rate_models) {
    const auto groups = build_groups(config, named.model);
    for (const auto budget : config.budgets) {
      for (const auto& strategy : config.strategies) {
        ComparisonRow row;
        row.rate_model = named.name;
        row.budget = budget;
        row.strategy = strategy.name();
        try {
          switch (strategy.kind) {
            case Strategy::Kind::Even:
            case Strategy::Kind::Biased: {
              row.objective = "exact-max";
              const auto& g = groups.front();
              const auto oracle = exhaustive_repetition_oracle(budget, g.tasks, g.repetitions,
                                                               named.model, {}, state_limit);
              const auto plan = allocate_with(strategy, budget, groups, config.norm, config.seed);
              const std::int64_t slots = g.unit_cost();
              HomogeneousEvaluator evaluator(named.model, g.repetitions, budget - slots + 1);
              row.strategy_value = evaluator.expected_max(plan);
              row.oracle_value = oracle.value;
              row.states = oracle.states;
              break;
            }
            case Strategy::Kind::Heterogeneous: {
              row.objective = "closeness";
              const auto oracle = exhaustive_oracle(budget, groups, OracleObjective::Closeness,
                                                    config.norm, {}, state_limit);
              row.strategy_value = heterogeneous_allocate(budget, groups, config.norm).closeness;
              row.oracle_value = oracle.value;
              row.states = oracle.states;
              break;
            }
            case Strategy::Kind::Repetition:
            case Strategy::Kind::TaskEven:
            case Strategy::Kind::RepEven: {
              row.objective = "phase1-sum";
              const auto oracle = exhaustive_oracle(budget, groups, OracleObjective::Phase1Sum,
                                                    config.norm, {}, state_limit);
              const auto plan = allocate_with(strategy, budget, groups, config.norm, config.seed);
              row.strategy_value = evaluate_plan(plan, groups).phase1_sum;
              row.oracle_value = oracle.value;
              row.states = oracle.states;
              break;
            }
          }
          row.status = "ok";
        } catch (const InsufficientBudget&) {
          row.status = "infeasible";
        } catch (const StateSpaceOverflow& e) {
          row.status = "too-large";
          row.states = e.states();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_comparison(std::ostream& out, const ExperimentConfig& config,
                      std::span<const ComparisonRow> rows) {
  out << kComparisonSchema << '\n';
  out << "scenario,rate_model,budget,strategy,status,objective,strategy_value,oracle_value,"
         "relative_gap,states\n";
  const auto scenario = to_string(config.scenario);
  for (const auto& row : rows) {
    out << scenario << ',' << row.rate_model << ',' << row.budget << ',' << row.strategy << ','
        << row.status << ',';
    if (row.status != "ok") {
      out << ",,,," << (row.status == "too-large" ? std::to_string(row.states) : "") << '\n';
      continue;
    }
    out << row.objective << ',' << format_number(row.strategy_value) << ','
        << format_number(row.oracle_value) << ',' << format_number(row.relative_gap()) << ','
        << row.states << '\n';
  }
}

}  // namespace hputune
