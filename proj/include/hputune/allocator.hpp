#pragma once

// Budget allocation strategies for parallel crowdsourced task sets: even
// allocation for homogeneous jobs, the repetition-aware and heterogeneous
// budget sweeps, the baselines they are compared against, and exhaustive
// oracles for small instances.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hputune/latency.hpp"
#include "hputune/market.hpp"

namespace hputune {

/// Tasks of one type that each need the same number of repetitions. A group
/// is priced as a unit: raising its per-repetition price by one costs
/// `unit_cost()` = tasks * repetitions payment units.
struct TaskGroup {
  std::string id;
  int tasks;
  int repetitions;
  TaskTypeProfile profile;

  TaskGroup(std::string id, int tasks, int repetitions, TaskTypeProfile profile);

  std::int64_t unit_cost() const noexcept {
    return static_cast<std::int64_t>(tasks) * repetitions;
  }
  /// Expected processing time of one task; price-independent.
  double phase2_mean() const noexcept { return repetitions / profile.processing_rate; }
};

std::int64_t minimum_budget(std::span<const TaskGroup> groups);

/// One price per group, paid for every repetition of every task in it.
struct Allocation {
  std::vector<Price> prices;
  std::int64_t budget = 0;
  std::int64_t spent = 0;

  std::int64_t leftover() const noexcept { return budget - spent; }
};

/// Payments for every repetition of every task.
struct TaskPayments {
  std::size_t group = 0;
  std::vector<Price> repetitions;

  std::int64_t total() const noexcept;
};

struct PaymentPlan {
  std::vector<TaskPayments> tasks;
  std::int64_t budget = 0;

  std::int64_t spent() const noexcept;
};

/// Throws DomainError unless the plan pays every repetition of every task of
/// every group at least one unit.
void validate_plan(const PaymentPlan& plan, std::span<const TaskGroup> groups);

/// Expands group prices into per-repetition payments (tasks in group order).
PaymentPlan to_plan(const Allocation& allocation, std::span<const TaskGroup> groups);

/// (O1, O2): the summed expected on-hold latency of all groups, and the
/// largest expected on-hold plus processing latency of any group.
struct ObjectivePoint {
  double phase1_sum = 0.0;
  double bottleneck = 0.0;
};

enum class ClosenessNorm { L1, L2 };

double closeness(const ObjectivePoint& point, const ObjectivePoint& utopia,
                 ClosenessNorm norm = ClosenessNorm::L1);

// --- homogeneous jobs ------------------------------------------------------

/// Spreads B over N tasks x m repetitions so that payments differ by at most
/// one and sum to B. The plan has a single group (index 0). Throws
/// InsufficientBudget when B < m * N.
PaymentPlan even_allocation(std::int64_t budget, int tasks, int repetitions, std::uint64_t seed);

/// A seeded half of the tasks shares floor(alpha * B); the rest share the
/// remainder. Each half is spread like even_allocation. Requires 1/2 < alpha < 1.
PaymentPlan baseline_biased(std::int64_t budget, int tasks, int repetitions, double alpha,
                            std::uint64_t seed);

// --- grouped jobs ----------------------------------------------------------

/// Identical total per task, floor(B / tasks), split evenly over the task's
/// repetitions with each group's price rounded down. Requires that total to
/// cover the longest task.
Allocation baseline_task_even(std::int64_t budget, std::span<const TaskGroup> groups);

/// Identical price floor(B / repetitions) for every repetition of every task.
Allocation baseline_rep_even(std::int64_t budget, std::span<const TaskGroup> groups);

/// Expected on-hold latency of the slowest task in a group when every
/// repetition is paid `price`.
double group_expected_phase1(const TaskGroup& group, Price price,
                             const QuadratureConfig& config = {});

/// Caches group_expected_phase1 over prices for a set of groups.
class GroupCurves {
public:
  explicit GroupCurves(std::span<const TaskGroup> groups, QuadratureConfig config = {});

  double phase1(std::size_t group, Price price);
  double total(std::size_t group, Price price) { return phase1(group, price) + phase2(group); }
  double phase2(std::size_t group) const { return groups_[group].phase2_mean(); }

  ObjectivePoint objective(std::span<const Price> prices);
  double phase1_sum(std::span<const Price> prices);
  double bottleneck(std::span<const Price> prices);

  std::span<const TaskGroup> groups() const noexcept { return groups_; }

private:
  std::span<const TaskGroup> groups_;
  QuadratureConfig config_;
  std::vector<std::vector<double>> cache_;
};

struct RepetitionResult {
  Allocation allocation;
  double objective = 0.0;  // sum of group expected on-hold latencies
};

/// Budget sweep over spend x = 1..B' (B' = B - sum u_i, all prices starting
/// at 1). State x keeps its own price vector and is the best of state x-1 and
/// every state x-u_i with group i's price raised by one. Equal candidates go
/// to the lowest group index; a candidate must strictly improve on x-1.
RepetitionResult repetition_allocate(std::int64_t budget, std::span<const TaskGroup> groups,
                                     const QuadratureConfig& config = {});

struct HeterogeneousResult {
  Allocation allocation;
  ObjectivePoint point;
  ObjectivePoint utopia;
  double closeness = 0.0;
};

/// Exact independent minima of O1 and O2 under the budget.
ObjectivePoint utopia_point(std::int64_t budget, std::span<const TaskGroup> groups,
                            const QuadratureConfig& config = {});

/// The same sweep as repetition_allocate, minimizing closeness to the utopia point.
HeterogeneousResult heterogeneous_allocate(std::int64_t budget, std::span<const TaskGroup> groups,
                                           ClosenessNorm norm = ClosenessNorm::L1,
                                           const QuadratureConfig& config = {});

/// Objective point of an arbitrary payment plan. Groups whose tasks are not
/// all paid one uniform price are evaluated as phase chains.
ObjectivePoint evaluate_plan(const PaymentPlan& plan, std::span<const TaskGroup> groups,
                             const QuadratureConfig& config = {});

/// Exact expected on-hold latency of the whole job: E[max] over every task.
double exact_phase1_max(const PaymentPlan& plan, std::span<const TaskGroup> groups,
                        const QuadratureConfig& config = {});

// --- oracles ---------------------------------------------------------------

inline constexpr std::uint64_t kOracleStateLimit = 10'000'000;

enum class OracleObjective { Phase1Sum, Bottleneck, Closeness, ExactMax };

struct OracleResult {
  std::vector<Price> prices;
  double value = 0.0;
  std::uint64_t states = 0;
};

/// Number of group price vectors with every price >= 1 and total spend <= B,
/// saturated at limit + 1.
std::uint64_t count_group_states(std::int64_t budget, std::span<const TaskGroup> groups,
                                 std::uint64_t limit = kOracleStateLimit);

/// Enumerates every feasible group price vector and returns the first
/// minimizer of the selected objective. Throws StateSpaceOverflow above
/// `limit` states.
OracleResult exhaustive_oracle(std::int64_t budget, std::span<const TaskGroup> groups,
                               OracleObjective objective, ClosenessNorm norm = ClosenessNorm::L1,
                               const QuadratureConfig& config = {},
                               std::uint64_t limit = kOracleStateLimit);

struct RepetitionOracleResult {
  std::vector<std::vector<Price>> payments;  // [task][repetition]
  double value = 0.0;
  std::uint64_t states = 0;
};

/// Evaluates exact job on-hold E[max] for homogeneous per-repetition plans on
/// one shared grid so that candidate values compare consistently.
class HomogeneousEvaluator {
public:
  HomogeneousEvaluator(const RateModel& model, int repetitions, std::int64_t max_price,
                       const QuadratureConfig& config = {});

  double expected_max(const PaymentPlan& plan);
  double expected_max(std::span<const std::vector<Price>> payments);

private:
  RateModel model_;
  ChainMaxEvaluator evaluator_;
  double tail_tolerance_;
};

/// Enumerates every N x m matrix of per-repetition payments >= 1 with sum <= B
/// and returns the minimizer of exact job on-hold E[max].
RepetitionOracleResult exhaustive_repetition_oracle(std::int64_t budget, int tasks,
                                                    int repetitions, const RateModel& model,
                                                    const QuadratureConfig& config = {},
                                                    std::uint64_t limit = kOracleStateLimit);

}  // namespace hputune
