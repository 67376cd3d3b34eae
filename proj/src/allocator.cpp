#include "hputune/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "hputune/errors.hpp"

namespace hputune {

namespace {

void require_groups(std::span<const TaskGroup> groups) {
  if (groups.empty()) throw DomainError("at least one task group is required");
}

void require_budget(std::int64_t budget, std::int64_t required) {
  if (budget < required) throw InsufficientBudget(budget, required);
}

// Distinct indices drawn uniformly from `pool` (partial Fisher-Yates).
std::vector<std::size_t> choose_distinct(std::vector<std::size_t> pool, std::size_t count,
                                         std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

// Hands out `remainder` extra units, at most one per repetition, in rounds:
// each round gives one unit to every task that still has an unpaid
// repetition, or to a seeded random subset of them when fewer units remain.
// Returns the number of extra units per task.
std::vector<int> spread_remainder(std::span<const int> repetitions, std::int64_t remainder,
                                  std::mt19937_64& rng) {
  std::vector<int> extras(repetitions.size(), 0);
  while (remainder > 0) {
    std::vector<std::size_t> eligible;
    for (std::size_t t = 0; t < repetitions.size(); ++t) {
      if (extras[t] < repetitions[t]) eligible.push_back(t);
    }
    if (eligible.empty()) throw DomainError("remainder exceeds one unit per repetition");
    const auto n = static_cast<std::int64_t>(eligible.size());
    if (remainder >= n) {
      for (std::size_t t : eligible) ++extras[t];
      remainder -= n;
    } else {
      for (std::size_t t : choose_distinct(std::move(eligible), remainder, rng)) ++extras[t];
      remainder = 0;
    }
  }
  return extras;
}

// Each repetition gets `base`; the first extras[t] repetitions of task t get one more.
std::vector<TaskPayments> payments_from_extras(std::span<const int> repetitions,
                                               std::span<const std::size_t> group_of, Price base,
                                               std::span<const int> extras) {
  std::vector<TaskPayments> tasks(repetitions.size());
  for (std::size_t t = 0; t < repetitions.size(); ++t) {
    tasks[t].group = group_of[t];
    tasks[t].repetitions.assign(static_cast<std::size_t>(repetitions[t]), base);
    for (int r = 0; r < extras[t]; ++r) ++tasks[t].repetitions[static_cast<std::size_t>(r)];
  }
  return tasks;
}

std::vector<TaskPayments> spread_evenly(std::int64_t budget, int tasks, int repetitions,
                                        std::mt19937_64& rng) {
  const std::int64_t reps = static_cast<std::int64_t>(tasks) * repetitions;
  std::vector<int> rep_counts(static_cast<std::size_t>(tasks), repetitions);
  std::vector<std::size_t> group_of(static_cast<std::size_t>(tasks), 0);
  const auto extras = spread_remainder(rep_counts, budget % reps, rng);
  return payments_from_extras(rep_counts, group_of, budget / reps, extras);
}

Price max_affordable_price(std::int64_t budget, std::int64_t base_cost, std::int64_t unit_cost) {
  return 1 + (budget - base_cost) / unit_cost;
}

std::int64_t spend_of(std::span<const Price> prices, std::span<const TaskGroup> groups) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < prices.size(); ++i) total += prices[i] * groups[i].unit_cost();
  return total;
}

// Budget sweep shared by the repetition and heterogeneous strategies. State x
// holds the best price vector found for spend headroom x.
Allocation budget_sweep(std::int64_t budget, std::span<const TaskGroup> groups,
                        const std::function<double(std::span<const Price>)>& objective,
                        double& best_value) {
  require_groups(groups);
  const std::int64_t base = minimum_budget(groups);
  require_budget(budget, base);
  const std::int64_t headroom = budget - base;
  const std::size_t n = groups.size();

  std::vector<std::vector<Price>> prices(static_cast<std::size_t>(headroom) + 1);
  std::vector<double> values(static_cast<std::size_t>(headroom) + 1);
  prices[0].assign(n, 1);
  values[0] = objective(prices[0]);

  std::vector<Price> candidate(n);
  for (std::int64_t x = 1; x <= headroom; ++x) {
    const auto xi = static_cast<std::size_t>(x);
    prices[xi] = prices[xi - 1];
    values[xi] = values[xi - 1];
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t cost = groups[i].unit_cost();
      if (cost > x) continue;
      const auto from = static_cast<std::size_t>(x - cost);
      candidate = prices[from];
      ++candidate[i];
      const double value = objective(candidate);
      if (value < values[xi]) {
        values[xi] = value;
        prices[xi] = candidate;
      }
    }
  }
  best_value = values.back();
  Allocation allocation;
  allocation.prices = prices.back();
  allocation.budget = budget;
  allocation.spent = spend_of(allocation.prices, groups);
  return allocation;
}

}  // namespace

TaskGroup::TaskGroup(std::string id, int tasks, int repetitions, TaskTypeProfile profile)
    : id(std::move(id)), tasks(tasks), repetitions(repetitions), profile(std::move(profile)) {
  if (tasks < 1) throw DomainError("task group needs at least one task");
  if (repetitions < 1) throw DomainError("task group needs at least one repetition");
}

std::int64_t minimum_budget(std::span<const TaskGroup> groups) {
  std::int64_t total = 0;
  for (const auto& g : groups) total += g.unit_cost();
  return total;
}

std::int64_t TaskPayments::total() const noexcept {
  return std::accumulate(repetitions.begin(), repetitions.end(), std::int64_t{0});
}

std::int64_t PaymentPlan::spent() const noexcept {
  std::int64_t total = 0;
  for (const auto& task : tasks) total += task.total();
  return total;
}

PaymentPlan to_plan(const Allocation& allocation, std::span<const TaskGroup> groups) {
  if (allocation.prices.size() != groups.size()) {
    throw DomainError("allocation does not cover every group");
  }
  PaymentPlan plan;
  plan.budget = allocation.budget;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int t = 0; t < groups[g].tasks; ++t) {
      plan.tasks.push_back(
          {g, std::vector<Price>(static_cast<std::size_t>(groups[g].repetitions),
                                 allocation.prices[g])});
    }
  }
  return plan;
}

double closeness(const ObjectivePoint& point, const ObjectivePoint& utopia, ClosenessNorm norm) {
  const double d1 = std::abs(point.phase1_sum - utopia.phase1_sum);
  const double d2 = std::abs(point.bottleneck - utopia.bottleneck);
  return norm == ClosenessNorm::L1 ? d1 + d2 : std::hypot(d1, d2);
}

PaymentPlan even_allocation(std::int64_t budget, int tasks, int repetitions, std::uint64_t seed) {
  if (tasks < 1 || repetitions < 1) throw DomainError("task and repetition counts must be >= 1");
  require_budget(budget, static_cast<std::int64_t>(tasks) * repetitions);
  std::mt19937_64 rng(seed);
  PaymentPlan plan;
  plan.budget = budget;
  plan.tasks = spread_evenly(budget, tasks, repetitions, rng);
  return plan;
}

PaymentPlan baseline_biased(std::int64_t budget, int tasks, int repetitions, double alpha,
                            std::uint64_t seed) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw DomainError("bias fraction must lie in (1/2, 1)");
  if (tasks < 2 || repetitions < 1) {
    throw DomainError("biased allocation needs at least two tasks and one repetition");
  }
  const int prior_count = tasks / 2;
  const int rest_count = tasks - prior_count;
  // Guard against alpha * B landing a hair below an integer.
  const auto prior_budget =
      static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(budget) + 1e-9));
  const std::int64_t rest_budget = budget - prior_budget;
  const std::int64_t prior_need = static_cast<std::int64_t>(prior_count) * repetitions;
  const std::int64_t rest_need = static_cast<std::int64_t>(rest_count) * repetitions;
  if (prior_budget < prior_need || rest_budget < rest_need) {
    // Smallest budget whose split pays one unit everywhere.
    const auto required = static_cast<std::int64_t>(
        std::ceil(std::max(prior_need / alpha, rest_need / (1.0 - alpha))));
    throw InsufficientBudget(budget, required);
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> all(static_cast<std::size_t>(tasks));
  std::iota(all.begin(), all.end(), 0);
  auto prior = choose_distinct(all, static_cast<std::size_t>(prior_count), rng);
  std::vector<bool> is_prior(static_cast<std::size_t>(tasks), false);
  for (std::size_t t : prior) is_prior[t] = true;

  auto prior_payments = spread_evenly(prior_budget, prior_count, repetitions, rng);
  auto rest_payments = spread_evenly(rest_budget, rest_count, repetitions, rng);

  PaymentPlan plan;
  plan.budget = budget;
  plan.tasks.resize(static_cast<std::size_t>(tasks));
  std::size_t next_prior = 0;
  std::size_t next_rest = 0;
  for (std::size_t t = 0; t < plan.tasks.size(); ++t) {
    plan.tasks[t] = is_prior[t] ? prior_payments[next_prior++] : rest_payments[next_rest++];
  }
  return plan;
}

Allocation baseline_task_even(std::int64_t budget, std::span<const TaskGroup> groups) {
  require_groups(groups);
  std::int64_t tasks = 0;
  int most_reps = 0;
  for (const auto& g : groups) {
    tasks += g.tasks;
    most_reps = std::max(most_reps, g.repetitions);
  }
  require_budget(budget, std::max(minimum_budget(groups), tasks * most_reps));
  const std::int64_t per_task = budget / tasks;
  Allocation a;
  a.budget = budget;
  for (const auto& g : groups) {
    a.prices.push_back(per_task / g.repetitions);
    a.spent += a.prices.back() * g.unit_cost();
  }
  return a;
}

Allocation baseline_rep_even(std::int64_t budget, std::span<const TaskGroup> groups) {
  require_groups(groups);
  const std::int64_t reps = minimum_budget(groups);
  require_budget(budget, reps);
  Allocation a;
  a.budget = budget;
  a.prices.assign(groups.size(), budget / reps);
  a.spent = (budget / reps) * reps;
  return a;
}

double group_expected_phase1(const TaskGroup& group, Price price, const QuadratureConfig& config) {
  const double rate = rate_at_price(group.profile.onhold, price);
  return expected_max_iid_erlang(group.tasks, group.repetitions, rate, config);
}

GroupCurves::GroupCurves(std::span<const TaskGroup> groups, QuadratureConfig config)
    : groups_(groups), config_(config), cache_(groups.size()) {}

double GroupCurves::phase1(std::size_t group, Price price) {
  if (price < 1) throw DomainError("price must be at least one unit");
  auto& curve = cache_.at(group);
  const auto slot = static_cast<std::size_t>(price);
  if (curve.size() <= slot) curve.resize(slot + 1, -1.0);
  if (curve[slot] < 0.0) curve[slot] = group_expected_phase1(groups_[group], price, config_);
  return curve[slot];
}

double GroupCurves::phase1_sum(std::span<const Price> prices) {
  double sum = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) sum += phase1(i, prices[i]);
  return sum;
}

double GroupCurves::bottleneck(std::span<const Price> prices) {
  double worst = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) worst = std::max(worst, total(i, prices[i]));
  return worst;
}

ObjectivePoint GroupCurves::objective(std::span<const Price> prices) {
  return {phase1_sum(prices), bottleneck(prices)};
}

RepetitionResult repetition_allocate(std::int64_t budget, std::span<const TaskGroup> groups,
                                     const QuadratureConfig& config) {
  GroupCurves curves(groups, config);
  RepetitionResult result;
  result.allocation = budget_sweep(
      budget, groups, [&](std::span<const Price> p) { return curves.phase1_sum(p); },
      result.objective);
  return result;
}

ObjectivePoint utopia_point(std::int64_t budget, std::span<const TaskGroup> groups,
                            const QuadratureConfig& config) {
  require_groups(groups);
  const std::int64_t base = minimum_budget(groups);
  require_budget(budget, base);
  GroupCurves curves(groups, config);
  const std::size_t n = groups.size();

  // O1: separable knapsack over groups; best[x] is the minimum summed
  // latency of the groups so far with extra spend exactly x.
  const auto headroom = static_cast<std::size_t>(budget - base);
  constexpr double kUnreachable = std::numeric_limits<double>::infinity();
  std::vector<double> best(headroom + 1, kUnreachable);
  best[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cost = static_cast<std::size_t>(groups[i].unit_cost());
    std::vector<double> next(headroom + 1, kUnreachable);
    for (std::size_t x = 0; x <= headroom; ++x) {
      if (best[x] == kUnreachable) continue;
      for (std::size_t extra = 0; x + extra * cost <= headroom; ++extra) {
        const double v = best[x] + curves.phase1(i, static_cast<Price>(extra) + 1);
        auto& slot = next[x + extra * cost];
        slot = std::min(slot, v);
      }
    }
    best.swap(next);
  }
  const double o1 = *std::min_element(best.begin(), best.end());

  // O2: the smallest threshold T such that pricing every group at its
  // cheapest price with latency <= T fits the budget.
  std::vector<double> thresholds;
  for (std::size_t i = 0; i < n; ++i) {
    const Price top = max_affordable_price(budget, base, groups[i].unit_cost());
    for (Price p = 1; p <= top; ++p) thresholds.push_back(curves.total(i, p));
  }
  std::sort(thresholds.begin(), thresholds.end());
  auto cost_at = [&](double threshold) -> std::int64_t {
    std::int64_t spend = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Price top = max_affordable_price(budget, base, groups[i].unit_cost());
      Price p = 1;
      while (p <= top && curves.total(i, p) > threshold) ++p;
      if (p > top) return std::numeric_limits<std::int64_t>::max();
      spend += p * groups[i].unit_cost();
    }
    return spend;
  };
  auto feasible = std::partition_point(thresholds.begin(), thresholds.end(),
                                       [&](double t) { return cost_at(t) > budget; });
  // The largest threshold (every group at price 1 worst case) is always feasible.
  const double o2 = feasible == thresholds.end() ? thresholds.back() : *feasible;
  return {o1, o2};
}

HeterogeneousResult heterogeneous_allocate(std::int64_t budget, std::span<const TaskGroup> groups,
                                           ClosenessNorm norm, const QuadratureConfig& config) {
  HeterogeneousResult result;
  result.utopia = utopia_point(budget, groups, config);
  GroupCurves curves(groups, config);
  result.allocation = budget_sweep(
      budget, groups,
      [&](std::span<const Price> p) { return closeness(curves.objective(p), result.utopia, norm); },
      result.closeness);
  result.point = curves.objective(result.allocation.prices);
  return result;
}

namespace {

bool uniform_group(const PaymentPlan& plan, std::size_t group, Price& price) {
  bool seen = false;
  for (const auto& task : plan.tasks) {
    if (task.group != group) continue;
    for (Price p : task.repetitions) {
      if (!seen) {
        price = p;
        seen = true;
      } else if (p != price) {
        return false;
      }
    }
  }
  return seen;
}

}  // namespace

void validate_plan(const PaymentPlan& plan, std::span<const TaskGroup> groups) {
  std::vector<int> counts(groups.size(), 0);
  for (const auto& task : plan.tasks) {
    if (task.group >= groups.size()) throw DomainError("plan references an unknown group");
    if (static_cast<int>(task.repetitions.size()) != groups[task.group].repetitions) {
      throw DomainError("plan task has the wrong number of repetitions");
    }
    for (Price p : task.repetitions) {
      if (p < 1) throw DomainError("every repetition must be paid at least one unit");
    }
    ++counts[task.group];
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (counts[g] != groups[g].tasks) throw DomainError("plan does not cover every task of a group");
  }
}

namespace {

// Tasks with identical payment multisets share one chain with copies.
std::vector<PhaseChain> chains_for(const PaymentPlan& plan, std::span<const TaskGroup> groups,
                                   std::optional<std::size_t> only_group) {
  std::map<std::pair<std::size_t, std::vector<Price>>, int> signatures;
  for (const auto& task : plan.tasks) {
    if (only_group && task.group != *only_group) continue;
    auto key = task.repetitions;
    std::sort(key.begin(), key.end());
    ++signatures[{task.group, std::move(key)}];
  }
  std::vector<PhaseChain> chains;
  for (const auto& [key, copies] : signatures) {
    PhaseChain chain;
    for (Price p : key.second) chain.rates.push_back(rate_at_price(groups[key.first].profile.onhold, p));
    chain.copies = copies;
    chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace

ObjectivePoint evaluate_plan(const PaymentPlan& plan, std::span<const TaskGroup> groups,
                             const QuadratureConfig& config) {
  require_groups(groups);
  validate_plan(plan, groups);
  ObjectivePoint point;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Price price = 0;
    double phase1 = 0.0;
    if (uniform_group(plan, g, price)) {
      phase1 = group_expected_phase1(groups[g], price, config);
    } else {
      const auto chains = chains_for(plan, groups, g);
      phase1 = expected_max_of_chains(chains, config);
    }
    point.phase1_sum += phase1;
    point.bottleneck = std::max(point.bottleneck, phase1 + groups[g].phase2_mean());
  }
  return point;
}

double exact_phase1_max(const PaymentPlan& plan, std::span<const TaskGroup> groups,
                        const QuadratureConfig& config) {
  require_groups(groups);
  validate_plan(plan, groups);
  return expected_max_of_chains(chains_for(plan, groups, std::nullopt), config);
}

std::uint64_t count_group_states(std::int64_t budget, std::span<const TaskGroup> groups,
                                 std::uint64_t limit) {
  require_groups(groups);
  const std::int64_t base = minimum_budget(groups);
  if (budget < base) return 0;
  const auto headroom = static_cast<std::size_t>(budget - base);
  const std::uint64_t cap = limit + 1;
  // ways[x]: number of ways the groups so far spend at most x extra units.
  std::vector<std::uint64_t> ways(headroom + 1, 1);
  for (const auto& group : groups) {
    const auto cost = static_cast<std::size_t>(group.unit_cost());
    std::vector<std::uint64_t> next(headroom + 1, 0);
    for (std::size_t x = 0; x <= headroom; ++x) {
      std::uint64_t total = 0;
      for (std::size_t used = 0; used <= x; used += cost) {
        total = std::min(cap, total + ways[x - used]);
      }
      next[x] = total;
    }
    ways.swap(next);
  }
  return ways[headroom];
}

OracleResult exhaustive_oracle(std::int64_t budget, std::span<const TaskGroup> groups,
                               OracleObjective objective, ClosenessNorm norm,
                               const QuadratureConfig& config, std::uint64_t limit) {
  require_groups(groups);
  const std::int64_t base = minimum_budget(groups);
  require_budget(budget, base);
  const std::uint64_t states = count_group_states(budget, groups, limit);
  if (states > limit) throw StateSpaceOverflow(states, limit);

  GroupCurves curves(groups, config);
  ObjectivePoint utopia;
  if (objective == OracleObjective::Closeness) utopia = utopia_point(budget, groups, config);

  std::function<double(std::span<const Price>)> score;
  switch (objective) {
    case OracleObjective::Phase1Sum:
      score = [&](std::span<const Price> p) { return curves.phase1_sum(p); };
      break;
    case OracleObjective::Bottleneck:
      score = [&](std::span<const Price> p) { return curves.bottleneck(p); };
      break;
    case OracleObjective::Closeness:
      score = [&](std::span<const Price> p) {
        return closeness(curves.objective(p), utopia, norm);
      };
      break;
    case OracleObjective::ExactMax:
      score = [&](std::span<const Price> p) {
        Allocation a{{p.begin(), p.end()}, budget, spend_of(p, groups)};
        return exact_phase1_max(to_plan(a, groups), groups, config);
      };
      break;
  }

  OracleResult result;
  result.states = states;
  result.value = std::numeric_limits<double>::infinity();
  std::vector<Price> prices(groups.size(), 1);
  std::function<void(std::size_t, std::int64_t)> walk = [&](std::size_t i, std::int64_t left) {
    if (i == groups.size()) {
      const double v = score(prices);
      if (v < result.value) {
        result.value = v;
        result.prices = prices;
      }
      return;
    }
    const std::int64_t cost = groups[i].unit_cost();
    for (Price p = 1; (p - 1) * cost <= left; ++p) {
      prices[i] = p;
      walk(i + 1, left - (p - 1) * cost);
    }
    prices[i] = 1;
  };
  walk(0, budget - base);
  return result;
}

HomogeneousEvaluator::HomogeneousEvaluator(const RateModel& model, int repetitions,
                                           std::int64_t max_price, const QuadratureConfig& config)
    : model_(model),
      evaluator_(
          [&] {
            config.validate();
            if (repetitions < 1 || max_price < 1) {
              throw DomainError("repetitions and max price must be >= 1");
            }
            double slowest = std::numeric_limits<double>::infinity();
            for (Price p = 1; p <= max_price; ++p) slowest = std::min(slowest, rate_at_price(model, p));
            return config.bound * repetitions / slowest;
          }(),
          2 * config.subdivisions),
      tail_tolerance_(config.tolerance) {}

double HomogeneousEvaluator::expected_max(std::span<const std::vector<Price>> payments) {
  std::map<std::vector<Price>, int> signatures;
  for (const auto& task : payments) {
    auto key = task;
    std::sort(key.begin(), key.end());
    ++signatures[std::move(key)];
  }
  std::vector<PhaseChain> chains;
  for (const auto& [key, copies] : signatures) {
    PhaseChain chain;
    for (Price p : key) chain.rates.push_back(rate_at_price(model_, p));
    chain.copies = copies;
    chains.push_back(std::move(chain));
  }
  return evaluator_.expected_max(chains, tail_tolerance_);
}

double HomogeneousEvaluator::expected_max(const PaymentPlan& plan) {
  std::vector<std::vector<Price>> payments;
  for (const auto& task : plan.tasks) payments.push_back(task.repetitions);
  return expected_max(payments);
}

RepetitionOracleResult exhaustive_repetition_oracle(std::int64_t budget, int tasks,
                                                    int repetitions, const RateModel& model,
                                                    const QuadratureConfig& config,
                                                    std::uint64_t limit) {
  if (tasks < 1 || repetitions < 1) throw DomainError("task and repetition counts must be >= 1");
  const std::int64_t slots = static_cast<std::int64_t>(tasks) * repetitions;
  require_budget(budget, slots);

  // Vectors of `slots` positive integers with sum <= B: C(B, slots).
  std::uint64_t states = 1;
  for (std::int64_t i = 1; i <= slots; ++i) {
    states = states * static_cast<std::uint64_t>(budget - slots + i) / static_cast<std::uint64_t>(i);
    if (states > limit) throw StateSpaceOverflow(limit + 1, limit);
  }

  HomogeneousEvaluator evaluator(model, repetitions, budget - slots + 1, config);
  std::map<std::vector<std::vector<Price>>, double> memo;
  RepetitionOracleResult result;
  result.states = states;
  result.value = std::numeric_limits<double>::infinity();

  std::vector<std::vector<Price>> payments(static_cast<std::size_t>(tasks),
                                           std::vector<Price>(static_cast<std::size_t>(repetitions), 1));
  std::function<void(std::int64_t, std::int64_t)> walk = [&](std::int64_t slot, std::int64_t left) {
    if (slot == slots) {
      auto key = payments;
      for (auto& task : key) std::sort(task.begin(), task.end());
      std::sort(key.begin(), key.end());
      auto it = memo.find(key);
      if (it == memo.end()) it = memo.emplace(std::move(key), evaluator.expected_max(payments)).first;
      if (it->second < result.value) {
        result.value = it->second;
        result.payments = payments;
      }
      return;
    }
    auto& cell = payments[static_cast<std::size_t>(slot / repetitions)]
                         [static_cast<std::size_t>(slot % repetitions)];
    for (Price extra = 0; extra <= left; ++extra) {
      cell = 1 + extra;
      walk(slot + 1, left - extra);
    }
    cell = 1;
  };
  walk(0, budget - slots);
  return result;
}

}  // namespace hputune
