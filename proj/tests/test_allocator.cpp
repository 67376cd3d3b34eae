#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hputune/allocator.hpp"
#include "hputune/errors.hpp"
#include "oracles.hpp"

using namespace hputune;
using doctest::Approx;

namespace {

TaskGroup group(const std::string& id, int n, int k, const RateModel& model, double lp = 2.0) {
  return TaskGroup(id, n, k, TaskTypeProfile(id, lp, model));
}

std::vector<std::vector<Price>> sorted_payments(const PaymentPlan& plan) {
  std::vector<std::vector<Price>> out;
  for (const auto& t : plan.tasks) {
    auto r = t.repetitions;
    std::sort(r.begin(), r.end());
    out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_feasible(const PaymentPlan& plan, std::span<const TaskGroup> groups) {
  CHECK_NOTHROW(validate_plan(plan, groups));
  CHECK(plan.spent() <= plan.budget);
}

void check_feasible(const Allocation& a, std::span<const TaskGroup> groups) {
  std::int64_t spent = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    CHECK(a.prices[i] >= 1);
    spent += a.prices[i] * groups[i].unit_cost();
  }
  CHECK(spent == a.spent);
  CHECK(spent <= a.budget);
}

const RateModel kUnit = RateModel::linear(1.0, 0.0);

}  // namespace

TEST_CASE("even allocation examples") {
  const auto plan = even_allocation(10, 2, 2, 5);
  CHECK(sorted_payments(plan) == std::vector<std::vector<Price>>{{2, 3}, {2, 3}});
  CHECK(plan.spent() == 10);
  CHECK(sorted_payments(even_allocation(7, 2, 1, 5)) == std::vector<std::vector<Price>>{{3}, {4}});
  CHECK_THROWS_AS(even_allocation(3, 2, 2, 5), InsufficientBudget);
  CHECK_NOTHROW(even_allocation(4, 2, 2, 5));
  try {
    even_allocation(3, 2, 2, 5);
  } catch (const InsufficientBudget& e) {
    CHECK(e.required() == 4);
    CHECK(e.budget() == 3);
  }
}

TEST_CASE("even allocation structure") {
  for (int n = 1; n <= 7; ++n) {
    for (int m = 1; m <= 4; ++m) {
      for (std::int64_t b = n * m; b <= 60; b += 3) {
        const auto plan = even_allocation(b, n, m, static_cast<std::uint64_t>(b * 31 + n));
        REQUIRE(plan.tasks.size() == static_cast<std::size_t>(n));
        Price lo = plan.tasks[0].repetitions[0], hi = lo;
        for (const auto& t : plan.tasks) {
          CHECK(t.repetitions.size() == static_cast<std::size_t>(m));
          for (auto p : t.repetitions) {
            lo = std::min(lo, p);
            hi = std::max(hi, p);
          }
        }
        CHECK(hi - lo <= 1);
        CHECK(plan.spent() == b);
        // Task totals differ by at most one as well.
        std::vector<std::int64_t> totals;
        for (const auto& t : plan.tasks) totals.push_back(t.total());
        CHECK(*std::max_element(totals.begin(), totals.end()) - *std::min_element(totals.begin(), totals.end()) <= 1);
      }
    }
  }
}

TEST_CASE("even allocation is seeded and independent of any rate model") {
  CHECK(sorted_payments(even_allocation(23, 4, 3, 1)) == sorted_payments(even_allocation(23, 4, 3, 2)));
  const auto a = even_allocation(23, 4, 3, 8);
  const auto b = even_allocation(23, 4, 3, 8);
  for (std::size_t t = 0; t < a.tasks.size(); ++t) CHECK(a.tasks[t].repetitions == b.tasks[t].repetitions);
}

TEST_CASE("even per-repetition split minimizes the summed phase means") {
  for (const auto& model : {kUnit, RateModel::linear(2.0, 1.0), RateModel::quadratic(1.0, 1.0)}) {
    for (int m = 1; m <= 3; ++m) {
      for (std::int64_t spend = m; spend <= 12; ++spend) {
        double best = 1e300;
        oracle::for_each_composition(m, spend, [&](const std::vector<std::int64_t>& p) {
          std::int64_t s = 0;
          double v = 0;
          for (auto x : p) {
            s += x;
            v += 1.0 / rate_at_price(model, x);
          }
          if (s == spend) best = std::min(best, v);
        });
        const auto plan = even_allocation(spend, 1, m, 0);
        double even = 0;
        for (auto p : plan.tasks[0].repetitions) even += 1.0 / rate_at_price(model, p);
        CHECK(even <= best * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("biased baseline") {
  CHECK_THROWS_AS(baseline_biased(1000, 100, 5, 0.5, 1), DomainError);
  CHECK_THROWS_AS(baseline_biased(1000, 100, 5, 1.0, 1), DomainError);
  const auto plan = baseline_biased(1000, 100, 5, 0.67, 1);
  check_feasible(plan, std::vector{group("g", 100, 5, kUnit)});
  CHECK(plan.spent() == 1000);
  std::vector<std::int64_t> totals;
  for (const auto& t : plan.tasks) totals.push_back(t.total());
  std::sort(totals.begin(), totals.end());
  std::int64_t low_half = 0, high_half = 0;
  for (int i = 0; i < 50; ++i) low_half += totals[static_cast<std::size_t>(i)];
  for (int i = 50; i < 100; ++i) high_half += totals[static_cast<std::size_t>(i)];
  CHECK(high_half == 670);
  CHECK(low_half == 330);
  for (const auto& t : plan.tasks) {
    for (auto p : t.repetitions) CHECK((p == 1 || p == 2 || p == 3));
  }
  CHECK_THROWS_AS(baseline_biased(9, 2, 5, 0.75, 1), InsufficientBudget);
}

TEST_CASE("grouped baselines") {
  const auto m = RateModel::linear(1, 1);
  const std::vector<TaskGroup> g{group("a", 2, 3, m), group("b", 2, 5, m)};
  const auto te = baseline_task_even(120, g);
  CHECK(te.prices == std::vector<Price>{10, 6});
  CHECK(static_cast<double>(te.prices[1]) / te.prices[0] == Approx(0.6));
  const auto re = baseline_rep_even(80, g);
  CHECK(re.prices == std::vector<Price>{5, 5});
  CHECK(3.0 * re.prices[0] / (5.0 * re.prices[1]) == Approx(0.6));
  check_feasible(te, g);
  check_feasible(re, g);
  CHECK_THROWS_AS(baseline_rep_even(15, g), InsufficientBudget);
  // Every task must afford one unit per repetition of the longest task.
  CHECK_THROWS_AS(baseline_task_even(19, g), InsufficientBudget);
  CHECK_NOTHROW(baseline_task_even(20, g));
}

TEST_CASE("single group: baselines agree with each other and with EA when B divides evenly") {
  const std::vector<TaskGroup> g{group("a", 4, 3, kUnit)};
  for (std::int64_t b : {12, 24, 60}) {
    const auto ea = even_allocation(b, 4, 3, 1);
    CHECK(sorted_payments(to_plan(baseline_task_even(b, g), g)) == sorted_payments(ea));
    CHECK(sorted_payments(to_plan(baseline_rep_even(b, g), g)) == sorted_payments(ea));
  }
  CHECK(baseline_task_even(29, g).prices == baseline_rep_even(29, g).prices);
}

TEST_CASE("group expected phase-1 latency") {
  CHECK(group_expected_phase1(group("a", 1, 1, kUnit), 4) == Approx(0.25));
  CHECK(group_expected_phase1(group("a", 4, 1, kUnit), 1) == Approx(25.0 / 12.0));
  CHECK(group_expected_phase1(group("a", 2, 2, kUnit), 1) == Approx(2.75).epsilon(1e-9));
  const auto g = group("a", 3, 2, RateModel::linear(1, 1));
  for (Price p = 1; p < 20; ++p) CHECK(group_expected_phase1(g, p + 1) < group_expected_phase1(g, p));
}

TEST_CASE("repetition algorithm examples") {
  const std::vector<TaskGroup> two{group("a", 1, 1, kUnit), group("b", 1, 2, kUnit)};
  const auto r = repetition_allocate(9, two);
  CHECK(r.allocation.prices == std::vector<Price>{3, 3});
  CHECK(r.objective == Approx(1.0));
  CHECK(r.allocation.leftover() == 0);

  const std::vector<TaskGroup> one{group("a", 1, 1, kUnit)};
  const auto s = repetition_allocate(5, one);
  CHECK(s.allocation.prices == std::vector<Price>{5});
  CHECK(s.objective == Approx(0.2));

  const std::vector<TaskGroup> eight{group("a", 2, 2, kUnit), group("b", 1, 4, kUnit)};
  CHECK_THROWS_AS(repetition_allocate(7, eight), InsufficientBudget);
}

TEST_CASE("leftover smaller than every unit cost is reported") {
  const std::vector<TaskGroup> g{group("a", 2, 2, kUnit), group("b", 3, 1, kUnit)};
  const auto r = repetition_allocate(9, g);
  CHECK(r.allocation.spent == 7);
  CHECK(r.allocation.leftover() == 2);
}

TEST_CASE("exhaustive oracle examples") {
  const std::vector<TaskGroup> two{group("a", 1, 1, kUnit), group("b", 1, 2, kUnit)};
  const auto o = exhaustive_oracle(9, two, OracleObjective::Phase1Sum);
  CHECK(o.prices == std::vector<Price>{3, 3});
  CHECK(o.value == Approx(1.0));

  const std::vector<TaskGroup> pair{group("x", 1, 1, kUnit), group("y", 1, 1, kUnit)};
  const auto e = exhaustive_oracle(7, pair, OracleObjective::ExactMax);
  auto prices = e.prices;
  std::sort(prices.begin(), prices.end());
  CHECK(prices == std::vector<Price>{3, 4});
  CHECK(e.value == Approx(expected_max_two_exp(3, 4)).epsilon(1e-8));

  CHECK_THROWS_AS(exhaustive_oracle(2, two, OracleObjective::Phase1Sum), InsufficientBudget);
  try {
    exhaustive_oracle(500, two, OracleObjective::Phase1Sum, ClosenessNorm::L1, {}, 1000);
    FAIL("expected StateSpaceOverflow");
  } catch (const StateSpaceOverflow& err) {
    CHECK(err.states() > 1000);
  }
  CHECK(count_group_states(9, two) == 16);  // 7 + 5 + 3 + 1
}

TEST_CASE("repetition oracle matches an independent enumeration") {
  // Two tasks, two repetitions, Linear(1,0): evaluate every payment matrix.
  const std::int64_t budget = 9;
  double best = 1e300;
  oracle::for_each_composition(4, budget, [&](const std::vector<std::int64_t>& p) {
    const std::vector<double> t1{static_cast<double>(p[0]), static_cast<double>(p[1])};
    const std::vector<double> t2{static_cast<double>(p[2]), static_cast<double>(p[3])};
    best = std::min(best, oracle::expected_max(
                              [&](double x) { return oracle::exp_sum_cdf(t1, x) * oracle::exp_sum_cdf(t2, x); }, 80.0));
  });
  const auto r = exhaustive_repetition_oracle(budget, 2, 2, kUnit);
  CHECK(r.value == Approx(best).epsilon(1e-7));
  std::int64_t spent = 0;
  for (const auto& t : r.payments) {
    for (auto p : t) spent += p;
  }
  CHECK(spent == budget);
}

TEST_CASE("RA matches the oracle and beats the baselines on small instances") {
  const std::vector<RateModel> models = {kUnit, RateModel::linear(1, 1), RateModel::linear(0.1, 10),
                                         RateModel::quadratic(1, 1), RateModel::logarithmic(1.0)};
  for (const auto& model : models) {
    const std::vector<TaskGroup> g{group("a", 1, 3, model), group("b", 2, 1, model), group("c", 2, 2, model)};
    GroupCurves curves(g);
    for (std::int64_t b = 9; b <= 40; ++b) {
      const auto ra = repetition_allocate(b, g);
      check_feasible(ra.allocation, g);
      const auto oracle = exhaustive_oracle(b, g, OracleObjective::Phase1Sum);
      CHECK(ra.objective <= oracle.value * 1.05);
      CHECK(ra.objective == Approx(curves.phase1_sum(ra.allocation.prices)));
      CHECK(ra.objective <= curves.phase1_sum(baseline_rep_even(b, g).prices) + 1e-12);
      if (b >= 5 * 3) CHECK(ra.objective <= curves.phase1_sum(baseline_task_even(b, g).prices) + 1e-12);
    }
  }
}

TEST_CASE("RA objective never increases with budget") {
  const auto model = RateModel::linear(1, 1);
  const std::vector<TaskGroup> g{group("a", 3, 3, model), group("b", 2, 5, model), group("c", 1, 1, model)};
  double previous = 1e300;
  for (std::int64_t b = 20; b <= 300; ++b) {
    const double v = repetition_allocate(b, g).objective;
    CHECK(v <= previous);
    previous = v;
  }
}

TEST_CASE("utopia point is the component-wise minimum") {
  const auto model = RateModel::linear(1, 1);
  const std::vector<TaskGroup> g{group("a", 2, 3, model, 2.0), group("b", 1, 2, model, 0.3)};
  GroupCurves curves(g);
  ObjectivePoint previous{1e300, 1e300};
  for (std::int64_t b = 8; b <= 60; ++b) {
    const auto up = utopia_point(b, g);
    double o1 = 1e300, o2 = 1e300;
    for (Price p1 = 1; p1 * 6 + 2 <= b; ++p1) {
      for (Price p2 = 1; p1 * 6 + p2 * 2 <= b; ++p2) {
        const std::vector<Price> p{p1, p2};
        o1 = std::min(o1, curves.phase1_sum(p));
        o2 = std::min(o2, curves.bottleneck(p));
      }
    }
    CHECK(up.phase1_sum == Approx(o1).epsilon(1e-12));
    CHECK(up.bottleneck == Approx(o2).epsilon(1e-12));
    CHECK(up.phase1_sum <= previous.phase1_sum);
    CHECK(up.bottleneck <= previous.bottleneck);
    previous = up;
  }
}

TEST_CASE("heterogeneous algorithm") {
  const auto model = RateModel::linear(1, 1);

  SUBCASE("identical groups get equal prices up to one leftover unit") {
    const std::vector<TaskGroup> g{group("a", 2, 3, model, 2.0), group("b", 2, 3, model, 2.0)};
    for (std::int64_t b = 12; b <= 80; ++b) {
      const auto ha = heterogeneous_allocate(b, g);
      CHECK(std::abs(ha.allocation.prices[0] - ha.allocation.prices[1]) <= 1);
      check_feasible(ha.allocation, g);
    }
  }

  SUBCASE("regression at B=60") {
    const std::vector<TaskGroup> g{group("a", 2, 3, model, 2.0), group("b", 2, 5, model, 3.0)};
    const auto ha = heterogeneous_allocate(60, g);
    CHECK(ha.allocation.prices == std::vector<Price>{3, 4});
    CHECK(ha.allocation.spent == 58);
    CHECK(ha.closeness == Approx(17.0 / 1024.0).epsilon(1e-9));
    GroupCurves curves(g);
    const double te = closeness(curves.objective(baseline_task_even(60, g).prices), ha.utopia);
    const double re = closeness(curves.objective(baseline_rep_even(60, g).prices), ha.utopia);
    CHECK(ha.closeness <= te);
    CHECK(ha.closeness <= re);
  }

  SUBCASE("a very slow processing group is never priced below the O1-only choice") {
    const std::vector<TaskGroup> g{group("a", 2, 3, model, 2.0), group("b", 2, 5, model, 0.01)};
    GroupCurves curves(g);
    for (std::int64_t b = 16; b <= 100; ++b) {
      const auto ha = heterogeneous_allocate(b, g);
      const auto ra = repetition_allocate(b, g);
      CHECK(curves.total(1, ha.allocation.prices[1]) >= curves.total(0, ha.allocation.prices[0]));
      CHECK(ha.allocation.prices[1] >= ra.allocation.prices[1]);
      const auto cl = exhaustive_oracle(b, g, OracleObjective::Closeness);
      const auto o1 = exhaustive_oracle(b, g, OracleObjective::Phase1Sum);
      CHECK(cl.prices[1] >= o1.prices[1]);
    }
  }

  SUBCASE("L2 closeness") {
    const ObjectivePoint p{3.0, 5.0}, u{1.0, 4.0};
    CHECK(closeness(p, u, ClosenessNorm::L1) == Approx(3.0));
    CHECK(closeness(p, u, ClosenessNorm::L2) == Approx(std::sqrt(5.0)));
    const std::vector<TaskGroup> g{group("a", 2, 3, model, 2.0), group("b", 2, 5, model, 3.0)};
    const auto ha = heterogeneous_allocate(60, g, ClosenessNorm::L2);
    CHECK(ha.closeness == Approx(closeness(ha.point, ha.utopia, ClosenessNorm::L2)));
  }
}

TEST_CASE("every strategy output is feasible") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> small(1, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const auto model = RateModel::linear(0.5 + trial % 3, 1.0);
    std::vector<TaskGroup> g;
    const int count = 1 + trial % 3;
    for (int i = 0; i < count; ++i) {
      g.push_back(group("g" + std::to_string(i), small(rng), small(rng), model, 0.5 + small(rng)));
    }
    const std::int64_t b = minimum_budget(g) + small(rng) * 7;
    check_feasible(repetition_allocate(b, g).allocation, g);
    check_feasible(heterogeneous_allocate(b, g).allocation, g);
    check_feasible(baseline_rep_even(b, g), g);
    check_feasible(to_plan(baseline_rep_even(b, g), g), g);
  }
}

TEST_CASE("plan evaluation") {
  const auto model = RateModel::linear(1, 1);
  const std::vector<TaskGroup> g{group("a", 2, 2, model, 2.0), group("b", 1, 3, model, 1.0)};
  GroupCurves curves(g);
  const std::vector<Price> prices{3, 2};
  Allocation a{prices, 100, 18};
  const auto point = evaluate_plan(to_plan(a, g), g);
  CHECK(point.phase1_sum == Approx(curves.phase1_sum(prices)).epsilon(1e-8));
  CHECK(point.bottleneck == Approx(curves.bottleneck(prices)).epsilon(1e-8));

  // A non-uniform group: task 0 pays (4, 1), task 1 pays (2, 2).
  PaymentPlan plan;
  plan.budget = 100;
  plan.tasks = {{0, {4, 1}}, {0, {2, 2}}, {1, {1, 1, 1}}};
  const double ref_group0 = oracle::expected_max(
      [](double t) { return oracle::exp_sum_cdf({5, 2}, t) * oracle::exp_sum_cdf({3, 3}, t); }, 80.0);
  const double ref_group1 = oracle::max_iid_erlang(1, 3, 2.0);
  const auto mixed = evaluate_plan(plan, g);
  CHECK(mixed.phase1_sum == Approx(ref_group0 + ref_group1).epsilon(1e-7));
  const double ref_job = oracle::expected_max(
      [](double t) {
        return oracle::exp_sum_cdf({5, 2}, t) * oracle::exp_sum_cdf({3, 3}, t) * oracle::erlang_cdf(3, 2.0, t);
      },
      120.0);
  CHECK(exact_phase1_max(plan, g) == Approx(ref_job).epsilon(1e-7));

  PaymentPlan broken = plan;
  broken.tasks[0].repetitions[1] = 0;
  CHECK_THROWS_AS(validate_plan(broken, g), DomainError);
  broken = plan;
  broken.tasks.pop_back();
  CHECK_THROWS_AS(validate_plan(broken, g), DomainError);
}
