#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>

#include "hputune/config.hpp"
#include "hputune/errors.hpp"
#include "hputune/experiment.hpp"
#include "hputune/io.hpp"

using namespace hputune;

namespace {

const char* kGrid = R"(# comment line
[experiment]
scenario = repetition
budgets = 40, 80
strategies = RA; task-even, rep-even
trials = 500
seed = 9
norm = l2
unit_value = 0.01

[rate_model]
name = lin
kind = linear
slope = 1
intercept = 1

[rate_model]
name = tab
kind = table
points = 1:1, 2:3, 40:50   # trailing comment

[group]
id = short
tasks = 2
repetitions = 3
processing_rate = 2.0

[group]
tasks = 1
repetitions = 5
processing_rate = 3
type = voting
)";

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  FAIL("expected ConfigError");
  return 0;
}

const std::string kRateAndGroup =
    "[rate_model]\nname = p\nkind = linear\nslope = 1\nintercept = 0\n"
    "[group]\ntasks = 2\nrepetitions = 1\nprocessing_rate = 1\n";

}  // namespace

TEST_CASE("parse a full configuration") {
  const auto c = parse(kGrid);
  CHECK(c.scenario == Scenario::Repetition);
  CHECK(c.budgets == std::vector<std::int64_t>{40, 80});
  REQUIRE(c.strategies.size() == 3);
  CHECK(c.strategies[0].name() == "RA");
  CHECK(c.strategies[2].name() == "rep-even");
  CHECK(c.trials == 500);
  CHECK(c.seed == 9);
  CHECK(c.norm == ClosenessNorm::L2);
  CHECK(c.unit_value == 0.01);
  REQUIRE(c.rate_models.size() == 2);
  CHECK(c.rate_models[1].name == "tab");
  CHECK(rate_at_price(c.rate_models[1].model, 2) == 3.0);
  REQUIRE(c.groups.size() == 2);
  CHECK(c.groups[1].id == "g2");
  CHECK(c.groups[1].type == "voting");
  const auto groups = build_groups(c, c.rate_models[0].model);
  CHECK(groups[0].unit_cost() == 6);
  CHECK(groups[1].profile.processing_rate == 3.0);
  CHECK(groups[1].profile.label == "voting");
}

TEST_CASE("strategy names") {
  CHECK(parse_strategy("ea").kind == Strategy::Kind::Even);
  CHECK(parse_strategy(" Ha ").kind == Strategy::Kind::Heterogeneous);
  CHECK(parse_strategy("TASK-EVEN").kind == Strategy::Kind::TaskEven);
  const auto b = parse_strategy("bias(0.67)");
  CHECK(b.kind == Strategy::Kind::Biased);
  CHECK(b.alpha == 0.67);
  CHECK(b.name() == "bias(0.67)");
  CHECK_THROWS_AS(parse_strategy("greedy"), DomainError);
  CHECK_THROWS_AS(parse_strategy("bias(0.5)"), DomainError);
  CHECK_THROWS_AS(parse_strategy("bias(x)"), DomainError);
}

TEST_CASE("errors carry the offending line") {
  const std::string head = "[experiment]\nscenario = homogeneous\nbudgets = 10\n";
  CHECK(error_line(head + "strategies = EA, magic\n" + kRateAndGroup) == 4);
  CHECK(error_line(head + "strategies = EA\ncolour = red\n" + kRateAndGroup) == 5);
  CHECK(error_line(head + "strategies = EA\nstrategies = EA\n" + kRateAndGroup) == 5);
  CHECK(error_line(head + "strategies = EA\ntrials = many\n" + kRateAndGroup) == 5);
  CHECK(error_line("[experiment\n") == 1);
  CHECK(error_line("budgets = 3\n") == 1);
  CHECK(error_line(head + "strategies = EA\n[weird]\nx = 1\n" + kRateAndGroup) == 5);
  CHECK(error_line(head + "strategies = EA\n[rate_model]\nname = q\nkind = cubic\n") == 7);
  CHECK(error_line(head + "strategies = EA\n[rate_model]\nname = q\nkind = linear\nslope = -1\nintercept = 1\n") > 0);
}

TEST_CASE("scenario and strategy compatibility") {
  const std::string rep = "[experiment]\nscenario = repetition\nbudgets = 10\nstrategies = EA\n" + kRateAndGroup;
  CHECK_THROWS_AS(parse(rep), ConfigError);
  const std::string two_groups = "[experiment]\nscenario = homogeneous\nbudgets = 10\nstrategies = EA\n" +
                                 kRateAndGroup + "[group]\ntasks = 1\nrepetitions = 1\nprocessing_rate = 1\n";
  CHECK_THROWS_AS(parse(two_groups), ConfigError);
  const std::string no_budget = "[experiment]\nscenario = homogeneous\nbudgets = 0\nstrategies = EA\n" + kRateAndGroup;
  CHECK_THROWS_AS(parse(no_budget), ConfigError);
  const std::string missing = "[experiment]\nscenario = homogeneous\nbudgets = 10\n" + kRateAndGroup;
  CHECK_THROWS_AS(parse(missing), ConfigError);
}

TEST_CASE("experiment grid is complete and ordered") {
  auto c = parse(kGrid);
  c.budgets = {5, 40, 80};  // 5 cannot pay every repetition
  const auto rows = run_experiment(c);
  REQUIRE(rows.size() == c.rate_models.size() * c.budgets.size() * c.strategies.size());
  CHECK(rows[0].rate_model == "lin");
  CHECK(rows[0].budget == 5);
  CHECK_FALSE(rows[0].feasible);
  CHECK(rows[3].budget == 40);
  CHECK(rows[3].feasible);
  CHECK(rows.back().rate_model == "tab");
  CHECK(rows.back().strategy == "rep-even");
  std::ostringstream out;
  write_experiment(out, c, rows);
  const auto text = out.str();
  CHECK(text.rfind(std::string(kExperimentSchema) + "\n", 0) == 0);
  CHECK(text.find("repetition,lin,5,RA,infeasible,,,,,,,,,,\n") != std::string::npos);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 2 + rows.size());
}

TEST_CASE("probe file format") {
  std::istringstream good("# probe\nrandom,3,sorting\n0.5\n1.25\n2\nT0=2\n");
  const auto obs = read_probe(good);
  CHECK(obs.mode == ObservationMode::RandomPeriod);
  CHECK(obs.price == 3);
  CHECK(obs.task_type == "sorting");
  CHECK(obs.events == 3);
  CHECK(obs.duration == 2.0);

  std::istringstream counted("fixed,1,t\nN=100\nT0=50\n");
  CHECK(infer_onhold_rate(read_probe(counted)).mle == 2.0);

  std::istringstream unordered("fixed,1,t\n2\n1\nT0=5\n");
  CHECK_THROWS_AS(read_probe(unordered), ConfigError);
  std::istringstream unterminated("fixed,1,t\n1\n");
  CHECK_THROWS_AS(read_probe(unterminated), ConfigError);
  std::istringstream late("fixed,1,t\n1\n6\nT0=5\n");
  CHECK_THROWS_AS(read_probe(late), ConfigError);
  std::istringstream bad_mode("sometimes,1,t\nT0=5\n");
  CHECK_THROWS_AS(read_probe(bad_mode), ConfigError);

  std::ostringstream written;
  write_probe(written, obs);
  std::istringstream again(written.str());
  const auto back = read_probe(again);
  CHECK(back.arrivals == obs.arrivals);
  CHECK(back.duration == obs.duration);
}

TEST_CASE("allocation CSV round trip") {
  const auto c = parse(kGrid);
  const auto groups = build_groups(c, c.rate_models[0].model);
  const auto plan = to_plan(repetition_allocate(60, groups).allocation, groups);
  std::ostringstream out;
  write_allocation(out, plan, groups);
  std::istringstream in(out.str());
  const auto back = read_allocation(in, groups);
  CHECK(back.budget == 60);
  REQUIRE(back.tasks.size() == plan.tasks.size());
  for (std::size_t t = 0; t < plan.tasks.size(); ++t) {
    CHECK(back.tasks[t].group == plan.tasks[t].group);
    CHECK(back.tasks[t].repetitions == plan.tasks[t].repetitions);
  }
  std::istringstream missing("group,task,repetition,price\nshort,0,0,1\n");
  CHECK_THROWS_AS(read_allocation(missing, groups), ConfigError);
  std::istringstream unknown("group,task,repetition,price\nnope,0,0,1\n");
  CHECK_THROWS_AS(read_allocation(unknown, groups), ConfigError);
}

TEST_CASE("number formatting uses six significant digits") {
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(1.0 / 3.0) == "0.333333");
  CHECK(format_number(12345678.0) == "1.23457e+07");
}
