#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "hputune/allocator.hpp"
#include "hputune/config.hpp"
#include "hputune/errors.hpp"
#include "hputune/experiment.hpp"
#include "hputune/io.hpp"
#include "hputune/latency.hpp"
#include "hputune/market.hpp"
#include "hputune/simulator.hpp"

namespace py = pybind11;
using namespace hputune;

namespace {

using Groups = std::vector<TaskGroup>;

std::string allocation_csv(const PaymentPlan& plan, const Groups& groups) {
  std::ostringstream out;
  write_allocation(out, plan, groups);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_hputune, m) {
  m.doc() = "Budget allocation and latency simulation for crowdsourced task sets";

  auto base = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ValidityError>(m, "ValidityError", PyExc_ValueError);
  py::register_exception<InsufficientBudget>(m, "InsufficientBudget", PyExc_ValueError);
  py::register_exception<InsufficientData>(m, "InsufficientData", PyExc_ValueError);
  py::register_exception<InconsistentProbe>(m, "InconsistentProbe", PyExc_ValueError);
  py::register_exception<StateSpaceOverflow>(m, "StateSpaceOverflow", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  (void)base;

  // market
  py::class_<RateModel>(m, "RateModel")
      .def_static("linear", &RateModel::linear, py::arg("slope"), py::arg("intercept"))
      .def_static("quadratic", &RateModel::quadratic, py::arg("constant"), py::arg("coefficient"))
      .def_static("logarithmic", &RateModel::logarithmic, py::arg("scale"))
      .def_static("table", &RateModel::table, py::arg("points"))
      .def("rate", [](const RateModel& model, Price price) { return rate_at_price(model, price); })
      .def("__repr__", &RateModel::describe);
  m.def("rate_at_price", &rate_at_price, py::arg("model"), py::arg("price"));

  py::class_<TaskTypeProfile>(m, "TaskTypeProfile")
      .def(py::init<std::string, double, RateModel>(), py::arg("label"), py::arg("processing_rate"),
           py::arg("onhold"))
      .def_readonly("label", &TaskTypeProfile::label)
      .def_readonly("processing_rate", &TaskTypeProfile::processing_rate)
      .def_readonly("onhold", &TaskTypeProfile::onhold);

  py::enum_<ObservationMode>(m, "ObservationMode")
      .value("FIXED", ObservationMode::FixedPeriod)
      .value("RANDOM", ObservationMode::RandomPeriod);

  py::class_<ProbeObservation>(m, "ProbeObservation")
      .def(py::init<>())
      .def_readwrite("mode", &ProbeObservation::mode)
      .def_readwrite("events", &ProbeObservation::events)
      .def_readwrite("duration", &ProbeObservation::duration)
      .def_readwrite("arrivals", &ProbeObservation::arrivals)
      .def_readwrite("price", &ProbeObservation::price)
      .def_readwrite("task_type", &ProbeObservation::task_type);

  py::class_<OnholdRateEstimate>(m, "OnholdRateEstimate")
      .def_readonly("mle", &OnholdRateEstimate::mle)
      .def_readonly("debiased", &OnholdRateEstimate::debiased)
      .def_readonly("degenerate", &OnholdRateEstimate::degenerate);
  m.def("infer_onhold_rate", &infer_onhold_rate, py::arg("observation"));
  m.def("load_probe", &load_probe, py::arg("path"));

  py::enum_<ProcessingEstimator>(m, "ProcessingEstimator")
      .value("SUBTRACTION", ProcessingEstimator::Subtraction)
      .value("HARMONIC", ProcessingEstimator::Harmonic);
  m.def(
      "processing_rate",
      [](double overall, double onhold, ProcessingEstimator estimator) {
        return processing_rate_from_rates(overall, onhold, estimator).rate;
      },
      py::arg("overall_rate"), py::arg("onhold_rate"), py::arg("estimator") = ProcessingEstimator::Subtraction);

  py::class_<LinearFit>(m, "LinearFit")
      .def_readonly("model", &LinearFit::model)
      .def_readonly("slope", &LinearFit::slope)
      .def_readonly("intercept", &LinearFit::intercept)
      .def_readonly("r_squared", &LinearFit::r_squared);
  m.def(
      "fit_linear_model",
      [](const std::vector<std::pair<double, double>>& points) {
        std::vector<PricePoint> pts;
        for (const auto& [p, r] : points) pts.push_back({p, r});
        return fit_linear_model(pts);
      },
      py::arg("points"));

  // latency
  m.def("expected_max_iid_exp", &expected_max_iid_exp, py::arg("n"), py::arg("rate"));
  m.def(
      "expected_max_iid_erlang", [](int n, int k, double rate) { return expected_max_iid_erlang(n, k, rate); },
      py::arg("n"), py::arg("k"), py::arg("rate"));

  // allocator
  py::class_<TaskGroup>(m, "TaskGroup")
      .def(py::init<std::string, int, int, TaskTypeProfile>(), py::arg("id"), py::arg("tasks"),
           py::arg("repetitions"), py::arg("profile"))
      .def_readonly("id", &TaskGroup::id)
      .def_readonly("tasks", &TaskGroup::tasks)
      .def_readonly("repetitions", &TaskGroup::repetitions)
      .def_readonly("profile", &TaskGroup::profile)
      .def("unit_cost", &TaskGroup::unit_cost);

  py::class_<Allocation>(m, "Allocation")
      .def_readonly("prices", &Allocation::prices)
      .def_readonly("budget", &Allocation::budget)
      .def_readonly("spent", &Allocation::spent)
      .def("leftover", &Allocation::leftover);

  py::class_<TaskPayments>(m, "TaskPayments")
      .def_readonly("group", &TaskPayments::group)
      .def_readonly("repetitions", &TaskPayments::repetitions);

  py::class_<PaymentPlan>(m, "PaymentPlan")
      .def_readonly("tasks", &PaymentPlan::tasks)
      .def_readonly("budget", &PaymentPlan::budget)
      .def("spent", &PaymentPlan::spent);

  py::class_<ObjectivePoint>(m, "ObjectivePoint")
      .def_readonly("phase1_sum", &ObjectivePoint::phase1_sum)
      .def_readonly("bottleneck", &ObjectivePoint::bottleneck);

  py::enum_<ClosenessNorm>(m, "ClosenessNorm").value("L1", ClosenessNorm::L1).value("L2", ClosenessNorm::L2);

  py::class_<RepetitionResult>(m, "RepetitionResult")
      .def_readonly("allocation", &RepetitionResult::allocation)
      .def_readonly("objective", &RepetitionResult::objective);

  py::class_<HeterogeneousResult>(m, "HeterogeneousResult")
      .def_readonly("allocation", &HeterogeneousResult::allocation)
      .def_readonly("point", &HeterogeneousResult::point)
      .def_readonly("utopia", &HeterogeneousResult::utopia)
      .def_readonly("closeness", &HeterogeneousResult::closeness);

  m.def("even_allocation", &even_allocation, py::arg("budget"), py::arg("tasks"), py::arg("repetitions"),
        py::arg("seed") = 0);
  m.def(
      "repetition_allocate", [](std::int64_t b, const Groups& g) { return repetition_allocate(b, g); },
      py::arg("budget"), py::arg("groups"));
  m.def(
      "heterogeneous_allocate",
      [](std::int64_t b, const Groups& g, ClosenessNorm norm) { return heterogeneous_allocate(b, g, norm); },
      py::arg("budget"), py::arg("groups"), py::arg("norm") = ClosenessNorm::L1);
  m.def(
      "utopia_point", [](std::int64_t b, const Groups& g) { return utopia_point(b, g); }, py::arg("budget"),
      py::arg("groups"));
  m.def(
      "baseline_task_even", [](std::int64_t b, const Groups& g) { return baseline_task_even(b, g); },
      py::arg("budget"), py::arg("groups"));
  m.def(
      "baseline_rep_even", [](std::int64_t b, const Groups& g) { return baseline_rep_even(b, g); },
      py::arg("budget"), py::arg("groups"));
  m.def(
      "to_plan", [](const Allocation& a, const Groups& g) { return to_plan(a, g); }, py::arg("allocation"),
      py::arg("groups"));
  m.def(
      "evaluate_plan", [](const PaymentPlan& p, const Groups& g) { return evaluate_plan(p, g); }, py::arg("plan"),
      py::arg("groups"));
  m.def("allocation_csv", &allocation_csv, py::arg("plan"), py::arg("groups"));

  // simulator
  py::class_<SimulationStats>(m, "SimulationStats")
      .def_readonly("mean", &SimulationStats::mean)
      .def_readonly("stddev", &SimulationStats::stddev)
      .def_readonly("std_error", &SimulationStats::std_error)
      .def_readonly("ci_half_width", &SimulationStats::ci_half_width)
      .def_readonly("trials", &SimulationStats::trials)
      .def_readonly("group_mean_completion", &SimulationStats::group_mean_completion)
      .def_readonly("last_finisher_frequency", &SimulationStats::last_finisher_frequency);

  m.def(
      "simulate_job",
      [](const Groups& groups, const PaymentPlan& plan, std::int64_t trials, std::uint64_t seed, unsigned threads) {
        py::gil_scoped_release release;
        return simulate_job({groups, plan, trials, seed, threads});
      },
      py::arg("groups"), py::arg("plan"), py::arg("trials"), py::arg("seed") = 0, py::arg("threads") = 0);
  m.def(
      "simulate_poisson_probe",
      [](double rate, std::optional<double> duration, std::optional<std::int64_t> events, std::uint64_t seed) {
        if (duration.has_value() == events.has_value()) {
          throw DomainError("give exactly one of duration or events");
        }
        return duration ? simulate_poisson_probe(rate, *duration, seed) : simulate_poisson_probe(rate, *events, seed);
      },
      py::arg("rate"), py::kw_only(), py::arg("duration") = py::none(), py::arg("events") = py::none(),
      py::arg("seed") = 0);

  // experiments
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_property_readonly("budgets", [](const ExperimentConfig& c) { return c.budgets; })
      .def_property_readonly("strategies",
                             [](const ExperimentConfig& c) {
                               std::vector<std::string> names;
                               for (const auto& s : c.strategies) names.push_back(s.name());
                               return names;
                             })
      .def_property_readonly("rate_models",
                             [](const ExperimentConfig& c) {
                               std::vector<std::string> names;
                               for (const auto& r : c.rate_models) names.push_back(r.name);
                               return names;
                             })
      .def(
          "groups",
          [](const ExperimentConfig& c, std::size_t model) {
            if (model >= c.rate_models.size()) throw RangeError("rate model index out of range");
            return build_groups(c, c.rate_models[model].model);
          },
          py::arg("model") = 0);
  m.def("load_config", &load_config, py::arg("path"));
  m.def(
      "parse_config",
      [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in, "<string>");
      },
      py::arg("text"));

  py::class_<ExperimentRow>(m, "ExperimentRow")
      .def_readonly("rate_model", &ExperimentRow::rate_model)
      .def_readonly("budget", &ExperimentRow::budget)
      .def_readonly("strategy", &ExperimentRow::strategy)
      .def_readonly("feasible", &ExperimentRow::feasible)
      .def_readonly("spent", &ExperimentRow::spent)
      .def_readonly("point", &ExperimentRow::point)
      .def_readonly("closeness", &ExperimentRow::closeness)
      .def_readonly("stats", &ExperimentRow::stats);
  m.def(
      "run_experiment",
      [](const ExperimentConfig& c) {
        py::gil_scoped_release release;
        return run_experiment(c);
      },
      py::arg("config"));
}
