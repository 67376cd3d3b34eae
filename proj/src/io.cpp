#include "hputune/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "hputune/errors.hpp"

namespace hputune {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string precise(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

ProbeObservation read_probe(std::istream& in, const std::string& source) {
  ProbeObservation obs;
  bool have_header = false;
  bool have_duration = false;
  std::optional<std::int64_t> declared_count;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& message) { throw ConfigError(source, line_no, message); };

  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (have_duration) fail("content after the T0 line");
    if (!have_header) {
      const auto cells = split_csv(line);
      if (cells.size() != 3) fail("header must be 'mode,price,type'");
      if (cells[0] == "fixed") obs.mode = ObservationMode::FixedPeriod;
      else if (cells[0] == "random") obs.mode = ObservationMode::RandomPeriod;
      else fail("mode must be 'fixed' or 'random', got '" + cells[0] + "'");
      const auto price = parse_number<std::int64_t>(cells[1]);
      if (!price || *price < 1) fail("price must be a positive integer");
      obs.price = *price;
      obs.task_type = cells[2];
      have_header = true;
      continue;
    }
    if (line.starts_with("T0=")) {
      const auto value = parse_number<double>(trim(std::string_view(line).substr(3)));
      if (!value || !(*value > 0.0)) fail("T0 must be a positive number");
      obs.duration = *value;
      have_duration = true;
      continue;
    }
    if (line.starts_with("N=")) {
      const auto value = parse_number<std::int64_t>(trim(std::string_view(line).substr(2)));
      if (!value || *value < 0) fail("N must be a non-negative integer");
      declared_count = *value;
      continue;
    }
    const auto t = parse_number<double>(line);
    if (!t) fail("expected an arrival timestamp, got '" + line + "'");
    if (declared_count) fail("timestamps must precede the N line");
    if (!(*t > (obs.arrivals.empty() ? 0.0 : obs.arrivals.back()))) {
      fail("arrival timestamps must be positive and strictly increasing");
    }
    obs.arrivals.push_back(*t);
  }
  if (!have_header) throw ConfigError(source, 0, "missing 'mode,price,type' header");
  if (!have_duration) throw ConfigError(source, 0, "missing terminating T0=<value> line");
  obs.events = declared_count.value_or(static_cast<std::int64_t>(obs.arrivals.size()));
  if (declared_count && !obs.arrivals.empty() &&
      *declared_count != static_cast<std::int64_t>(obs.arrivals.size())) {
    throw ConfigError(source, 0, "N does not match the number of timestamps");
  }
  try {
    obs.validate();
  } catch (const DomainError& e) {
    throw ConfigError(source, 0, e.what());
  }
  return obs;
}

ProbeObservation load_probe(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  return read_probe(in, path.string());
}

void write_probe(std::ostream& out, const ProbeObservation& obs) {
  out << (obs.mode == ObservationMode::FixedPeriod ? "fixed" : "random") << ',' << obs.price
      << ',' << obs.task_type << '\n';
  for (double t : obs.arrivals) out << precise(t) << '\n';
  if (obs.arrivals.empty()) out << "N=" << obs.events << '\n';
  out << "T0=" << precise(obs.duration) << '\n';
}

void write_allocation(std::ostream& out, const PaymentPlan& plan, std::span<const TaskGroup> groups) {
  out << kAllocationSchema << '\n';
  out << "# budget=" << plan.budget << '\n';
  out << "group,task,repetition,price\n";
  std::vector<int> next_task(groups.size(), 0);
  for (const auto& task : plan.tasks) {
    const int index = next_task.at(task.group)++;
    for (std::size_t r = 0; r < task.repetitions.size(); ++r) {
      out << groups[task.group].id << ',' << index << ',' << r << ',' << task.repetitions[r] << '\n';
    }
  }
}

PaymentPlan read_allocation(std::istream& in, std::span<const TaskGroup> groups,
                            const std::string& source) {
  std::map<std::string, std::size_t> group_index;
  for (std::size_t g = 0; g < groups.size(); ++g) group_index[groups[g].id] = g;

  // cells[group][task][rep]
  std::vector<std::vector<std::vector<Price>>> cells(groups.size());
  std::optional<std::int64_t> budget;
  bool have_header = false;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& message) { throw ConfigError(source, line_no, message); };

  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with("# budget=")) {
        budget = parse_number<std::int64_t>(trim(std::string_view(line).substr(9)));
        if (!budget) fail("malformed budget comment");
      }
      continue;
    }
    if (!have_header) {
      if (line != "group,task,repetition,price") fail("expected header 'group,task,repetition,price'");
      have_header = true;
      continue;
    }
    const auto row = split_csv(line);
    if (row.size() != 4) fail("expected 4 columns");
    const auto g = group_index.find(row[0]);
    if (g == group_index.end()) fail("unknown group '" + row[0] + "'");
    const auto task = parse_number<std::int64_t>(row[1]);
    const auto rep = parse_number<std::int64_t>(row[2]);
    const auto price = parse_number<std::int64_t>(row[3]);
    if (!task || !rep || !price || *task < 0 || *rep < 0) fail("malformed numeric cell");
    if (*price < 1) fail("price must be at least one unit");
    const auto& group = groups[g->second];
    if (*task >= group.tasks || *rep >= group.repetitions) fail("task or repetition index out of range");
    auto& tasks = cells[g->second];
    if (tasks.empty()) tasks.assign(static_cast<std::size_t>(group.tasks),
                                    std::vector<Price>(static_cast<std::size_t>(group.repetitions), 0));
    auto& slot = tasks[static_cast<std::size_t>(*task)][static_cast<std::size_t>(*rep)];
    if (slot != 0) fail("duplicate entry");
    slot = *price;
  }

  PaymentPlan plan;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (cells[g].empty()) throw ConfigError(source, 0, "group '" + groups[g].id + "' has no rows");
    for (auto& reps : cells[g]) {
      for (Price p : reps) {
        if (p == 0) throw ConfigError(source, 0, "group '" + groups[g].id + "' is missing entries");
      }
      plan.tasks.push_back({g, std::move(reps)});
    }
  }
  plan.budget = budget.value_or(plan.spent());
  return plan;
}

void write_simulation(std::ostream& out, const SimulationStats& stats,
                      std::span<const TaskGroup> groups) {
  out << kSimulationSchema << '\n';
  out << "statistic,group,value\n";
  out << "mean,," << format_number(stats.mean) << '\n';
  out << "stddev,," << format_number(stats.stddev) << '\n';
  out << "std_error,," << format_number(stats.std_error) << '\n';
  out << "ci95_half_width,," << format_number(stats.ci_half_width) << '\n';
  out << "trials,," << stats.trials << '\n';
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out << "group_mean_completion," << groups[g].id << ','
        << format_number(stats.group_mean_completion[g]) << '\n';
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out << "last_finisher_frequency," << groups[g].id << ','
        << format_number(stats.last_finisher_frequency[g]) << '\n';
  }
}

}  // namespace hputune
