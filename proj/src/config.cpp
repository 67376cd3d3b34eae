#include "hputune/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "hputune/errors.hpp"

namespace hputune {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return text;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

struct Entry {
  std::string value;
  std::size_t line;
};

struct Section {
  std::string name;
  std::size_t line;
  std::map<std::string, Entry> entries;
};

class Reader {
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(std::size_t line, const std::string& message) const {
    throw ConfigError(source_, line, message);
  }

  const Entry* find(const Section& s, const std::string& key) const {
    auto it = s.entries.find(key);
    return it == s.entries.end() ? nullptr : &it->second;
  }

  const Entry& require(const Section& s, const std::string& key) const {
    if (const auto* e = find(s, key)) return *e;
    fail(s.line, "section [" + s.name + "] is missing key '" + key + "'");
  }

  double real(const Entry& e, const std::string& key) const {
    if (auto v = parse_number<double>(e.value)) return *v;
    fail(e.line, "key '" + key + "' expects a number, got '" + e.value + "'");
  }

  std::int64_t integer(const Entry& e, const std::string& key) const {
    if (auto v = parse_number<std::int64_t>(e.value)) return *v;
    fail(e.line, "key '" + key + "' expects an integer, got '" + e.value + "'");
  }

  void reject_unknown(const Section& s, std::initializer_list<std::string_view> known) const {
    for (const auto& [key, entry] : s.entries) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        fail(entry.line, "unknown key '" + key + "' in section [" + s.name + "]");
      }
    }
  }

private:
  std::string source_;
};

RateModel parse_rate_model(const Reader& r, const Section& s) {
  const auto& kind_entry = r.require(s, "kind");
  const auto kind = lower(kind_entry.value);
  try {
    if (kind == "linear") {
      r.reject_unknown(s, {"name", "kind", "slope", "intercept"});
      return RateModel::linear(r.real(r.require(s, "slope"), "slope"),
                               r.real(r.require(s, "intercept"), "intercept"));
    }
    if (kind == "quadratic") {
      r.reject_unknown(s, {"name", "kind", "constant", "coefficient"});
      return RateModel::quadratic(r.real(r.require(s, "constant"), "constant"),
                                  r.real(r.require(s, "coefficient"), "coefficient"));
    }
    if (kind == "log" || kind == "logarithmic") {
      r.reject_unknown(s, {"name", "kind", "scale"});
      return RateModel::logarithmic(r.real(r.require(s, "scale"), "scale"));
    }
    if (kind == "table") {
      r.reject_unknown(s, {"name", "kind", "points"});
      const auto& entry = r.require(s, "points");
      std::vector<std::pair<double, double>> points;
      for (const auto& item : split(entry.value, ',')) {
        const auto pair = split(item, ':');
        if (pair.size() != 2) r.fail(entry.line, "table point '" + item + "' is not price:rate");
        points.emplace_back(r.real({pair[0], entry.line}, "points"),
                            r.real({pair[1], entry.line}, "points"));
      }
      return RateModel::table(std::move(points));
    }
  } catch (const DomainError& e) {
    r.fail(s.line, std::string("invalid rate model: ") + e.what());
  }
  r.fail(kind_entry.line, "unknown rate model kind '" + kind_entry.value + "'");
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::Homogeneous: return "homogeneous";
    case Scenario::Repetition: return "repetition";
    case Scenario::Heterogeneous: return "heterogeneous";
  }
  return "unknown";
}

std::string Strategy::name() const {
  switch (kind) {
    case Kind::Even: return "EA";
    case Kind::Repetition: return "RA";
    case Kind::Heterogeneous: return "HA";
    case Kind::TaskEven: return "task-even";
    case Kind::RepEven: return "rep-even";
    case Kind::Biased: {
      std::ostringstream out;
      out << "bias(" << alpha << ")";
      return out.str();
    }
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view text) {
  const auto name = lower(trim(text));
  if (name == "ea") return {Strategy::Kind::Even};
  if (name == "ra") return {Strategy::Kind::Repetition};
  if (name == "ha") return {Strategy::Kind::Heterogeneous};
  if (name == "task-even") return {Strategy::Kind::TaskEven};
  if (name == "rep-even") return {Strategy::Kind::RepEven};
  if (name.starts_with("bias(") && name.ends_with(")")) {
    const auto inner = trim(std::string_view(name).substr(5, name.size() - 6));
    const auto alpha = parse_number<double>(inner);
    if (!alpha) throw DomainError("bias strategy needs a numeric fraction: '" + std::string(text) + "'");
    if (!(*alpha > 0.5 && *alpha < 1.0)) throw DomainError("bias fraction must lie in (1/2, 1)");
    return {Strategy::Kind::Biased, *alpha};
  }
  throw DomainError("unknown strategy '" + std::string(text) + "'");
}

void ExperimentConfig::validate(const std::string& source) const {
  auto fail = [&](const std::string& message) { throw ConfigError(source, 0, message); };
  if (rate_models.empty()) fail("at least one [rate_model] section is required");
  if (groups.empty()) fail("at least one [group] section is required");
  if (budgets.empty()) fail("budgets must list at least one value");
  if (strategies.empty()) fail("strategies must list at least one value");
  if (trials < 1) fail("trials must be >= 1");
  if (!(unit_value > 0.0)) fail("unit_value must be positive");
  for (auto b : budgets) {
    if (b < 1) fail("budgets must be positive integers");
  }
  for (const auto& g : groups) {
    if (g.tasks < 1 || g.repetitions < 1) fail("group '" + g.id + "' needs tasks and repetitions >= 1");
    if (!(g.processing_rate > 0.0)) fail("group '" + g.id + "' needs a positive processing_rate");
  }
  for (const auto& s : strategies) {
    const bool homogeneous_only =
        s.kind == Strategy::Kind::Even || s.kind == Strategy::Kind::Biased;
    if (homogeneous_only && scenario != Scenario::Homogeneous) {
      fail("strategy " + s.name() + " applies only to the homogeneous scenario");
    }
  }
  if (scenario == Scenario::Homogeneous && groups.size() != 1) {
    fail("the homogeneous scenario takes exactly one [group]");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  Reader reader(source);
  std::vector<Section> sections;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') reader.fail(line_no, "unterminated section header");
      sections.push_back({lower(trim(std::string_view(line).substr(1, line.size() - 2))), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) reader.fail(line_no, "expected 'key = value'");
    if (sections.empty()) reader.fail(line_no, "key outside of any section");
    const auto key = lower(trim(std::string_view(line).substr(0, eq)));
    if (key.empty()) reader.fail(line_no, "empty key");
    auto& entries = sections.back().entries;
    if (entries.count(key)) reader.fail(line_no, "duplicate key '" + key + "'");
    entries.emplace(key, Entry{trim(std::string_view(line).substr(eq + 1)), line_no});
  }

  ExperimentConfig config;
  bool saw_experiment = false;
  for (const auto& s : sections) {
    if (s.name == "experiment") {
      if (saw_experiment) reader.fail(s.line, "duplicate [experiment] section");
      saw_experiment = true;
      reader.reject_unknown(s, {"scenario", "budgets", "strategies", "trials", "seed", "norm",
                                "output", "unit_value"});
      const auto& scenario = reader.require(s, "scenario");
      const auto tag = lower(scenario.value);
      if (tag == "homogeneous") config.scenario = Scenario::Homogeneous;
      else if (tag == "repetition") config.scenario = Scenario::Repetition;
      else if (tag == "heterogeneous") config.scenario = Scenario::Heterogeneous;
      else reader.fail(scenario.line, "unknown scenario '" + scenario.value + "'");

      const auto& budgets = reader.require(s, "budgets");
      for (const auto& item : split(budgets.value, ',')) {
        config.budgets.push_back(reader.integer({item, budgets.line}, "budgets"));
      }
      const auto& strategies = reader.require(s, "strategies");
      for (const auto& item : split(strategies.value, ';')) {
        // Allow comma separation too, except inside bias(...).
        std::string current;
        int depth = 0;
        for (char c : item + ",") {
          if (c == '(') ++depth;
          if (c == ')') --depth;
          if (c == ',' && depth == 0) {
            if (!trim(current).empty()) {
              try {
                config.strategies.push_back(parse_strategy(current));
              } catch (const DomainError& e) {
                reader.fail(strategies.line, e.what());
              }
            }
            current.clear();
          } else {
            current += c;
          }
        }
      }
      if (const auto* e = reader.find(s, "trials")) config.trials = reader.integer(*e, "trials");
      if (const auto* e = reader.find(s, "seed")) {
        const auto seed = parse_number<std::uint64_t>(e->value);
        if (!seed) reader.fail(e->line, "seed expects an unsigned 64-bit integer");
        config.seed = *seed;
      }
      if (const auto* e = reader.find(s, "norm")) {
        const auto norm = lower(e->value);
        if (norm == "l1") config.norm = ClosenessNorm::L1;
        else if (norm == "l2") config.norm = ClosenessNorm::L2;
        else reader.fail(e->line, "norm must be l1 or l2");
      }
      if (const auto* e = reader.find(s, "output")) config.output = e->value;
      if (const auto* e = reader.find(s, "unit_value")) config.unit_value = reader.real(*e, "unit_value");
    } else if (s.name == "rate_model") {
      const auto* name = reader.find(s, "name");
      auto model = parse_rate_model(reader, s);
      config.rate_models.push_back({name ? name->value : model.describe(), std::move(model)});
    } else if (s.name == "group") {
      reader.reject_unknown(s, {"id", "tasks", "repetitions", "processing_rate", "type"});
      GroupSpec g;
      const auto* id = reader.find(s, "id");
      g.id = id ? id->value : "g" + std::to_string(config.groups.size() + 1);
      const auto tasks = reader.integer(reader.require(s, "tasks"), "tasks");
      const auto reps = reader.integer(reader.require(s, "repetitions"), "repetitions");
      if (tasks < 1 || tasks > 1'000'000) reader.fail(s.line, "tasks must be in [1, 1000000]");
      if (reps < 1 || reps > 10'000) reader.fail(s.line, "repetitions must be in [1, 10000]");
      g.tasks = static_cast<int>(tasks);
      g.repetitions = static_cast<int>(reps);
      const auto& rate = reader.require(s, "processing_rate");
      g.processing_rate = reader.real(rate, "processing_rate");
      if (!(g.processing_rate > 0.0)) reader.fail(rate.line, "processing_rate must be positive");
      if (const auto* t = reader.find(s, "type")) g.type = t->value;
      config.groups.push_back(std::move(g));
    } else {
      reader.fail(s.line, "unknown section [" + s.name + "]");
    }
  }
  if (!saw_experiment) reader.fail(0, "missing [experiment] section");
  config.validate(source);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  return parse_config(in, path.string());
}

std::vector<TaskGroup> build_groups(const ExperimentConfig& config, const RateModel& model) {
  std::vector<TaskGroup> groups;
  groups.reserve(config.groups.size());
  for (const auto& g : config.groups) {
    groups.emplace_back(g.id, g.tasks, g.repetitions, TaskTypeProfile(g.type, g.processing_rate, model));
  }
  return groups;
}

}  // namespace hputune
