#include "hputune/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "hputune/errors.hpp"

namespace hputune {

namespace {

constexpr std::int64_t kChunkTrials = 4096;
constexpr std::uint64_t kOnholdDraw = 0;
constexpr std::uint64_t kProcessingDraw = 1;

// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct ChunkTotals {
  std::vector<double> group_completion;
  std::vector<std::int64_t> last_finisher;
};

}  // namespace

CounterRng::CounterRng(std::uint64_t seed) noexcept : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

CounterRng CounterRng::substream(std::uint64_t index) const noexcept {
  CounterRng child(0);
  child.key_ = mix(key_ ^ mix(index + 0x3c6ef372fe94f82bULL));
  return child;
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  return mix(key_ + mix(counter));
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::exponential(double rate, std::uint64_t counter) const noexcept {
  return -std::log1p(-uniform(counter)) / rate;
}

double sample_onhold_phase(const RateModel& model, Price price, const CounterRng& stream) {
  return stream.exponential(rate_at_price(model, price), kOnholdDraw);
}

double sample_processing_phase(double processing_rate, const CounterRng& stream) {
  return stream.exponential(processing_rate, kProcessingDraw);
}

double sample_task_latency(std::span<const Price> repetition_prices, const TaskTypeProfile& profile,
                           const CounterRng& stream) {
  double total = 0.0;
  for (std::size_t r = 0; r < repetition_prices.size(); ++r) {
    const auto rep = stream.substream(r);
    total += sample_onhold_phase(profile.onhold, repetition_prices[r], rep);
    total += sample_processing_phase(profile.processing_rate, rep);
  }
  return total;
}

double sample_task_latency(int repetitions, Price price, const TaskTypeProfile& profile,
                           const CounterRng& stream) {
  if (repetitions < 1) throw DomainError("repetition count must be >= 1");
  if (price < 1) throw DomainError("price must be at least one unit");
  const std::vector<Price> prices(static_cast<std::size_t>(repetitions), price);
  return sample_task_latency(prices, profile, stream);
}

namespace {

// Runs every trial, writing job latencies into `latencies` and per-chunk
// group totals into `chunks`. Chunks are fixed-size so the reduction order
// does not depend on the thread count.
void run_trials(const JobSpec& spec, std::vector<double>& latencies,
                std::vector<ChunkTotals>& chunks) {
  const std::size_t n_groups = spec.groups.size();
  const auto n_chunks = static_cast<std::size_t>((spec.trials + kChunkTrials - 1) / kChunkTrials);
  latencies.assign(static_cast<std::size_t>(spec.trials), 0.0);
  chunks.assign(n_chunks, ChunkTotals{std::vector<double>(n_groups, 0.0),
                                      std::vector<std::int64_t>(n_groups, 0)});

  // Pre-resolve rates so the hot loop never touches the rate model.
  struct TaskRates {
    std::size_t group;
    std::vector<double> onhold;
    double processing;
  };
  std::vector<TaskRates> tasks;
  tasks.reserve(spec.plan.tasks.size());
  for (const auto& task : spec.plan.tasks) {
    const auto& profile = spec.groups[task.group].profile;
    TaskRates rates{task.group, {}, profile.processing_rate};
    for (Price p : task.repetitions) rates.onhold.push_back(rate_at_price(profile.onhold, p));
    tasks.push_back(std::move(rates));
  }

  const CounterRng root(spec.seed);
  std::atomic<std::size_t> next_chunk{0};
  auto worker = [&] {
    std::vector<double> group_done(n_groups);
    for (std::size_t c = next_chunk++; c < n_chunks; c = next_chunk++) {
      auto& totals = chunks[c];
      const std::int64_t begin = static_cast<std::int64_t>(c) * kChunkTrials;
      const std::int64_t end = std::min(spec.trials, begin + kChunkTrials);
      for (std::int64_t trial = begin; trial < end; ++trial) {
        const auto trial_stream = root.substream(static_cast<std::uint64_t>(trial));
        std::fill(group_done.begin(), group_done.end(), 0.0);
        double job = -1.0;
        std::size_t last_group = 0;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          const auto task_stream = trial_stream.substream(i);
          const auto& task = tasks[i];
          double latency = 0.0;
          for (std::size_t r = 0; r < task.onhold.size(); ++r) {
            const auto rep = task_stream.substream(r);
            latency += rep.exponential(task.onhold[r], kOnholdDraw);
            latency += rep.exponential(task.processing, kProcessingDraw);
          }
          group_done[task.group] = std::max(group_done[task.group], latency);
          if (latency > job) {
            job = latency;
            last_group = task.group;
          }
        }
        latencies[static_cast<std::size_t>(trial)] = job;
        for (std::size_t g = 0; g < n_groups; ++g) totals.group_completion[g] += group_done[g];
        ++totals.last_finisher[last_group];
      }
    }
  };

  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_chunks));
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
}

void validate_spec(const JobSpec& spec) {
  if (spec.trials < 1) throw DomainError("trial count must be >= 1");
  if (spec.groups.empty()) throw DomainError("job needs at least one task group");
  validate_plan(spec.plan, spec.groups);
}

}  // namespace

std::vector<double> simulate_job_latencies(const JobSpec& spec) {
  validate_spec(spec);
  std::vector<double> latencies;
  std::vector<ChunkTotals> chunks;
  run_trials(spec, latencies, chunks);
  return latencies;
}

SimulationStats simulate_job(const JobSpec& spec) {
  validate_spec(spec);
  std::vector<double> latencies;
  std::vector<ChunkTotals> chunks;
  run_trials(spec, latencies, chunks);

  SimulationStats stats;
  stats.trials = spec.trials;
  const auto n = static_cast<double>(spec.trials);
  double sum = 0.0;
  for (double x : latencies) sum += x;
  stats.mean = sum / n;
  double squares = 0.0;
  for (double x : latencies) squares += (x - stats.mean) * (x - stats.mean);
  stats.stddev = spec.trials > 1 ? std::sqrt(squares / (n - 1.0)) : 0.0;
  stats.std_error = stats.stddev / std::sqrt(n);
  stats.ci_half_width = 1.96 * stats.std_error;

  const std::size_t n_groups = spec.groups.size();
  stats.group_mean_completion.assign(n_groups, 0.0);
  std::vector<std::int64_t> last(n_groups, 0);
  for (const auto& chunk : chunks) {
    for (std::size_t g = 0; g < n_groups; ++g) {
      stats.group_mean_completion[g] += chunk.group_completion[g];
      last[g] += chunk.last_finisher[g];
    }
  }
  stats.last_finisher_frequency.assign(n_groups, 0.0);
  for (std::size_t g = 0; g < n_groups; ++g) {
    stats.group_mean_completion[g] /= n;
    stats.last_finisher_frequency[g] = static_cast<double>(last[g]) / n;
  }
  return stats;
}

ProbeObservation simulate_poisson_probe(double rate, ProbeStop stop, std::uint64_t seed,
                                        Price price, std::string task_type) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("arrival rate must be positive");
  const CounterRng stream(seed);
  ProbeObservation obs;
  obs.price = price;
  obs.task_type = std::move(task_type);
  if (const auto* window = std::get_if<double>(&stop)) {
    if (!(*window > 0.0)) throw DomainError("probe duration must be positive");
    obs.mode = ObservationMode::FixedPeriod;
    obs.duration = *window;
    double t = 0.0;
    for (std::uint64_t i = 0;; ++i) {
      t += stream.exponential(rate, i);
      if (t > *window) break;
      obs.arrivals.push_back(t);
    }
  } else {
    const auto count = std::get<std::int64_t>(stop);
    if (count < 1) throw DomainError("probe event count must be >= 1");
    obs.mode = ObservationMode::RandomPeriod;
    double t = 0.0;
    for (std::int64_t i = 0; i < count; ++i) {
      t += stream.exponential(rate, static_cast<std::uint64_t>(i));
      obs.arrivals.push_back(t);
    }
    obs.duration = t;
  }
  obs.events = static_cast<std::int64_t>(obs.arrivals.size());
  return obs;
}

}  // namespace hputune
