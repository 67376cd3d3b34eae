#pragma once

// Seeded Monte Carlo execution of crowdsourced jobs and of market probes.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hputune/allocator.hpp"
#include "hputune/market.hpp"

namespace hputune {

/// Counter-based generator: every draw is a pure function of the seed, the
/// path of substream indices and the draw counter, so substreams never
/// interact and results do not depend on evaluation order.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) noexcept;

  /// Independent child stream identified by `index`.
  CounterRng substream(std::uint64_t index) const noexcept;

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept;
  /// Exp(rate) by inverse transform of uniform(counter).
  double exponential(double rate, std::uint64_t counter) const noexcept;

private:
  std::uint64_t key_;
};

/// On-hold phase of one repetition; the only sampler that sees a price.
double sample_onhold_phase(const RateModel& model, Price price, const CounterRng& stream);

/// Processing phase of one repetition. Price-independent by signature.
double sample_processing_phase(double processing_rate, const CounterRng& stream);

/// Sum over repetitions of on-hold plus processing latency. Repetition r
/// draws from stream.substream(r).
double sample_task_latency(std::span<const Price> repetition_prices, const TaskTypeProfile& profile,
                           const CounterRng& stream);

double sample_task_latency(int repetitions, Price price, const TaskTypeProfile& profile,
                           const CounterRng& stream);

struct JobSpec {
  std::vector<TaskGroup> groups;
  PaymentPlan plan;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency. Results are identical
  /// for every value.
  unsigned threads = 0;
};

struct SimulationStats {
  double mean = 0.0;
  double stddev = 0.0;
  double std_error = 0.0;
  double ci_half_width = 0.0;  // 95%, 1.96 standard errors
  std::int64_t trials = 0;
  std::vector<double> group_mean_completion;
  std::vector<double> last_finisher_frequency;
};

/// Job latency per trial is the latest task completion. Trial t draws from
/// root.substream(t), task i within it from .substream(i).
SimulationStats simulate_job(const JobSpec& spec);

/// Raw per-trial job latencies in trial order (same streams as simulate_job).
std::vector<double> simulate_job_latencies(const JobSpec& spec);

/// Stop rule: a duration for FixedPeriod, an event count for RandomPeriod.
using ProbeStop = std::variant<double, std::int64_t>;

/// Poisson arrivals with iid Exp(rate) gaps.
ProbeObservation simulate_poisson_probe(double rate, ProbeStop stop, std::uint64_t seed,
                                        Price price = 1, std::string task_type = "probe");

}  // namespace hputune
