#pragma once

// Latency distributions of crowdsourced tasks and expected maxima of
// parallel task sets. Time is measured in abstract seconds and every rate
// is in 1/second.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace hputune {

/// Controls the composite Simpson rule used for improper latency integrals.
///
/// The integral is truncated at `bound` times the mean of the integrated
/// distribution. Starting from `subdivisions` panels the rule is refined by
/// doubling until two successive estimates agree to `tolerance` relative to
/// the estimate, and the probability mass beyond the truncation point must
/// also be below `tolerance`.
struct QuadratureConfig {
  double bound = 40.0;
  int subdivisions = 4096;
  double tolerance = 1e-8;

  /// Throws DomainError unless bound > 0, subdivisions >= 16, tolerance > 0.
  void validate() const;
};

class LatencyDistribution {
public:
  struct Exponential {
    double rate;
  };
  struct Erlang {
    int shape;
    double rate;
  };
  /// Sum of an on-hold and a processing exponential phase.
  struct Hypoexponential {
    double onhold_rate;
    double processing_rate;
  };
  /// Maximum of `copies` independent draws from `inner`.
  struct MaxOfIID {
    int copies;
    std::shared_ptr<const LatencyDistribution> inner;
  };

  using Variant = std::variant<Exponential, Erlang, Hypoexponential, MaxOfIID>;

  // Factories validate parameters and throw DomainError.
  static LatencyDistribution exponential(double rate);
  static LatencyDistribution erlang(int shape, double rate);
  static LatencyDistribution hypoexponential(double onhold_rate, double processing_rate);
  static LatencyDistribution max_of_iid(int copies, LatencyDistribution inner);

  const Variant& variant() const noexcept { return value_; }

  /// Same family with every rate multiplied by `factor` (> 0).
  LatencyDistribution with_rates_scaled(double factor) const;

private:
  explicit LatencyDistribution(Variant value) : value_(std::move(value)) {}

  Variant value_;
};

/// Relative rate gap below which a hypoexponential is evaluated as Erlang(2).
inline constexpr double kEqualRateThreshold = 1e-9;

double pdf(const LatencyDistribution& dist, double t);
double cdf(const LatencyDistribution& dist, double t);

/// Analytic for the single-task families; the maximum of iid copies uses the
/// closed form for exponential copies and quadrature otherwise.
double mean(const LatencyDistribution& dist, const QuadratureConfig& config = {});

/// 1 + 1/2 + ... + 1/n by direct summation.
double harmonic_number(std::int64_t n);

/// E[max(X1, X2)] for independent exponentials with the given rates.
double expected_max_two_exp(double rate1, double rate2);

/// E[max] of n iid exponentials: H_n / rate.
double expected_max_iid_exp(std::int64_t n, double rate);

/// E[max] of n iid Erlang(k, rate) variables. Exact shortcuts for n == 1 and
/// k == 1, quadrature otherwise.
double expected_max_iid_erlang(int n, int k, double rate, const QuadratureConfig& config = {});

/// Always integrates n F^{n-1}(t) f(t) t over the Erlang(k, rate) law, with no
/// closed-form shortcut. Exposed so the shortcuts can be checked against it.
double expected_max_iid_erlang_quadrature(int n, int k, double rate,
                                          const QuadratureConfig& config = {});

/// Product of member cdfs at t: the cdf of the latest finisher.
double parallel_latency_cdf(std::span<const LatencyDistribution> members, double t);

/// A task whose latency is a sequence of exponential phases, replicated
/// `copies` times with independent draws.
struct PhaseChain {
  std::vector<double> rates;
  int copies = 1;
};

/// Exact E[max] over independent phase chains, computed as the integral of
/// 1 - prod F_i(t)^{copies_i}. Each chain's cdf is propagated on a uniform
/// grid through the transition matrix of its phase process.
double expected_max_of_chains(std::span<const PhaseChain> chains,
                              const QuadratureConfig& config = {});

/// Fixed-grid variant of expected_max_of_chains that caches per-chain cdf
/// grids, for evaluating many candidate allocations over one horizon.
class ChainMaxEvaluator {
public:
  ChainMaxEvaluator(double horizon, int subdivisions);

  /// Throws NumericalError when the mass beyond the horizon exceeds
  /// `tail_tolerance`.
  double expected_max(std::span<const PhaseChain> chains, double tail_tolerance = 1e-8);

  double horizon() const noexcept { return horizon_; }
  int subdivisions() const noexcept { return subdivisions_; }

private:
  const std::vector<double>& cdf_grid(const std::vector<double>& rates);

  double horizon_;
  int subdivisions_;
  std::map<std::vector<double>, std::vector<double>> grids_;
};

}  // namespace hputune
