#pragma once

// Price-to-rate models and inference of on-hold / processing clock rates from
// probe observations. Prices are integers in abstract payment units.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hputune {

using Price = std::int64_t;

/// Maps a unit price to the on-hold clock rate lambda_o(price). The rate is
/// the composite of worker arrival and acceptance; the two are never modelled
/// separately.
class RateModel {
public:
  /// rate = slope * price + intercept
  struct Linear {
    double slope;
    double intercept;
  };
  /// rate = constant + coefficient * price^2
  struct Quadratic {
    double constant;
    double coefficient;
  };
  /// rate = scale * log(1 + price)
  struct Logarithmic {
    double scale;
  };
  /// Piecewise-linear interpolation between measured (price, rate) points.
  struct Table {
    std::vector<std::pair<double, double>> points;
  };

  using Variant = std::variant<Linear, Quadratic, Logarithmic, Table>;

  // Factories reject models whose rate is not positive for every admissible
  // price (DomainError).
  static RateModel linear(double slope, double intercept);
  static RateModel quadratic(double constant, double coefficient);
  static RateModel logarithmic(double scale);
  static RateModel table(std::vector<std::pair<double, double>> points);

  const Variant& variant() const noexcept { return value_; }

  /// Human-readable form such as "linear(k=1,b=1)".
  std::string describe() const;

private:
  explicit RateModel(Variant value) : value_(std::move(value)) {}

  Variant value_;
};

/// Throws DomainError for price < 1 and RangeError outside a table's range.
double rate_at_price(const RateModel& model, Price price);

struct TaskTypeProfile {
  std::string label;
  double processing_rate;  // lambda_p, independent of price
  RateModel onhold;

  TaskTypeProfile(std::string label, double processing_rate, RateModel onhold);
};

enum class ObservationMode { FixedPeriod, RandomPeriod };

/// Events counted while probing the market with sample tasks of one type and
/// price. FixedPeriod watches for a set duration; RandomPeriod stops at a set
/// event count, so the duration is the last arrival time.
struct ProbeObservation {
  ObservationMode mode = ObservationMode::FixedPeriod;
  std::int64_t events = 0;
  double duration = 0.0;
  std::vector<double> arrivals;  // optional; strictly increasing in (0, duration]
  Price price = 1;
  std::string task_type;

  /// Throws DomainError when the invariants do not hold.
  void validate() const;
};

struct OnholdRateEstimate {
  double mle;  // N / T0
  /// ((N-1)/N) * mle, RandomPeriod only.
  std::optional<double> debiased;
  /// Set when the debiased value collapses to zero (a single event).
  bool degenerate = false;
};

/// Throws InsufficientData when the probe saw no events.
OnholdRateEstimate infer_onhold_rate(const ProbeObservation& obs);

enum class ProcessingEstimator {
  /// lambda_p = lambda - lambda_o
  Subtraction,
  /// 1/lambda_p = 1/lambda - 1/lambda_o, from the mean of a two-phase sum.
  Harmonic,
};

struct ProcessingRateEstimate {
  double rate;
  ProcessingEstimator estimator;
};

/// `overall_rate` is the full-cycle (publish to answer) rate. Throws
/// InconsistentProbe when the chosen estimator yields a non-positive rate.
ProcessingRateEstimate processing_rate_from_rates(
    double overall_rate, double onhold_rate,
    ProcessingEstimator estimator = ProcessingEstimator::Subtraction);

ProcessingRateEstimate infer_processing_rate(
    const ProbeObservation& overall, double onhold_rate,
    ProcessingEstimator estimator = ProcessingEstimator::Subtraction);

struct PricePoint {
  double price;
  double rate;
};

struct LinearFit {
  RateModel model;
  double slope;
  double intercept;
  double r_squared;
};

/// Ordinary least squares of rate against price. Throws DomainError with
/// fewer than two distinct prices and ValidityError when the fitted line is
/// decreasing or not positive over the observed price range.
LinearFit fit_linear_model(std::span<const PricePoint> points);

}  // namespace hputune
