#include "hputune/market.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hputune/errors.hpp"

namespace hputune {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

RateModel RateModel::linear(double slope, double intercept) {
  if (!finite(slope) || !finite(intercept)) throw DomainError("linear model needs finite k and b");
  if (slope < 0.0) throw DomainError("linear model slope must be non-negative");
  if (!(slope + intercept > 0.0)) {
    throw DomainError("linear model rate must be positive at price 1");
  }
  return RateModel(Linear{slope, intercept});
}

RateModel RateModel::quadratic(double constant, double coefficient) {
  if (!finite(constant) || !finite(coefficient)) {
    throw DomainError("quadratic model needs finite coefficients");
  }
  if (coefficient < 0.0) throw DomainError("quadratic model coefficient must be non-negative");
  if (!(constant + coefficient > 0.0)) {
    throw DomainError("quadratic model rate must be positive at price 1");
  }
  return RateModel(Quadratic{constant, coefficient});
}

RateModel RateModel::logarithmic(double scale) {
  if (!finite(scale) || !(scale > 0.0)) throw DomainError("logarithmic model scale must be positive");
  return RateModel(Logarithmic{scale});
}

RateModel RateModel::table(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw DomainError("rate table needs at least one point");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [price, rate] = points[i];
    if (!finite(price) || !finite(rate)) throw DomainError("rate table entries must be finite");
    if (!(rate > 0.0)) throw DomainError("rate table rates must be positive");
    if (i > 0 && !(price > points[i - 1].first)) {
      throw DomainError("rate table prices must be strictly increasing");
    }
  }
  return RateModel(Table{std::move(points)});
}

std::string RateModel::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const Linear& m) { out << "linear(k=" << m.slope << ",b=" << m.intercept << ")"; },
                 [&](const Quadratic& m) {
                   out << "quadratic(a=" << m.constant << ",c=" << m.coefficient << ")";
                 },
                 [&](const Logarithmic& m) { out << "log(a=" << m.scale << ")"; },
                 [&](const Table& m) { out << "table(" << m.points.size() << " points)"; },
             },
             value_);
  return out.str();
}

double rate_at_price(const RateModel& model, Price price) {
  if (price < 1) throw DomainError("price must be at least one unit");
  const auto p = static_cast<double>(price);
  return std::visit(
      Overloaded{
          [&](const RateModel::Linear& m) { return m.slope * p + m.intercept; },
          [&](const RateModel::Quadratic& m) { return m.constant + m.coefficient * p * p; },
          [&](const RateModel::Logarithmic& m) { return m.scale * std::log1p(p); },
          [&](const RateModel::Table& m) {
            const auto& pts = m.points;
            if (p < pts.front().first || p > pts.back().first) {
              std::ostringstream msg;
              msg << "price " << price << " outside rate table range [" << pts.front().first
                  << ", " << pts.back().first << "]";
              throw RangeError(msg.str());
            }
            auto hi = std::lower_bound(pts.begin(), pts.end(), p,
                                       [](const auto& pt, double x) { return pt.first < x; });
            if (hi->first == p) return hi->second;
            auto lo = hi - 1;
            const double w = (p - lo->first) / (hi->first - lo->first);
            return lo->second + w * (hi->second - lo->second);
          },
      },
      model.variant());
}

TaskTypeProfile::TaskTypeProfile(std::string label, double processing_rate, RateModel onhold)
    : label(std::move(label)), processing_rate(processing_rate), onhold(std::move(onhold)) {
  if (!(processing_rate > 0.0) || !std::isfinite(processing_rate)) {
    throw DomainError("processing rate must be positive");
  }
}

void ProbeObservation::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw DomainError("probe duration must be positive");
  }
  if (events < 0) throw DomainError("event count must be non-negative");
  if (price < 1) throw DomainError("probe price must be at least one unit");
  if (arrivals.empty()) return;
  if (static_cast<std::int64_t>(arrivals.size()) != events) {
    throw DomainError("event count does not match the number of arrival timestamps");
  }
  double previous = 0.0;
  for (double t : arrivals) {
    if (!(t > previous)) throw DomainError("arrival timestamps must be strictly increasing and positive");
    previous = t;
  }
  if (previous > duration) throw DomainError("arrival timestamp beyond the observation window");
}

OnholdRateEstimate infer_onhold_rate(const ProbeObservation& obs) {
  obs.validate();
  if (obs.events == 0) throw InsufficientData(obs.duration);
  OnholdRateEstimate estimate;
  estimate.mle = static_cast<double>(obs.events) / obs.duration;
  if (obs.mode == ObservationMode::RandomPeriod) {
    const auto n = static_cast<double>(obs.events);
    estimate.debiased = (n - 1.0) / n * estimate.mle;
    estimate.degenerate = obs.events == 1;
  }
  return estimate;
}

ProcessingRateEstimate processing_rate_from_rates(double overall_rate, double onhold_rate,
                                                  ProcessingEstimator estimator) {
  if (!(overall_rate > 0.0) || !(onhold_rate > 0.0)) {
    throw InconsistentProbe("overall and on-hold rate estimates must both be positive");
  }
  std::ostringstream msg;
  switch (estimator) {
    case ProcessingEstimator::Subtraction:
      if (overall_rate <= onhold_rate) {
        msg << "overall rate " << overall_rate << " does not exceed on-hold rate " << onhold_rate
            << "; subtraction estimate would be non-positive";
        throw InconsistentProbe(msg.str());
      }
      return {overall_rate - onhold_rate, estimator};
    case ProcessingEstimator::Harmonic: {
      const double residual = 1.0 / overall_rate - 1.0 / onhold_rate;
      if (!(residual > 0.0)) {
        msg << "overall mean " << 1.0 / overall_rate << " does not exceed on-hold mean "
            << 1.0 / onhold_rate << "; harmonic estimate would be non-positive";
        throw InconsistentProbe(msg.str());
      }
      return {1.0 / residual, estimator};
    }
  }
  throw DomainError("unknown processing-rate estimator");
}

ProcessingRateEstimate infer_processing_rate(const ProbeObservation& overall, double onhold_rate,
                                             ProcessingEstimator estimator) {
  const auto full_cycle = infer_onhold_rate(overall);
  return processing_rate_from_rates(full_cycle.mle, onhold_rate, estimator);
}

LinearFit fit_linear_model(std::span<const PricePoint> points) {
  std::set<double> distinct;
  for (const auto& pt : points) {
    if (!std::isfinite(pt.price) || !std::isfinite(pt.rate)) {
      throw DomainError("fit points must be finite");
    }
    distinct.insert(pt.price);
  }
  if (distinct.size() < 2) throw DomainError("linear fit needs at least two distinct prices");

  const auto n = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& pt : points) {
    mean_x += pt.price;
    mean_y += pt.rate;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& pt : points) {
    const double dx = pt.price - mean_x;
    const double dy = pt.rate - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;

  double ss_res = 0.0;
  for (const auto& pt : points) {
    const double r = pt.rate - (slope * pt.price + intercept);
    ss_res += r * r;
  }
  const double r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;

  if (slope < 0.0) throw ValidityError("fitted slope is negative; rate would fall with price");
  const double lowest = slope * *distinct.begin() + intercept;
  if (!(lowest > 0.0)) {
    std::ostringstream msg;
    msg << "fitted rate " << lowest << " is not positive at price " << *distinct.begin();
    throw ValidityError(msg.str());
  }
  // Observed prices may be fractional; keep the model admissible from price 1.
  if (!(slope + intercept > 0.0)) {
    throw ValidityError("fitted rate is not positive at price 1");
  }
  return {RateModel::linear(slope, intercept), slope, intercept, r_squared};
}

}  // namespace hputune
