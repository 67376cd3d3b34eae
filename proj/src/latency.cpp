#include "hputune/latency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <type_traits>

#include "hputune/errors.hpp"

namespace hputune {

namespace {

constexpr int kMaxRefinements = 8;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_rate(double rate, const char* what) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError(std::string(what) + " must be a positive finite rate");
  }
}

void require_time(double t) {
  if (!(t >= 0.0)) {
    throw DomainError("time must be non-negative");
  }
}

// P(X > t) for X ~ Erlang(k, rate).
double erlang_survival(int k, double rate, double t) {
  const double x = rate * t;
  if (x == 0.0) return 1.0;
  double sum = 0.0;
  if (x < 700.0) {
    double term = std::exp(-x);
    for (int j = 0; j < k; ++j) {
      if (j > 0) term *= x / j;
      sum += term;
    }
  } else {
    const double log_x = std::log(x);
    for (int j = 0; j < k; ++j) {
      sum += std::exp(-x + j * log_x - std::lgamma(j + 1.0));
    }
  }
  return std::min(sum, 1.0);
}

// P(X <= t); the lower series keeps relative accuracy when the cdf is small.
double erlang_cdf(int k, double rate, double t) {
  const double x = rate * t;
  if (x == 0.0) return 0.0;
  if (x < k) {
    double term = std::exp(k * std::log(x) - x - std::lgamma(k + 1.0));
    double sum = 0.0;
    for (int j = k; term > sum * 1e-17; ++j) {
      sum += term;
      term *= x / (j + 1);
    }
    return std::min(sum, 1.0);
  }
  return 1.0 - erlang_survival(k, rate, t);
}

double erlang_pdf(int k, double rate, double t) {
  if (k == 1) return rate * std::exp(-rate * t);
  if (t == 0.0) return 0.0;
  return std::exp(k * std::log(rate) + (k - 1) * std::log(t) - rate * t - std::lgamma(k));
}

bool nearly_equal_rates(double a, double b) {
  return std::abs(a - b) < kEqualRateThreshold * std::max(a, b);
}

double hypo_pdf(double a, double b, double t) {
  if (nearly_equal_rates(a, b)) return erlang_pdf(2, 0.5 * (a + b), t);
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  const double gap = hi - lo;
  return hi * lo / gap * std::exp(-lo * t) * -std::expm1(-gap * t);
}

double hypo_survival(double a, double b, double t) {
  if (nearly_equal_rates(a, b)) return erlang_survival(2, 0.5 * (a + b), t);
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  const double gap = hi - lo;
  return std::exp(-lo * t) * (1.0 + lo * -std::expm1(-gap * t) / gap);
}

double survival(const LatencyDistribution& dist, double t);

double cdf_unchecked(const LatencyDistribution& dist, double t) {
  return std::visit(
      Overloaded{
          [&](const LatencyDistribution::Exponential& e) { return -std::expm1(-e.rate * t); },
          [&](const LatencyDistribution::Erlang& e) { return erlang_cdf(e.shape, e.rate, t); },
          [&](const LatencyDistribution::Hypoexponential& h) {
            return 1.0 - hypo_survival(h.onhold_rate, h.processing_rate, t);
          },
          [&](const LatencyDistribution::MaxOfIID& m) {
            return std::pow(cdf_unchecked(*m.inner, t), m.copies);
          },
      },
      dist.variant());
}

double survival(const LatencyDistribution& dist, double t) {
  return std::visit(
      Overloaded{
          [&](const LatencyDistribution::Exponential& e) { return std::exp(-e.rate * t); },
          [&](const LatencyDistribution::Erlang& e) { return erlang_survival(e.shape, e.rate, t); },
          [&](const LatencyDistribution::Hypoexponential& h) {
            return hypo_survival(h.onhold_rate, h.processing_rate, t);
          },
          [&](const LatencyDistribution::MaxOfIID& m) {
            const double inner = survival(*m.inner, t);
            return -std::expm1(m.copies * std::log1p(-inner));
          },
      },
      dist.variant());
}

double pdf_unchecked(const LatencyDistribution& dist, double t) {
  return std::visit(
      Overloaded{
          [&](const LatencyDistribution::Exponential& e) { return e.rate * std::exp(-e.rate * t); },
          [&](const LatencyDistribution::Erlang& e) { return erlang_pdf(e.shape, e.rate, t); },
          [&](const LatencyDistribution::Hypoexponential& h) {
            return hypo_pdf(h.onhold_rate, h.processing_rate, t);
          },
          [&](const LatencyDistribution::MaxOfIID& m) {
            const double f = pdf_unchecked(*m.inner, t);
            if (m.copies == 1) return f;
            return m.copies * std::pow(cdf_unchecked(*m.inner, t), m.copies - 1) * f;
          },
      },
      dist.variant());
}

// Composite Simpson on [0, upper], doubling the panel count until two
// successive estimates agree to the relative tolerance.
template <class Integrand>
double refined_simpson(Integrand&& f, double upper, const QuadratureConfig& config) {
  int panels = config.subdivisions + (config.subdivisions % 2);
  double h = upper / panels;
  const double ends = f(0.0) + f(upper);
  double odd = 0.0;
  double even = 0.0;
  for (int i = 1; i < panels; ++i) {
    (i % 2 ? odd : even) += f(i * h);
  }
  double estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
  for (int level = 0; level < kMaxRefinements; ++level) {
    even += odd;
    odd = 0.0;
    panels *= 2;
    h *= 0.5;
    for (int i = 1; i < panels; i += 2) odd += f(i * h);
    const double refined = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    if (std::abs(refined - estimate) <= config.tolerance * std::abs(refined)) return refined;
    estimate = refined;
  }
  std::ostringstream msg;
  msg << "Simpson rule did not converge after " << kMaxRefinements << " refinements ("
      << panels << " panels on [0, " << upper << "]); last estimate " << estimate;
  throw NumericalError(msg.str());
}

void check_tail(double tail, double upper, double tolerance) {
  if (tail >= tolerance) {
    std::ostringstream msg;
    msg << "probability mass " << tail << " beyond truncation point " << upper
        << " exceeds tolerance " << tolerance;
    throw NumericalError(msg.str());
  }
}

double mean_by_quadrature(const LatencyDistribution& dist, double scale,
                          const QuadratureConfig& config) {
  const double upper = config.bound * scale;
  check_tail(survival(dist, upper), upper, config.tolerance);
  return refined_simpson([&](double t) { return t * pdf_unchecked(dist, t); }, upper, config);
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(bound > 0.0)) throw DomainError("quadrature bound must be positive");
  if (subdivisions < 16) throw DomainError("quadrature needs at least 16 subdivisions");
  if (!(tolerance > 0.0)) throw DomainError("quadrature tolerance must be positive");
}

LatencyDistribution LatencyDistribution::exponential(double rate) {
  require_rate(rate, "exponential rate");
  return LatencyDistribution(Exponential{rate});
}

LatencyDistribution LatencyDistribution::erlang(int shape, double rate) {
  if (shape < 1) throw DomainError("Erlang shape must be >= 1");
  require_rate(rate, "Erlang rate");
  return LatencyDistribution(Erlang{shape, rate});
}

LatencyDistribution LatencyDistribution::hypoexponential(double onhold_rate,
                                                         double processing_rate) {
  require_rate(onhold_rate, "on-hold rate");
  require_rate(processing_rate, "processing rate");
  return LatencyDistribution(Hypoexponential{onhold_rate, processing_rate});
}

LatencyDistribution LatencyDistribution::max_of_iid(int copies, LatencyDistribution inner) {
  if (copies < 1) throw DomainError("copy count must be >= 1");
  return LatencyDistribution(
      MaxOfIID{copies, std::make_shared<const LatencyDistribution>(std::move(inner))});
}

LatencyDistribution LatencyDistribution::with_rates_scaled(double factor) const {
  require_rate(factor, "scale factor");
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return exponential(e.rate * factor); },
          [&](const Erlang& e) { return erlang(e.shape, e.rate * factor); },
          [&](const Hypoexponential& h) {
            return hypoexponential(h.onhold_rate * factor, h.processing_rate * factor);
          },
          [&](const MaxOfIID& m) { return max_of_iid(m.copies, m.inner->with_rates_scaled(factor)); },
      },
      value_);
}

double pdf(const LatencyDistribution& dist, double t) {
  require_time(t);
  return pdf_unchecked(dist, t);
}

double cdf(const LatencyDistribution& dist, double t) {
  require_time(t);
  return std::clamp(cdf_unchecked(dist, t), 0.0, 1.0);
}

double mean(const LatencyDistribution& dist, const QuadratureConfig& config) {
  return std::visit(
      Overloaded{
          [](const LatencyDistribution::Exponential& e) { return 1.0 / e.rate; },
          [](const LatencyDistribution::Erlang& e) { return e.shape / e.rate; },
          [](const LatencyDistribution::Hypoexponential& h) {
            return 1.0 / h.onhold_rate + 1.0 / h.processing_rate;
          },
          [&](const LatencyDistribution::MaxOfIID& m) {
            const auto& inner = m.inner->variant();
            if (const auto* e = std::get_if<LatencyDistribution::Exponential>(&inner)) {
              return expected_max_iid_exp(m.copies, e->rate);
            }
            if (const auto* e = std::get_if<LatencyDistribution::Erlang>(&inner)) {
              return expected_max_iid_erlang(m.copies, e->shape, e->rate, config);
            }
            config.validate();
            return mean_by_quadrature(dist, mean(*m.inner, config), config);
          },
      },
      dist.variant());
}

double harmonic_number(std::int64_t n) {
  if (n < 1) throw DomainError("harmonic number needs n >= 1");
  // Smallest terms first.
  double sum = 0.0;
  for (std::int64_t i = n; i >= 1; --i) sum += 1.0 / static_cast<double>(i);
  return sum;
}

double expected_max_two_exp(double rate1, double rate2) {
  require_rate(rate1, "first rate");
  require_rate(rate2, "second rate");
  return 1.0 / rate1 + 1.0 / rate2 - 1.0 / (rate1 + rate2);
}

double expected_max_iid_exp(std::int64_t n, double rate) {
  if (n < 1) throw DomainError("task count must be >= 1");
  require_rate(rate, "rate");
  return harmonic_number(n) / rate;
}

double expected_max_iid_erlang(int n, int k, double rate, const QuadratureConfig& config) {
  if (n < 1) throw DomainError("task count must be >= 1");
  if (k < 1) throw DomainError("repetition count must be >= 1");
  require_rate(rate, "rate");
  if (n == 1) return k / rate;
  if (k == 1) return expected_max_iid_exp(n, rate);
  return expected_max_iid_erlang_quadrature(n, k, rate, config);
}

double expected_max_iid_erlang_quadrature(int n, int k, double rate,
                                          const QuadratureConfig& config) {
  config.validate();
  const auto dist = LatencyDistribution::max_of_iid(n, LatencyDistribution::erlang(k, rate));
  return mean_by_quadrature(dist, k / rate, config);
}

double parallel_latency_cdf(std::span<const LatencyDistribution> members, double t) {
  if (members.empty()) throw DomainError("parallel latency needs at least one member");
  require_time(t);
  double product = 1.0;
  for (const auto& member : members) product *= cdf(member, t);
  return product;
}

// ---------------------------------------------------------------------------
// Phase chains

namespace {

using Matrix = std::vector<double>;  // row-major, (k+1) x (k+1)

Matrix multiply(const Matrix& a, const Matrix& b, std::size_t dim) {
  Matrix out(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t l = i; l < dim; ++l) {
      const double a_il = a[i * dim + l];
      if (a_il == 0.0) continue;
      for (std::size_t j = l; j < dim; ++j) out[i * dim + j] += a_il * b[l * dim + j];
    }
  }
  return out;
}

// exp(Q h) for the pure-birth generator of a phase chain, by uniformization
// over a step short enough for a rapidly converging Poisson series, followed
// by repeated squaring. All entries stay non-negative.
Matrix chain_transition(const std::vector<double>& rates, double h) {
  const std::size_t dim = rates.size() + 1;
  const double top = *std::max_element(rates.begin(), rates.end());
  int squarings = 0;
  double tau = h;
  while (top * tau > 0.5) {
    tau *= 0.5;
    ++squarings;
  }
  Matrix jump(dim * dim, 0.0);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    jump[i * dim + i] = 1.0 - rates[i] / top;
    jump[i * dim + i + 1] = rates[i] / top;
  }
  jump[dim * dim - 1] = 1.0;

  const double mu = top * tau;
  Matrix power(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) power[i * dim + i] = 1.0;
  double weight = std::exp(-mu);
  Matrix result(dim * dim, 0.0);
  for (int n = 0; n < 40; ++n) {
    if (n > 0) {
      power = multiply(power, jump, dim);
      weight *= mu / n;
    }
    for (std::size_t i = 0; i < dim * dim; ++i) result[i] += weight * power[i];
    if (weight < 1e-20) break;
  }
  for (int s = 0; s < squarings; ++s) result = multiply(result, result, dim);
  return result;
}

double chain_mean(const std::vector<double>& rates) {
  double total = 0.0;
  for (double r : rates) total += 1.0 / r;
  return total;
}

void validate_chains(std::span<const PhaseChain> chains) {
  if (chains.empty()) throw DomainError("at least one phase chain is required");
  for (const auto& chain : chains) {
    if (chain.rates.empty()) throw DomainError("a phase chain needs at least one phase");
    if (chain.copies < 1) throw DomainError("phase chain copies must be >= 1");
    for (double r : chain.rates) require_rate(r, "phase rate");
  }
}

}  // namespace

ChainMaxEvaluator::ChainMaxEvaluator(double horizon, int subdivisions)
    : horizon_(horizon), subdivisions_(subdivisions + subdivisions % 2) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  if (subdivisions < 16) throw DomainError("at least 16 subdivisions are required");
}

const std::vector<double>& ChainMaxEvaluator::cdf_grid(const std::vector<double>& rates) {
  std::vector<double> key = rates;
  std::sort(key.begin(), key.end());
  if (auto it = grids_.find(key); it != grids_.end()) return it->second;

  const std::size_t dim = key.size() + 1;
  const Matrix step = chain_transition(key, horizon_ / subdivisions_);
  std::vector<double> state(dim, 0.0);
  std::vector<double> next(dim);
  state[0] = 1.0;
  std::vector<double> grid(static_cast<std::size_t>(subdivisions_) + 1);
  grid[0] = 0.0;
  for (int j = 1; j <= subdivisions_; ++j) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < dim; ++r) {
      if (state[r] == 0.0) continue;
      for (std::size_t c = r; c < dim; ++c) next[c] += state[r] * step[r * dim + c];
    }
    state.swap(next);
    grid[static_cast<std::size_t>(j)] = std::clamp(state[dim - 1], 0.0, 1.0);
  }
  return grids_.emplace(std::move(key), std::move(grid)).first->second;
}

double ChainMaxEvaluator::expected_max(std::span<const PhaseChain> chains,
                                       double tail_tolerance) {
  validate_chains(chains);
  std::vector<const std::vector<double>*> grids;
  grids.reserve(chains.size());
  for (const auto& chain : chains) grids.push_back(&cdf_grid(chain.rates));

  const auto points = static_cast<std::size_t>(subdivisions_) + 1;
  double sum = 0.0;
  double last_tail = 1.0;
  for (std::size_t j = 0; j < points; ++j) {
    double joint = 1.0;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      joint *= std::pow((*grids[c])[j], chains[c].copies);
    }
    const double tail = 1.0 - joint;
    const double weight = (j == 0 || j + 1 == points) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    sum += weight * tail;
    last_tail = tail;
  }
  check_tail(last_tail, horizon_, tail_tolerance);
  return horizon_ / subdivisions_ / 3.0 * sum;
}

double expected_max_of_chains(std::span<const PhaseChain> chains, const QuadratureConfig& config) {
  config.validate();
  validate_chains(chains);
  double longest = 0.0;
  for (const auto& chain : chains) longest = std::max(longest, chain_mean(chain.rates));
  const double horizon = config.bound * longest;

  int panels = config.subdivisions;
  double estimate = ChainMaxEvaluator(horizon, panels).expected_max(chains, config.tolerance);
  for (int level = 0; level < kMaxRefinements; ++level) {
    panels *= 2;
    const double refined =
        ChainMaxEvaluator(horizon, panels).expected_max(chains, config.tolerance);
    if (std::abs(refined - estimate) <= config.tolerance * std::abs(refined)) return refined;
    estimate = refined;
  }
  throw NumericalError("phase-chain quadrature did not converge; last estimate " +
                       std::to_string(estimate));
}

}  // namespace hputune
