#include "mamdi/loading.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mamdi/rng.hpp"

namespace mamdi {

namespace {

void require_success_prob(double eta, const char* name) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::domain_error(std::string(name) + " must lie in (0, 1]");
}

void require_delta(double delta) {
  if (!(delta >= 0.0)) throw std::domain_error("decay exponent delta must be >= 0");
}

double union_prob(double eta_a, double eta_b) { return eta_a + eta_b - eta_a * eta_b; }

// Streaming mean/variance accumulator.
struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  Estimate estimate() const {
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n))};
  }
};

}  // namespace

double loading_distribution(double eta_a, double eta_b, std::uint64_t k) {
  require_success_prob(eta_a, "eta_a");
  require_success_prob(eta_b, "eta_b");
  const double p0 = eta_a * eta_b / union_prob(eta_a, eta_b);
  if (k == 0) return p0;
  const double kk = static_cast<double>(k);
  return (std::pow(1.0 - eta_a, kk) + std::pow(1.0 - eta_b, kk)) * p0;
}

double expected_max(double eta_a, double eta_b) {
  require_success_prob(eta_a, "eta_a");
  require_success_prob(eta_b, "eta_b");
  const double d = union_prob(eta_a, eta_b);
  return 0.5 * (eta_a * (1.0 - eta_b) / (eta_b * d) + eta_b * (1.0 - eta_a) / (eta_a * d) +
                1.0 / eta_a + 1.0 / eta_b);
}

double expected_abs_diff(double eta_a, double eta_b) {
  require_success_prob(eta_a, "eta_a");
  require_success_prob(eta_b, "eta_b");
  const double d = union_prob(eta_a, eta_b);
  return eta_a * (1.0 - eta_b) / (eta_b * d) + eta_b * (1.0 - eta_a) / (eta_a * d);
}

double decay_expectation(double eta_a, double eta_b, double delta) {
  require_success_prob(eta_a, "eta_a");
  require_success_prob(eta_b, "eta_b");
  require_delta(delta);
  // The delta = 0 value is algebraically exactly 1; returning the literal
  // keeps "no decay" configurations exact instead of within rounding.
  if (delta == 0.0) return 1.0;
  const double w = std::exp(-delta);
  const double p0 = eta_a * eta_b / union_prob(eta_a, eta_b);
  const double value =
      p0 * (1.0 / (1.0 - w * (1.0 - eta_a)) + 1.0 / (1.0 - w * (1.0 - eta_b)) - 1.0);
  return std::min(value, 1.0);
}

double storage_time(double eta_a, double eta_b, double period_s) {
  if (!(period_s >= 0.0)) throw std::domain_error("repetition period must be >= 0 s");
  return expected_abs_diff(eta_a, eta_b) * period_s;
}

OrderOverlap order_and_overlap(double eta_a, double eta_b, double delta) {
  require_success_prob(eta_a, "eta_a");
  require_success_prob(eta_b, "eta_b");
  require_delta(delta);
  const double d = union_prob(eta_a, eta_b);
  const double w = std::exp(-delta);
  const double s =
      eta_a * eta_b * (1.0 - eta_b) * w / ((1.0 - (1.0 - eta_b) * w) * d);
  return {eta_b / d, s};
}

LoadingStats mc_loading_oracle(double eta_a, double eta_b, double delta,
                               std::uint64_t trials, std::uint64_t seed) {
  require_success_prob(eta_a, "eta_a");
  require_success_prob(eta_b, "eta_b");
  require_delta(delta);
  if (trials == 0) throw std::invalid_argument("mc_loading_oracle: trials must be >= 1");

  Welford p_equal, e_max, e_abs, prob_ge, decay, overlap;
  constexpr std::uint64_t block_size = 1 << 16;
  for (std::uint64_t start = 0; start < trials; start += block_size) {
    const std::uint64_t block = start / block_size;
    const std::uint64_t count = std::min<std::uint64_t>(block_size, trials - start);
    rng::Stream stream_a(seed, "loading-a", block);
    rng::Stream stream_b(seed, "loading-b", block);
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto na = stream_a.geometric(eta_a);
      const auto nb = stream_b.geometric(eta_b);
      const double diff =
          na >= nb ? static_cast<double>(na - nb) : static_cast<double>(nb - na);
      const double decay_term = std::exp(-diff * delta);
      p_equal.add(na == nb ? 1.0 : 0.0);
      e_max.add(static_cast<double>(std::max(na, nb)));
      e_abs.add(diff);
      prob_ge.add(na >= nb ? 1.0 : 0.0);
      decay.add(decay_term);
      overlap.add(na < nb ? decay_term : 0.0);
    }
  }

  LoadingStats out;
  out.p_equal = p_equal.estimate();
  out.expected_max = e_max.estimate();
  out.expected_abs_diff = e_abs.estimate();
  out.storage_time = e_abs.estimate();  // in units of one repetition period
  out.prob_a_ge_b = prob_ge.estimate();
  out.decay_expectation = decay.estimate();
  out.s_a_lt_b = overlap.estimate();
  out.delta = delta;
  out.trials = trials;
  out.seed = seed;
  return out;
}

}  // namespace mamdi
