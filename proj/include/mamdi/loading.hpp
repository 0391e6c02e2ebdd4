#pragma once

#include <cstdint>

#include "mamdi/params.hpp"

namespace mamdi {

// A Monte Carlo point estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Order statistics of the two independent first-success round counters
// N_A ~ Geometric(eta_a), N_B ~ Geometric(eta_b), both supported on {1,2,...}.

// Pr(|N_A - N_B| = k), k >= 0.
double loading_distribution(double eta_a, double eta_b, std::uint64_t k);

// E{max(N_A, N_B)}: mean number of rounds until both counters have fired.
double expected_max(double eta_a, double eta_b);

// E{|N_A - N_B|}: mean number of rounds the early counter waits for the late one.
double expected_abs_diff(double eta_a, double eta_b);

// E{exp(-|N_A - N_B| * delta)}, the hold-time decay factor. Exactly 1 at delta = 0.
double decay_expectation(double eta_a, double eta_b, double delta);

// E{|N_A - N_B|} * period: mean waiting time of the early counter.
double storage_time(double eta_a, double eta_b, double period_s);

struct OrderOverlap {
  double prob_a_ge_b;  // Pr{N_A >= N_B}
  double s_a_lt_b;     // E{exp(-(N_B - N_A) * delta); N_A < N_B}
};
OrderOverlap order_and_overlap(double eta_a, double eta_b, double delta);

// Empirical counterparts of everything above from one seeded simulation.
// storage_time is reported in units of one repetition period. Deterministic
// given (trials, seed) and independent of block execution order.
struct LoadingStats {
  Estimate p_equal;
  Estimate expected_max;
  Estimate expected_abs_diff;
  Estimate storage_time;
  Estimate prob_a_ge_b;
  Estimate decay_expectation;
  Estimate s_a_lt_b;
  double delta = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};
LoadingStats mc_loading_oracle(double eta_a, double eta_b, double delta,
                               std::uint64_t trials, std::uint64_t seed);

}  // namespace mamdi
