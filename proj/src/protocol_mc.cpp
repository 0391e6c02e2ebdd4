#include "mamdi/protocol_mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mamdi/engine.hpp"
#include "mamdi/misalignment.hpp"
#include "mamdi/rng.hpp"

namespace mamdi {

namespace {

constexpr std::uint64_t kBlockSize = std::uint64_t{1} << 16;

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
    return {mean, n > 0 ? std::sqrt(var / static_cast<double>(n)) : 0.0};
  }
};

// Paired accumulator for the ratio estimator E[s]/E[m]; tracks the
// co-moment so the delta-method standard error is available.
struct PairedWelford {
  std::uint64_t n = 0;
  double mean_s = 0.0, mean_m = 0.0;
  double m2_s = 0.0, m2_m = 0.0, co = 0.0;

  void add(double s, double m) {
    ++n;
    const double ds = s - mean_s;
    const double dm = m - mean_m;
    mean_s += ds / static_cast<double>(n);
    mean_m += dm / static_cast<double>(n);
    m2_s += ds * (s - mean_s);
    m2_m += dm * (m - mean_m);
    co += ds * (m - mean_m);
  }
  Estimate ratio() const {
    if (n == 0 || mean_m == 0.0) return {0.0, 0.0};
    const double r = mean_s / mean_m;
    if (n < 2) return {r, 0.0};
    const double nn = static_cast<double>(n);
    const double var_s = m2_s / (nn - 1.0);
    const double var_m = m2_m / (nn - 1.0);
    const double cov = co / (nn - 1.0);
    const double var_r = std::max(0.0, var_s - 2.0 * r * cov + r * r * var_m);
    return {r, std::sqrt(var_r / nn) / mean_m};
  }
};

Estimate binomial_estimate(std::uint64_t errors, std::uint64_t successes) {
  if (successes == 0) return {0.5, 0.5};  // no heralded events, no information
  const double p = static_cast<double>(errors) / static_cast<double>(successes);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(successes))};
}

enum class Outcome { success_correct, success_error, failure };

// Four detectors indexed 2*port + pol with port in {0,1} and pol 0 = H, 1 = V.
// A success is exactly two clicks of opposite polarization; clicks on the
// same port announce the "equal X bits" projection, on different ports the
// "opposite bits" one. In the Z basis both patterns announce opposite bits.
Outcome middle_measurement(Basis basis, bool encoded_equal, int stored_a, int stored_b,
                           bool a_alive, bool b_alive, double p_dc, double d1, double d2,
                           const double (&dark)[4]) {
  bool click[4] = {false, false, false, false};
  auto pick_port = [](double u) { return u < 0.5 ? 0 : 1; };
  auto pick_detector = [](double u) { return std::min(static_cast<int>(u * 4.0), 3); };

  if (a_alive && b_alive) {
    if (basis == Basis::z) {
      if (stored_a == stored_b) {
        // Indistinguishable photons bunch into one output port.
        click[2 * pick_port(d1) + stored_a] = true;
      } else {
        click[2 * pick_port(d1) + stored_a] = true;
        click[2 * pick_port(d2) + stored_b] = true;
      }
    } else {
      if (stored_a == stored_b) {
        // Bunched pair at one port: half the time it splits across the two
        // polarization detectors there, otherwise both photons hit one.
        const int port = pick_port(d1);
        if (d2 < 0.5) {
          click[2 * port] = true;
          click[2 * port + 1] = true;
        } else {
          click[2 * port + (d2 < 0.75 ? 0 : 1)] = true;
        }
      } else {
        if (d1 < 0.5) {
          // Antisymmetric outcome: opposite polarizations on opposite ports.
          if (d2 < 0.5) {
            click[0] = true;  // port 0, H
            click[3] = true;  // port 1, V
          } else {
            click[2] = true;  // port 1, H
            click[1] = true;  // port 0, V
          }
        } else {
          click[pick_detector(d2)] = true;
        }
      }
    }
  } else if (a_alive || b_alive) {
    const int stored = a_alive ? stored_a : stored_b;
    if (basis == Basis::z) {
      click[2 * pick_port(d1) + stored] = true;
    } else {
      click[pick_detector(d1)] = true;
    }
  }

  for (int k = 0; k < 4; ++k)
    if (dark[k] < p_dc) click[k] = true;

  const int total = click[0] + click[1] + click[2] + click[3];
  if (total != 2) return Outcome::failure;
  const int h_clicks = click[0] + click[2];
  if (h_clicks != 1) return Outcome::failure;

  const bool same_port = (click[0] && click[1]) || (click[2] && click[3]);
  const bool infer_equal = basis == Basis::x && same_port;
  return infer_equal == encoded_equal ? Outcome::success_correct : Outcome::success_error;
}

}  // namespace

EmpiricalEstimates simulate_direct(const SystemConfig& config, std::uint64_t trials,
                                   std::uint64_t seed) {
  config.validate();
  if (config.heralding != Heralding::direct)
    throw std::invalid_argument("simulate_direct requires the direct heralding scheme");
  if (trials == 0) throw std::invalid_argument("simulate_direct requires trials > 0");

  const bool decoy = config.source.kind == SourceKind::decoy;
  const double eta_load_a =
      decoy ? loading_prob_direct(config, Leg::a, config.source.mu)
            : loading_prob_direct(config, Leg::a);
  const double eta_load_b =
      decoy ? loading_prob_direct(config, Leg::b, config.source.nu)
            : loading_prob_direct(config, Leg::b);

  const double p_bg = per_pulse_probabilities(config.channel, config.detector, config.source).p_bg;
  const double eta_w = config.memory.writing_efficiency;
  const double e_bg_a = background_flip_prob(eta_load_a, eta_w, p_bg);
  const double e_bg_b = background_flip_prob(eta_load_b, eta_w, p_bg);
  const double e_d_a = config.channel.misalignment_a;
  const double e_d_b = config.channel.misalignment_b;

  const double eta_m = config.memory.reading_efficiency_0 * config.detector.efficiency;
  const double period = config.source.repetition_period_s;
  const double t1 = config.memory.amplitude_decay_time_s;
  const double t2 = config.memory.coherence_time_s;
  const double p_dc = config.detector.dark_rate_hz * config.source.pulse_width_s;
  const int n_read = holding_rounds(config);

  PairedWelford yield_acc;
  Welford load_acc, wait_acc;
  std::uint64_t succ_z = 0, succ_x = 0, err_z = 0, err_x = 0;

  for (std::uint64_t block_start = 0; block_start < trials; block_start += kBlockSize) {
    const std::uint64_t block = block_start / kBlockSize;
    rng::Stream load_a(seed, "load-a", block);
    rng::Stream load_b(seed, "load-b", block);
    rng::Stream content(seed, "content", block);
    rng::Stream bsm(seed, "bsm", block);
    const std::uint64_t block_end = std::min(trials, block_start + kBlockSize);

    for (std::uint64_t g = block_start; g < block_end; ++g) {
      const std::uint64_t rounds_a = load_a.geometric(eta_load_a);
      const std::uint64_t rounds_b = load_b.geometric(eta_load_b);

      // Fixed draw budget per trial keeps every stream aligned across branches.
      const double u_bit_a = content.uniform();
      const double u_bit_b = content.uniform();
      const double u_bg_a = content.uniform();
      const double u_bg_b = content.uniform();
      const double u_bgbit_a = content.uniform();
      const double u_bgbit_b = content.uniform();
      const double u_flip_a = content.uniform();
      const double u_flip_b = content.uniform();
      const double u_deph = content.uniform();

      const double u_surv_a = bsm.uniform();
      const double u_surv_b = bsm.uniform();
      const double u_d1 = bsm.uniform();
      const double u_d2 = bsm.uniform();
      const double u_dark[4] = {bsm.uniform(), bsm.uniform(), bsm.uniform(), bsm.uniform()};

      const Basis basis = g % 2 == 0 ? Basis::z : Basis::x;
      const std::uint64_t wait =
          rounds_a > rounds_b ? rounds_a - rounds_b : rounds_b - rounds_a;
      const double hold_s = static_cast<double>(wait) * period;

      const int bit_a = u_bit_a < 0.5 ? 0 : 1;
      const int bit_b = u_bit_b < 0.5 ? 0 : 1;
      int stored_a = u_bg_a < e_bg_a ? (u_bgbit_a < 0.5 ? 0 : 1)
                                     : bit_a ^ (u_flip_a < e_d_a ? 1 : 0);
      int stored_b = u_bg_b < e_bg_b ? (u_bgbit_b < 0.5 ? 0 : 1)
                                     : bit_b ^ (u_flip_b < e_d_b ? 1 : 0);

      // Only the memory loaded first waits; it dephases (X flips) and its
      // retrieval amplitude decays over the wait.
      double surv_prob_a = eta_m, surv_prob_b = eta_m;
      if (wait > 0) {
        const double decay = std::isinf(t1) ? 1.0 : std::exp(-hold_s / t1);
        const double deph_flip = std::isinf(t2) ? 0.0 : 0.5 * (1.0 - std::exp(-hold_s / t2));
        if (rounds_a < rounds_b) {
          surv_prob_a *= decay;
          if (basis == Basis::x && u_deph < deph_flip) stored_a ^= 1;
        } else {
          surv_prob_b *= decay;
          if (basis == Basis::x && u_deph < deph_flip) stored_b ^= 1;
        }
      }

      const Outcome outcome = middle_measurement(
          basis, bit_a == bit_b, stored_a, stored_b, u_surv_a < surv_prob_a,
          u_surv_b < surv_prob_b, p_dc, u_d1, u_d2, u_dark);

      const double cycle_pulses =
          static_cast<double>(std::max(rounds_a, rounds_b)) + static_cast<double>(n_read);
      yield_acc.add(outcome == Outcome::failure ? 0.0 : 1.0, cycle_pulses);
      load_acc.add(static_cast<double>(std::max(rounds_a, rounds_b)));
      wait_acc.add(hold_s);
      if (outcome != Outcome::failure) {
        (basis == Basis::z ? succ_z : succ_x) += 1;
        if (outcome == Outcome::success_error) (basis == Basis::z ? err_z : err_x) += 1;
      }
    }
  }

  EmpiricalEstimates out;
  out.y11_qm = yield_acc.ratio();
  out.e11z = binomial_estimate(err_z, succ_z);
  out.e11x = binomial_estimate(err_x, succ_x);
  out.n_load = load_acc.estimate();
  out.storage_time = wait_acc.estimate();
  out.trials = trials;
  out.successes_z = succ_z;
  out.successes_x = succ_x;
  out.errors_z = err_z;
  out.errors_x = err_x;
  out.seed = seed;
  return out;
}

}  // namespace mamdi
