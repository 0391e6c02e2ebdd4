#include "mamdi/misalignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mamdi/loading.hpp"
#include "mamdi/mdi.hpp"

namespace mamdi {

namespace {

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::domain_error(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

double background_flip_prob(double eta_k, double eta_w, double p_bg) {
  require_unit(eta_k, "eta_k");
  require_unit(eta_w, "eta_w");
  if (!(p_bg >= 0.0)) throw std::domain_error("p_bg must be >= 0");
  const double contaminated = -std::expm1(-eta_w * p_bg);
  if (contaminated == 0.0) return 0.0;
  if (!(eta_k > 0.0)) throw std::domain_error("eta_k must be > 0 when background light is present");
  return std::clamp(contaminated / eta_k, 0.0, 1.0);
}

double misalignment_z_direct(double e_dk, double e_bg) {
  require_unit(e_dk, "e_dk");
  require_unit(e_bg, "e_bg");
  return e_dk * (1.0 - e_bg) + 0.5 * e_bg;
}

double misalignment_z_indirect(const SystemConfig& config, Leg leg) {
  config.validate();
  const double distance = leg == Leg::a ? config.geometry.distance_a_km
                                        : config.geometry.distance_b_km;
  const double e_dk = leg == Leg::a ? config.channel.misalignment_a
                                    : config.channel.misalignment_b;
  const double eta_d = config.detector.efficiency;
  const double eta_signal = eta_d * channel_transmittance(distance, config.channel);
  const double eta_herald = eta_d * config.memory.entangling_efficiency;
  const double p_dc_eff =
      (config.detector.dark_rate_hz + config.channel.background_rate_hz * eta_d / 2.0) *
      config.source.pulse_width_s;
  return mdi_kernel(eta_signal, eta_herald, p_dc_eff, e_dk).e11z;
}

PairMisalignment pair_misalignment_from_legs(double e_dz_a, double e_dz_b,
                                             double eta_a, double eta_b,
                                             double delta_t2) {
  require_unit(e_dz_a, "e_dz_a");
  require_unit(e_dz_b, "e_dz_b");

  PairMisalignment out;
  out.e_dz_a = e_dz_a;
  out.e_dz_b = e_dz_b;
  out.beta_a = 1.0 - 2.0 * e_dz_a;
  out.beta_b = 1.0 - 2.0 * e_dz_b;

  // Mean X-basis dephasing error of whichever memory loaded first: half the
  // probability it dephased while waiting for the other.  The subtraction
  // cancels exactly at delta_t2 = 0, so clamp away the residual rounding.
  const double prob_a_early = 1.0 - order_and_overlap(eta_a, eta_b, 0.0).prob_a_ge_b;
  const double prob_b_early = 1.0 - order_and_overlap(eta_b, eta_a, 0.0).prob_a_ge_b;
  const double mean_deph_a = std::max(
      0.0, 0.5 * (prob_a_early - order_and_overlap(eta_a, eta_b, delta_t2).s_a_lt_b));
  const double mean_deph_b = std::max(
      0.0, 0.5 * (prob_b_early - order_and_overlap(eta_b, eta_a, delta_t2).s_a_lt_b));

  out.mean_e_dx_a = std::clamp(e_dz_a + out.beta_a * mean_deph_a, 0.0, 1.0);
  out.mean_e_dx_b = std::clamp(e_dz_b + out.beta_b * mean_deph_b, 0.0, 1.0);
  // Only one memory is ever early, so the dephasing-dephasing cross term vanishes.
  out.mean_e_dx_product =
      std::clamp(e_dz_a * e_dz_b + out.beta_a * mean_deph_a * e_dz_b +
                     out.beta_b * mean_deph_b * e_dz_a,
                 0.0, 1.0);
  out.e_dz_pair = xor_probability(e_dz_a, e_dz_b);
  out.mean_e_dx_pair = std::clamp(
      out.mean_e_dx_a + out.mean_e_dx_b - 2.0 * out.mean_e_dx_product, 0.0, 1.0);
  return out;
}

PairMisalignment pair_misalignment(const SystemConfig& config, double eta_a, double eta_b) {
  config.validate();
  double e_dz_a, e_dz_b;
  if (config.heralding == Heralding::direct) {
    const auto pp = per_pulse_probabilities(config.channel, config.detector, config.source);
    const double eta_w = config.memory.writing_efficiency;
    e_dz_a = misalignment_z_direct(config.channel.misalignment_a,
                                   background_flip_prob(eta_a, eta_w, pp.p_bg));
    e_dz_b = misalignment_z_direct(config.channel.misalignment_b,
                                   background_flip_prob(eta_b, eta_w, pp.p_bg));
  } else if (config.heralding == Heralding::indirect) {
    e_dz_a = misalignment_z_indirect(config, Leg::a);
    e_dz_b = misalignment_z_indirect(config, Leg::b);
  } else {
    throw std::invalid_argument("pair_misalignment requires a heralding memory configuration");
  }
  const double delta_t2 =
      std::isinf(config.memory.coherence_time_s)
          ? 0.0
          : config.source.repetition_period_s / config.memory.coherence_time_s;
  return pair_misalignment_from_legs(e_dz_a, e_dz_b, eta_a, eta_b, delta_t2);
}

}  // namespace mamdi
