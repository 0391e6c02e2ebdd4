#include "mamdi/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mamdi/loading.hpp"
#include "mamdi/misalignment.hpp"

namespace mamdi {

namespace {

double middle_dark_prob(const SystemConfig& config) {
  return config.detector.dark_rate_hz * config.source.pulse_width_s;
}

double side_dark_prob(const SystemConfig& config) {
  // Heralding measurements see fiber background on top of intrinsic darks;
  // half the background photons share the detector's polarization.
  return (config.detector.dark_rate_hz +
          config.channel.background_rate_hz * config.detector.efficiency / 2.0) *
         config.source.pulse_width_s;
}

double leg_distance(const SystemConfig& config, Leg leg) {
  return leg == Leg::a ? config.geometry.distance_a_km : config.geometry.distance_b_km;
}

}  // namespace

double loading_prob_direct(const SystemConfig& config, Leg leg,
                           std::optional<double> intensity) {
  const double eta_ch = channel_transmittance(leg_distance(config, leg), config.channel);
  const double eta_w = config.memory.writing_efficiency;
  const double p_bg = per_pulse_probabilities(config.channel, config.detector, config.source).p_bg;
  if (intensity) {
    if (!(*intensity >= 0.0)) throw std::domain_error("intensity must be >= 0");
    return -std::expm1(-eta_w * (eta_ch * *intensity + p_bg));
  }
  return 1.0 - (1.0 - eta_w * eta_ch) * std::exp(-eta_w * p_bg);
}

double loading_prob_indirect(const SystemConfig& config, Leg leg) {
  const double eta_d = config.detector.efficiency;
  const double eta_signal = eta_d * channel_transmittance(leg_distance(config, leg), config.channel);
  const double eta_herald = eta_d * config.memory.entangling_efficiency;
  return mdi_kernel(eta_signal, eta_herald, side_dark_prob(config), 0.0).y11;
}

double loading_prob(const SystemConfig& config, Leg leg, std::optional<double> intensity) {
  switch (config.heralding) {
    case Heralding::direct:
      return loading_prob_direct(config, leg, intensity);
    case Heralding::indirect:
      return loading_prob_indirect(config, leg);
    default:
      throw std::invalid_argument("loading probability requires a heralding memory configuration");
  }
}

int holding_rounds(const SystemConfig& config) {
  const double quotient = (config.memory.reading_time_s + config.memory.writing_time_s) /
                          config.source.repetition_period_s;
  // Relative guard so an exact integer quotient is not pushed to the next round.
  const int rounds = static_cast<int>(std::ceil(quotient - quotient * 1e-12)) - 1;
  return std::max(rounds, 0);
}

MeasurementEfficiencies effective_measurement_efficiencies(const SystemConfig& config,
                                                           double eta_a, double eta_b) {
  MeasurementEfficiencies out;
  out.eta_m = config.memory.reading_efficiency_0 * config.detector.efficiency;
  const double delta_t1 =
      std::isinf(config.memory.amplitude_decay_time_s)
          ? 0.0
          : config.source.repetition_period_s / config.memory.amplitude_decay_time_s;
  out.eta_m_prime = out.eta_m * decay_expectation(eta_a, eta_b, delta_t1);
  return out;
}

RateBreakdown rate_single_photon(const SystemConfig& config) {
  config.validate();
  if (config.heralding == Heralding::none)
    throw std::invalid_argument("memory-assisted rate requires a heralding memory configuration");
  if (config.source.kind != SourceKind::single_photon)
    throw std::invalid_argument("rate_single_photon requires a single-photon source");

  const double eta_1a = loading_prob(config, Leg::a);
  const double eta_1b = loading_prob(config, Leg::b);
  const int n_read = holding_rounds(config);
  const double n_load = expected_max(eta_1a, eta_1b);
  const auto eff = effective_measurement_efficiencies(config, eta_1a, eta_1b);
  const auto pm = pair_misalignment(config, eta_1a, eta_1b);
  const double p_dc = middle_dark_prob(config);

  const double y11 = mdi_kernel(eff.eta_m, eff.eta_m_prime, p_dc, 0.0).y11;
  const double e11z = mdi_kernel(eff.eta_m, eff.eta_m_prime, p_dc, pm.e_dz_pair).e11z;
  const double e11x = mdi_kernel(eff.eta_m, eff.eta_m_prime, p_dc, pm.mean_e_dx_pair).e11x;

  RateBreakdown out;
  out.kind = SourceKind::single_photon;
  out.heralding = config.heralding;
  out.yield_y11_qm = y11 / (n_load + n_read);
  out.e11x_qm = e11x;
  out.e11z_qm = e11z;
  out.rate_per_pulse =
      out.yield_y11_qm * (1.0 - binary_entropy(e11x) -
                          config.error_correction_inefficiency * binary_entropy(e11z));
  out.rate_per_second = out.rate_per_pulse * config.source.repetition_rate_hz();
  out.n_load = n_load;
  out.n_read = n_read;
  out.eta_m = eff.eta_m;
  out.eta_m_prime = eff.eta_m_prime;
  out.eta_load_a = eta_1a;
  out.eta_load_b = eta_1b;
  out.storage_time_s = expected_abs_diff(eta_1a, eta_1b) * config.source.repetition_period_s;
  return out;
}

RateBreakdown rate_decoy(const SystemConfig& config) {
  config.validate();
  if (config.heralding == Heralding::none)
    throw std::invalid_argument("memory-assisted rate requires a heralding memory configuration");
  if (config.source.kind != SourceKind::decoy)
    throw std::invalid_argument("rate_decoy requires a decoy source");

  const double mu = config.source.mu;
  const double nu = config.source.nu;
  const double period = config.source.repetition_period_s;
  const int n_read = holding_rounds(config);
  const double p_dc = middle_dark_prob(config);
  const double delta_t2 = std::isinf(config.memory.coherence_time_s)
                              ? 0.0
                              : period / config.memory.coherence_time_s;

  double eta_mu_a, eta_nu_b;  // loading probabilities under signal intensities
  double eta_1a, eta_1b;      // loading probabilities for single-photon emissions
  double e_dz_pair_mu, e_dz_pair_1, e_dx_pair_1;
  bool extension = false;

  if (config.heralding == Heralding::direct) {
    eta_mu_a = loading_prob_direct(config, Leg::a, mu);
    eta_nu_b = loading_prob_direct(config, Leg::b, nu);
    eta_1a = loading_prob_direct(config, Leg::a);
    eta_1b = loading_prob_direct(config, Leg::b);
    e_dz_pair_mu = pair_misalignment(config, eta_mu_a, eta_nu_b).e_dz_pair;
    const auto pm_1 = pair_misalignment(config, eta_1a, eta_1b);
    e_dz_pair_1 = pm_1.e_dz_pair;
    e_dx_pair_1 = pm_1.mean_e_dx_pair;
  } else {
    // Heralding measurement between a phase-randomized signal and the
    // single-photon half of an entangled pair, the latter taken as an
    // intensity-one reference in the coherent-input gain.
    extension = true;
    const double eta_d = config.detector.efficiency;
    const double eta_herald = eta_d * config.memory.entangling_efficiency;
    const double p_side = side_dark_prob(config);
    const double eta_sig_a =
        eta_d * channel_transmittance(config.geometry.distance_a_km, config.channel);
    const double eta_sig_b =
        eta_d * channel_transmittance(config.geometry.distance_b_km, config.channel);
    const auto gain_a = mdi_decoy_gain(mu, 1.0, eta_sig_a, eta_herald, p_side,
                                       config.channel.misalignment_a);
    const auto gain_b = mdi_decoy_gain(nu, 1.0, eta_sig_b, eta_herald, p_side,
                                       config.channel.misalignment_b);
    eta_mu_a = gain_a.gain_z;
    eta_nu_b = gain_b.gain_z;
    eta_1a = loading_prob_indirect(config, Leg::a);
    eta_1b = loading_prob_indirect(config, Leg::b);
    e_dz_pair_mu = pair_misalignment_from_legs(gain_a.qber_z, gain_b.qber_z, eta_mu_a,
                                               eta_nu_b, delta_t2)
                       .e_dz_pair;
    const auto pm_1 = pair_misalignment_from_legs(misalignment_z_indirect(config, Leg::a),
                                                  misalignment_z_indirect(config, Leg::b),
                                                  eta_1a, eta_1b, delta_t2);
    e_dz_pair_1 = pm_1.e_dz_pair;
    e_dx_pair_1 = pm_1.mean_e_dx_pair;
  }

  const double n_load = expected_max(eta_mu_a, eta_nu_b);
  const auto eff_mu = effective_measurement_efficiencies(config, eta_mu_a, eta_nu_b);
  const auto eff_1 = effective_measurement_efficiencies(config, eta_1a, eta_1b);

  const double gain_z = mdi_kernel(eff_mu.eta_m, eff_mu.eta_m_prime, p_dc, 0.0).y11 /
                        (n_load + n_read);
  const double qber_z = mdi_kernel(eff_mu.eta_m, eff_mu.eta_m_prime, p_dc, e_dz_pair_mu).e11z;
  const double single_fraction = (eta_mu_a > 0.0 && eta_nu_b > 0.0)
                                     ? (eta_1a * eta_1b) / (eta_mu_a * eta_nu_b)
                                     : 0.0;
  const double q11 = gain_z * single_fraction * mu * nu * std::exp(-mu - nu);
  const double e11x = mdi_kernel(eff_1.eta_m, eff_1.eta_m_prime, p_dc, e_dx_pair_1).e11x;
  const double e11z = mdi_kernel(eff_1.eta_m, eff_1.eta_m_prime, p_dc, e_dz_pair_1).e11z;

  RateBreakdown out;
  out.kind = SourceKind::decoy;
  out.heralding = config.heralding;
  out.gain_q11_qm = q11;
  out.gain_z = gain_z;
  out.qber_z_total = qber_z;
  out.e11x_qm = e11x;
  out.e11z_qm = e11z;
  out.rate_per_pulse = q11 * (1.0 - binary_entropy(e11x)) -
                       config.error_correction_inefficiency * gain_z * binary_entropy(qber_z);
  out.rate_per_second = out.rate_per_pulse * config.source.repetition_rate_hz();
  out.n_load = n_load;
  out.n_read = n_read;
  out.eta_m = eff_mu.eta_m;
  out.eta_m_prime = eff_mu.eta_m_prime;
  out.eta_load_a = eta_mu_a;
  out.eta_load_b = eta_nu_b;
  out.storage_time_s = expected_abs_diff(eta_mu_a, eta_nu_b) * period;
  out.extension_composition = extension;
  return out;
}

RateBreakdown rate(const SystemConfig& config) {
  return config.source.kind == SourceKind::single_photon ? rate_single_photon(config)
                                                         : rate_decoy(config);
}

SymmetricSummary symmetric_summary(const SystemConfig& config) {
  config.validate();
  if (config.heralding == Heralding::none)
    throw std::invalid_argument("symmetric_summary requires a heralding memory configuration");
  const double la = config.geometry.distance_a_km;
  const double lb = config.geometry.distance_b_km;
  if (std::abs(la - lb) > 1e-9 * std::max({la, lb, 1.0}))
    throw std::domain_error("symmetric_summary requires equal leg lengths");

  const double eta_qm =
      config.heralding == Heralding::direct
          ? config.memory.writing_efficiency
          : config.memory.entangling_efficiency * config.detector.efficiency *
                config.detector.efficiency;
  const double eta = eta_qm * channel_transmittance(la, config.channel);
  if (!(eta > 0.0)) throw std::domain_error("loading probability must be positive");

  SymmetricSummary out;
  out.loading_prob = eta;
  out.expected_rounds = (3.0 - 2.0 * eta) / (eta * (2.0 - eta));
  out.storage_time_s =
      2.0 * (1.0 - eta) * config.source.repetition_period_s / (eta * (2.0 - eta));
  return out;
}

}  // namespace mamdi
