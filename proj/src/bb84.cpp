#include "mamdi/bb84.hpp"

#include <cmath>
#include <stdexcept>

namespace mamdi {

namespace {

struct LinkBudget {
  double eta;   // end-to-end transmittance including the detector
  double p_dc;  // per-detector dark count probability per pulse
  double e_d;   // additive two-end misalignment
};

LinkBudget link_budget(const SystemConfig& config) {
  config.validate();
  const double eta =
      channel_transmittance(config.geometry.total_km(), config.channel) *
      config.detector.efficiency;
  const auto pp = per_pulse_probabilities(config.channel, config.detector, config.source);
  return {eta, pp.p_dc, config.channel.misalignment_a + config.channel.misalignment_b};
}

constexpr double e0 = 0.5;

// Correct/error split for an arrival probability p_arr: the correct class is
// an arrival with at most a same-bit dark count; everything else that clicks
// is assigned a random bit.
double correct_class(double p_arr, double p_dc) {
  return (1.0 - 0.5 * p_dc) * (p_arr + (1.0 - p_arr) * p_dc);
}
double error_class(double p_arr, double p_dc) {
  return p_dc * ((1.0 - p_arr) * (1.0 - 0.5 * p_dc) + 0.5 * p_arr);
}

}  // namespace

Bb84Breakdown bb84_single_photon(const SystemConfig& config) {
  const auto link = link_budget(config);
  // Yield and error gain are assembled from the class split rather than the
  // equivalent subtraction forms: every term is a product of nonnegative
  // factors, so the error fraction stays a probability even where the
  // subtraction cancels to rounding noise (ideal links at long distance).
  const double y_c = correct_class(link.eta, link.p_dc);
  const double y_e = error_class(link.eta, link.p_dc);
  const double y1 = y_c + y_e;
  const double e1 = y1 > 0.0 ? (link.e_d * y_c + (1.0 - link.e_d) * y_e) / y1 : e0;
  const double f = config.error_correction_inefficiency;
  const double per_pulse = y1 * (1.0 - binary_entropy(e1) - f * binary_entropy(e1));

  Bb84Breakdown out;
  out.kind = SourceKind::single_photon;
  out.yield_or_gain_correct = y_c;
  out.yield_or_gain_error = y_e;
  out.yield_1 = y1;
  out.qber = e1;
  out.qber_single_photon = e1;
  out.rate_per_pulse = per_pulse;
  out.rate_per_second = per_pulse * config.source.repetition_rate_hz();
  return out;
}

Bb84Breakdown bb84_decoy(const SystemConfig& config) {
  const auto link = link_budget(config);
  if (config.source.kind != SourceKind::decoy)
    throw std::invalid_argument("source.kind must be decoy for bb84_decoy");
  const double mu = config.source.mu;

  // Same cancellation-free class assembly as the single-photon form, for both
  // the single-photon quantities and the full-pulse gain.
  const double y_c = correct_class(link.eta, link.p_dc);
  const double y_e = error_class(link.eta, link.p_dc);
  const double y1 = y_c + y_e;
  const double e1 = y1 > 0.0 ? (link.e_d * y_c + (1.0 - link.e_d) * y_e) / y1 : e0;
  const double q1 = y1 * mu * std::exp(-mu);
  const double arrival = -std::expm1(-link.eta * mu);  // >= 1 signal photon arrives
  const double q_c = correct_class(arrival, link.p_dc);
  const double q_e = error_class(arrival, link.p_dc);
  const double q_mu = q_c + q_e;
  const double e_mu =
      q_mu > 0.0 ? (link.e_d * q_c + (1.0 - link.e_d) * q_e) / q_mu : e0;
  const double f = config.error_correction_inefficiency;
  const double per_pulse =
      q1 * (1.0 - binary_entropy(e1)) - f * q_mu * binary_entropy(e_mu);

  Bb84Breakdown out;
  out.kind = SourceKind::decoy;
  out.yield_or_gain_correct = q_c;
  out.yield_or_gain_error = q_e;
  out.yield_1 = y1;
  out.gain_1 = q1;
  out.gain_mu = q_mu;
  out.qber = e_mu;
  out.qber_single_photon = e1;
  out.rate_per_pulse = per_pulse;
  out.rate_per_second = per_pulse * config.source.repetition_rate_hz();
  return out;
}

}  // namespace mamdi
