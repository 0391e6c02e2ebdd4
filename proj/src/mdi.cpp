#include "mamdi/mdi.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mamdi {

namespace {

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::domain_error(std::string(name) + " must lie in [0, 1]");
}

constexpr double kSeriesAsymptoticSwitch = 30.0;

}  // namespace

double bessel_i0(double x) {
  x = std::fabs(x);
  if (x < kSeriesAsymptoticSwitch) {
    // sum_k (x^2/4)^k / (k!)^2; every term positive, stop at double precision.
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < sum * 1e-18) break;
    }
    return sum;
  }
  // I0(x) ~ e^x/sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k); truncate when
  // terms stop decreasing (divergent tail) or fall below double precision.
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (8.0 * x * k);
    if (next >= term || next < sum * 1e-18) {
      if (next < term) sum += next;
      break;
    }
    term = next;
    sum += term;
  }
  return sum * std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x);
}

MdiKernel mdi_kernel(double eta_a, double eta_b, double p_dc, double e_d) {
  require_unit(eta_a, "eta_a");
  require_unit(eta_b, "eta_b");
  require_unit(p_dc, "p_dc");
  require_unit(e_d, "e_d");

  const double nd = 1.0 - p_dc;
  const double y11 = nd * nd *
                     (0.5 * eta_a * eta_b +
                      (2.0 * eta_a + 2.0 * eta_b - 3.0 * eta_a * eta_b) * p_dc +
                      4.0 * (1.0 - eta_a) * (1.0 - eta_b) * p_dc * p_dc);
  constexpr double e0 = 0.5;
  if (y11 <= 0.0) return {0.0, e0, e0};

  const double clean = nd * nd * 0.5 * eta_a * eta_b;
  const double e11x = (e0 * y11 - (e0 - e_d) * clean) / y11;
  const double e11z = (e0 * y11 - (e0 - e_d) * clean * (1.0 - 2.0 * p_dc)) / y11;
  return {y11, e11x, e11z};
}

MdiDecoyGain mdi_decoy_gain(double mu, double nu, double eta_a, double eta_b,
                            double p_dc, double e_d) {
  if (!(mu > 0.0) || !(nu > 0.0))
    throw std::domain_error("decoy intensities must be > 0");
  require_unit(eta_a, "eta_a");
  require_unit(eta_b, "eta_b");
  require_unit(p_dc, "p_dc");
  require_unit(e_d, "e_d");

  const double nd = 1.0 - p_dc;
  const double x = 0.5 * std::sqrt(eta_a * mu * eta_b * nu);
  const double mu_prime = eta_a * mu + eta_b * nu;
  const double damp = std::exp(-0.5 * mu_prime);
  const double gain_correct = 2.0 * nd * nd * damp *
                              (1.0 - nd * std::exp(-0.5 * eta_a * mu)) *
                              (1.0 - nd * std::exp(-0.5 * eta_b * nu));
  const double gain_error =
      2.0 * p_dc * nd * nd * damp * (bessel_i0(2.0 * x) - nd * damp);
  const double gain_z = gain_correct + gain_error;
  const double qber_z =
      gain_z > 0.0 ? (e_d * gain_correct + (1.0 - e_d) * gain_error) / gain_z : 0.5;
  return {gain_correct, gain_error, gain_z, qber_z, x, mu_prime};
}

RateBreakdown mdi_single_photon_rate(const SystemConfig& config) {
  config.validate();
  const double eta_a =
      channel_transmittance(config.geometry.distance_a_km, config.channel) *
      config.detector.efficiency;
  const double eta_b =
      channel_transmittance(config.geometry.distance_b_km, config.channel) *
      config.detector.efficiency;
  const auto pp = per_pulse_probabilities(config.channel, config.detector, config.source);
  const double e_d = xor_probability(config.channel.misalignment_a, config.channel.misalignment_b);

  const auto kernel = mdi_kernel(eta_a, eta_b, pp.p_dc, e_d);
  const double f = config.error_correction_inefficiency;
  const double per_pulse =
      kernel.y11 *
      (1.0 - binary_entropy(kernel.e11x) - f * binary_entropy(kernel.e11z));

  RateBreakdown out;
  out.kind = SourceKind::single_photon;
  out.heralding = Heralding::none;
  out.rate_per_pulse = per_pulse;
  out.rate_per_second = per_pulse * config.source.repetition_rate_hz();
  out.yield_y11_qm = kernel.y11;
  out.e11x_qm = kernel.e11x;
  out.e11z_qm = kernel.e11z;
  out.eta_load_a = eta_a;
  out.eta_load_b = eta_b;
  return out;
}

RateBreakdown mdi_decoy_rate(const SystemConfig& config) {
  config.validate();
  if (config.source.kind != SourceKind::decoy)
    throw std::invalid_argument("source.kind must be decoy for mdi_decoy_rate");
  const double eta_a =
      channel_transmittance(config.geometry.distance_a_km, config.channel) *
      config.detector.efficiency;
  const double eta_b =
      channel_transmittance(config.geometry.distance_b_km, config.channel) *
      config.detector.efficiency;
  const auto pp = per_pulse_probabilities(config.channel, config.detector, config.source);
  const double e_d = xor_probability(config.channel.misalignment_a, config.channel.misalignment_b);
  const double mu = config.source.mu, nu = config.source.nu;

  const auto kernel = mdi_kernel(eta_a, eta_b, pp.p_dc, e_d);
  const auto gain = mdi_decoy_gain(mu, nu, eta_a, eta_b, pp.p_dc, e_d);
  const double q11 = mu * nu * std::exp(-mu - nu) * kernel.y11;
  const double f = config.error_correction_inefficiency;
  const double per_pulse = q11 * (1.0 - binary_entropy(kernel.e11x)) -
                           f * gain.gain_z * binary_entropy(gain.qber_z);

  RateBreakdown out;
  out.kind = SourceKind::decoy;
  out.heralding = Heralding::none;
  out.rate_per_pulse = per_pulse;
  out.rate_per_second = per_pulse * config.source.repetition_rate_hz();
  out.gain_q11_qm = q11;
  out.gain_z = gain.gain_z;
  out.qber_z_total = gain.qber_z;
  out.e11x_qm = kernel.e11x;
  out.e11z_qm = kernel.e11z;
  out.eta_load_a = eta_a;
  out.eta_load_b = eta_b;
  return out;
}

}  // namespace mamdi
