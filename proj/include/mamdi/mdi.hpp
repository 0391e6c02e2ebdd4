#pragma once

#include "mamdi/params.hpp"

namespace mamdi {

// Modified Bessel function of the first kind, order zero. Power series below
// the switch point (all terms positive, no cancellation), asymptotic
// expansion above it; relative error <= 1e-12 on [0, 700].
double bessel_i0(double x);

// Yield and per-basis error probabilities of the two-input partial Bell-state
// measurement for single-photon inputs with per-leg transmittances eta_a,
// eta_b, per-detector dark count probability p_dc, and a combined flip
// probability e_d. When y11 is zero the error probabilities are reported as
// 1/2 so downstream entropy terms stay defined.
struct MdiKernel {
  double y11;
  double e11x;
  double e11z;
};
MdiKernel mdi_kernel(double eta_a, double eta_b, double p_dc, double e_d);

// Key-basis gain of the same measurement for phase-randomized coherent inputs
// with intensities mu, nu. gain_correct/gain_error split the gain into the
// interference-free two-click class and the bunched/dark class.
struct MdiDecoyGain {
  double gain_correct;  // Q'_C
  double gain_error;    // Q'_E
  double gain_z;        // Q'_C + Q'_E
  double qber_z;        // (e_d Q'_C + (1-e_d) Q'_E) / gain_z
  double x_aux;         // sqrt(eta_a mu eta_b nu)/2
  double mu_prime;      // eta_a mu + eta_b nu
};
MdiDecoyGain mdi_decoy_gain(double mu, double nu, double eta_a, double eta_b,
                            double p_dc, double e_d);

// One computed secret-key rate with its audit trail. rate_per_pulse and
// rate_per_second are SIGNED: negative values mean error correction dominates
// and are needed for cut-off finding; clamped accessors are for display.
// yield_y11_qm applies to single-photon sources, gain_q11_qm / gain_z /
// qber_z_total to decoy sources. The loading fields are zero for the
// no-memory baseline.
struct RateBreakdown {
  SourceKind kind = SourceKind::single_photon;
  Heralding heralding = Heralding::none;
  double rate_per_pulse = 0.0;
  double rate_per_second = 0.0;
  double yield_y11_qm = 0.0;
  double gain_q11_qm = 0.0;
  double gain_z = 0.0;
  double qber_z_total = 0.0;
  double e11x_qm = 0.0;
  double e11z_qm = 0.0;
  double n_load = 0.0;
  int n_read = 0;
  double eta_m = 0.0;
  double eta_m_prime = 0.0;
  double eta_load_a = 0.0;
  double eta_load_b = 0.0;
  double storage_time_s = 0.0;
  bool extension_composition = false;  // composed beyond the closed-form template

  double clamped_rate_per_pulse() const { return rate_per_pulse > 0.0 ? rate_per_pulse : 0.0; }
  double clamped_rate_per_second() const { return rate_per_second > 0.0 ? rate_per_second : 0.0; }
};

// No-memory two-leg rates; both legs terminate on the middle measurement.
// Misalignment composes across legs as an exclusive-or of the two flips.
RateBreakdown mdi_single_photon_rate(const SystemConfig& config);
RateBreakdown mdi_decoy_rate(const SystemConfig& config);

// Composite flip probability of two independent flips.
inline double xor_probability(double p, double q) { return p * (1.0 - q) + q * (1.0 - p); }

}  // namespace mamdi
