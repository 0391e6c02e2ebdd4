#pragma once

#include "mamdi/params.hpp"

namespace mamdi {

// Efficient-BB84 rate with its constituent yields/gains. Misalignment from
// the two ends of the single one-way link adds: e_d = e_dA + e_dB. Rates are
// SIGNED (see RateBreakdown); clamped accessors are for display.
struct Bb84Breakdown {
  SourceKind kind = SourceKind::single_photon;
  double yield_or_gain_correct = 0.0;  // Y_C or Q_C
  double yield_or_gain_error = 0.0;    // Y_E or Q_E
  double yield_1 = 0.0;                // Y_1
  double gain_1 = 0.0;                 // Q_1 (decoy only)
  double gain_mu = 0.0;                // Q_mu (decoy only)
  double qber = 0.0;                   // e_1 (single photon) or E_mu (decoy)
  double qber_single_photon = 0.0;     // e_1 in both modes
  double rate_per_pulse = 0.0;
  double rate_per_second = 0.0;

  double clamped_rate_per_pulse() const { return rate_per_pulse > 0.0 ? rate_per_pulse : 0.0; }
  double clamped_rate_per_second() const { return rate_per_second > 0.0 ? rate_per_second : 0.0; }
};

// Single-photon source over the full A-to-B distance with one measuring end:
// eta = eta_ch(L_A + L_B) * eta_d.
Bb84Breakdown bb84_single_photon(const SystemConfig& config);

// Phase-randomized coherent source of intensity mu with infinitely many
// auxiliary decoy intensities.
Bb84Breakdown bb84_decoy(const SystemConfig& config);

}  // namespace mamdi
