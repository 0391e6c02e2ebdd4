#pragma once

#include "mamdi/params.hpp"

namespace mamdi {

// Probability that a herald captured a background photon rather than the
// signal, conditioned on the memory having loaded with probability eta_k.
double background_flip_prob(double eta_k, double eta_w, double p_bg);

// Key-basis flip probability of one directly heralded memory: the setup flip
// on the signal, or a coin flip if the stored photon is background.
double misalignment_z_direct(double e_dk, double e_bg);

// Key-basis flip probability of one indirectly heralded memory: the residual
// error probability of its side measurement, evaluated at the effective
// per-pulse dark count (gamma_dc + gamma_BG * eta_d / 2) * tau_p.
double misalignment_z_indirect(const SystemConfig& config, Leg leg);

// Effective flip probabilities of the loaded memory pair. The *_a/_b fields
// are per-memory; the *_pair fields compose the two legs as an exclusive-or
// (both flipped still agree). mean_e_dx_* average the early memory's
// dephasing over the loading statistics; the product term uses the fact that
// at most one memory is ever early.
struct PairMisalignment {
  double e_dz_a = 0.0;
  double e_dz_b = 0.0;
  double mean_e_dx_a = 0.0;
  double mean_e_dx_b = 0.0;
  double mean_e_dx_product = 0.0;
  double e_dz_pair = 0.0;
  double mean_e_dx_pair = 0.0;
  double beta_a = 0.0;  // dephasing-to-X-error conversion weight, leg A
  double beta_b = 0.0;
};

// eta_a/eta_b are the per-round loading probabilities in effect (single
// photon or decoy). Heralding mode and noise parameters come from config.
PairMisalignment pair_misalignment(const SystemConfig& config, double eta_a, double eta_b);

// Same composition for externally supplied per-leg key-basis flip
// probabilities (used by decoy compositions that derive e_dz differently).
// delta_t2 = repetition period over coherence time.
PairMisalignment pair_misalignment_from_legs(double e_dz_a, double e_dz_b,
                                             double eta_a, double eta_b,
                                             double delta_t2);

}  // namespace mamdi
