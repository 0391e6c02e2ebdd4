#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mamdi/mdi.hpp"
#include "mamdi/rng.hpp"
#include "oracles.hpp"

using namespace mamdi;

TEST_CASE("bessel i0 against frozen 50-digit references") {
  // Spans the power-series regime, the switch point, and the asymptotic tail.
  static const struct {
    double x, i0;
  } table[] = {
      {0.0, 1.0},
      {0.25, 1.01568614122360792},
      {0.5, 1.06348337074132352},
      {1.0, 1.26606587775200834},
      {2.0, 2.27958530233606727},
      {3.7, 8.73861752416939558},
      {5.0, 27.2398718236044469},
      {8.0, 427.564115721804785},
      {10.0, 2815.71662846625447},
      {15.0, 339649.37329791388},
      {20.0, 43558282.5595535333},
      {25.0, 5774560606.46631032},
      {29.5, 478144163888.039804},
      {30.0, 781672297823.97749},
      {30.5, 1278062138712.56647},
      {35.0, 107338818494514.064},
      {40.0, 14894774793419899.9},
      {45.0, 2.08341407517731482e+18},
      {50.0, 2.93255378384933633e+20},
  };
  for (const auto& row : table) {
    CHECK_MESSAGE(bessel_i0(row.x) == doctest::Approx(row.i0).epsilon(1e-12),
                  "x = " << row.x);
    CHECK(bessel_i0(-row.x) == bessel_i0(row.x));  // even function
  }
}

TEST_CASE("single-photon kernel closed-form landmarks") {
  // Lossless, noiseless: half of all pairs yield an accepted outcome.
  auto k = mdi_kernel(1.0, 1.0, 0.0, 0.0);
  CHECK(k.y11 == 0.5);
  CHECK(k.e11x == 0.0);
  CHECK(k.e11z == 0.0);

  // Without dark counts both error fractions equal the flip probability.
  k = mdi_kernel(0.37, 0.81, 0.0, 0.123);
  CHECK(k.y11 == doctest::Approx(0.5 * 0.37 * 0.81).epsilon(1e-15));
  CHECK(k.e11x == doctest::Approx(0.123).epsilon(1e-12));
  CHECK(k.e11z == doctest::Approx(0.123).epsilon(1e-12));

  // Dead link: yield zero, errors pinned to 1/2 to keep entropies defined.
  k = mdi_kernel(0.0, 0.5, 0.0, 0.1);
  CHECK(k.y11 == 0.0);
  CHECK(k.e11x == 0.5);
  CHECK(k.e11z == 0.5);

  // Symmetric in the two legs (up to evaluation-order rounding).
  const auto ab = mdi_kernel(0.2, 0.9, 0.01, 0.05);
  const auto ba = mdi_kernel(0.9, 0.2, 0.01, 0.05);
  CHECK(oracles::close(ab.y11, ba.y11, 1e-15));
  CHECK(oracles::close(ab.e11x, ba.e11x, 1e-15));
  CHECK(oracles::close(ab.e11z, ba.e11z, 1e-15));

  // Dark-count-assisted acceptances dilute the key basis harder: for any flip
  // probability below 1/2, e11z - e11x = (1/2 - e_d)(1-p_dc)^2 eta_a eta_b p_dc / y11.
  CHECK(ab.e11z >= ab.e11x);

  CHECK_THROWS_AS(mdi_kernel(1.2, 0.5, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(mdi_kernel(0.5, 0.5, -0.1, 0.0), std::domain_error);
}

TEST_CASE("kernel agrees with exhaustive click-pattern enumeration") {
  const double etas[] = {0.0, 0.15, 0.5, 0.83, 1.0};
  const double darks[] = {0.0, 0.02, 0.2};
  const double flips[] = {0.0, 0.11, 0.5};
  for (double ea : etas)
    for (double eb : etas)
      for (double pd : darks)
        for (double ed : flips) {
          const auto lib = mdi_kernel(ea, eb, pd, ed);
          const auto ref = oracles::enumerate_mdi_kernel(ea, eb, pd, ed);
          CAPTURE(ea);
          CAPTURE(eb);
          CAPTURE(pd);
          CAPTURE(ed);
          CHECK(oracles::close(lib.y11, ref.y11));
          CHECK(oracles::close(lib.e11x, ref.e11x));
          CHECK(oracles::close(lib.e11z, ref.e11z));
        }
}

TEST_CASE("decoy gain closed-form landmarks") {
  // Dark counts only (nothing arrives): both classes reduce to the same
  // two-dark-click probability, as the printed forms dictate.
  const double pd = 0.03;
  auto g = mdi_decoy_gain(0.5, 0.5, 0.0, 0.0, pd, 0.0);
  const double both_dark = 2.0 * pd * pd * (1.0 - pd) * (1.0 - pd);
  CHECK(g.gain_correct == doctest::Approx(both_dark).epsilon(1e-14));
  CHECK(g.gain_error == doctest::Approx(both_dark).epsilon(1e-14));
  CHECK(g.x_aux == 0.0);
  CHECK(g.mu_prime == 0.0);

  // Composition identities.
  g = mdi_decoy_gain(0.6, 0.4, 0.7, 0.2, 0.01, 0.05);
  CHECK(g.gain_z == doctest::Approx(g.gain_correct + g.gain_error).epsilon(1e-15));
  CHECK(g.qber_z * g.gain_z ==
        doctest::Approx(0.05 * g.gain_correct + 0.95 * g.gain_error).epsilon(1e-13));
  CHECK(g.x_aux == doctest::Approx(0.5 * std::sqrt(0.6 * 0.7 * 0.4 * 0.2)).epsilon(1e-15));
  CHECK(g.mu_prime == doctest::Approx(0.7 * 0.6 + 0.2 * 0.4).epsilon(1e-15));

  // No dark counts: only the interference-free class survives.
  g = mdi_decoy_gain(0.5, 0.5, 0.9, 0.9, 0.0, 0.0);
  CHECK(g.gain_error == 0.0);
  CHECK(g.qber_z == 0.0);

  CHECK_THROWS_AS(mdi_decoy_gain(0.0, 0.5, 1.0, 1.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(mdi_decoy_gain(0.5, 0.5, 1.5, 1.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("decoy gains agree with event-by-event interference sampling") {
  // Quick three-point spot check; the acceptance suite runs the full grid.
  struct Point {
    double mu, nu, ea, eb, pd, ed;
  } points[] = {
      {0.5, 0.5, 0.8, 0.8, 0.01, 0.0},
      {0.7, 0.3, 0.4, 0.9, 0.02, 0.1},
      {1.0, 0.6, 0.25, 0.5, 0.0, 0.25},
  };
  const std::uint64_t trials = 200000;
  std::uint64_t seed = 9001;
  for (const auto& p : points) {
    const auto mc = oracles::mdi_decoy_mc(p.mu, p.nu, p.ea, p.eb, p.pd, p.ed, trials, seed++);
    const auto cf = mdi_decoy_gain(p.mu, p.nu, p.ea, p.eb, p.pd, p.ed);
    CAPTURE(p.mu);
    CAPTURE(p.nu);
    CHECK_MESSAGE(oracles::within_sigma(cf.gain_z, mc.gain_z),
                  "gain_z " << cf.gain_z << " vs " << mc.gain_z.value << " +- "
                            << mc.gain_z.std_error);
    const double error_gain = p.ed * cf.gain_correct + (1.0 - p.ed) * cf.gain_error;
    CHECK_MESSAGE(oracles::within_sigma(error_gain, mc.error_gain),
                  "error gain " << error_gain << " vs " << mc.error_gain.value << " +- "
                                << mc.error_gain.std_error);
  }
}

TEST_CASE("no-memory single-photon rate at a lossless symmetric link") {
  SystemConfig cfg;
  const auto r = mdi_single_photon_rate(cfg);
  CHECK(r.yield_y11_qm == 0.5);
  CHECK(r.e11x_qm == 0.0);
  CHECK(r.rate_per_pulse == 0.5);
  CHECK(r.rate_per_second == doctest::Approx(0.5 / cfg.source.repetition_period_s));
  CHECK(r.heralding == Heralding::none);
}

TEST_CASE("no-memory decoy rate composes gain, scaling, and error correction") {
  SystemConfig cfg;
  cfg.source.kind = SourceKind::decoy;
  cfg.source.mu = 0.5;
  cfg.source.nu = 0.5;
  cfg.geometry.distance_a_km = 30.0;
  cfg.geometry.distance_b_km = 30.0;
  cfg.detector.efficiency = 0.9;
  cfg.detector.dark_rate_hz = 1e3;
  cfg.channel.misalignment_a = 0.01;
  cfg.channel.misalignment_b = 0.02;
  const auto r = mdi_decoy_rate(cfg);

  const double eta = 0.9 * channel_transmittance(30.0, cfg.channel);
  const double pd = 1e3 * cfg.source.pulse_width_s;
  const double ed = xor_probability(0.01, 0.02);
  const auto kernel = mdi_kernel(eta, eta, pd, ed);
  const auto gain = mdi_decoy_gain(0.5, 0.5, eta, eta, pd, ed);
  const double q11 = 0.25 * std::exp(-1.0) * kernel.y11;
  const double expected = q11 * (1.0 - binary_entropy(kernel.e11x)) -
                          1.16 * gain.gain_z * binary_entropy(gain.qber_z);
  CHECK(r.gain_q11_qm == doctest::Approx(q11).epsilon(1e-15));
  CHECK(r.gain_z == doctest::Approx(gain.gain_z).epsilon(1e-15));
  CHECK(r.qber_z_total == doctest::Approx(gain.qber_z).epsilon(1e-15));
  CHECK(r.rate_per_pulse == doctest::Approx(expected).epsilon(1e-15));

  cfg.source.kind = SourceKind::single_photon;
  CHECK_THROWS_AS(mdi_decoy_rate(cfg), std::invalid_argument);
}

TEST_CASE("xor composition of two flips") {
  CHECK(xor_probability(0.0, 0.0) == 0.0);
  CHECK(xor_probability(1.0, 1.0) == 0.0);  // both flipped still agree
  CHECK(xor_probability(0.5, 0.3) == 0.5);
  CHECK(xor_probability(0.01, 0.02) == doctest::Approx(0.01 * 0.98 + 0.02 * 0.99));
}
