#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "mamdi/params.hpp"

using namespace mamdi;

namespace {

std::string message_of(const SystemConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("default configuration is valid") {
  SystemConfig cfg;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("attenuation length from a dB/km loss figure") {
  // 10 / (ln 10 * 0.2), frozen from a 50-digit evaluation.
  CHECK(attenuation_length_from_loss(0.2) ==
        doctest::Approx(21.7147240951625914).epsilon(1e-15));
  CHECK_THROWS_AS(attenuation_length_from_loss(0.0), std::invalid_argument);
  CHECK_THROWS_AS(attenuation_length_from_loss(-1.0), std::invalid_argument);
}

TEST_CASE("channel transmittance is exponential in distance") {
  ChannelParams ch;  // default 0.2 dB/km
  // 125 km at 0.2 dB/km is exactly 25 dB: transmittance 10^-2.5.
  CHECK(channel_transmittance(125.0, ch) ==
        doctest::Approx(3.1622776601683794e-3).epsilon(1e-14));
  CHECK(channel_transmittance(0.0, ch) == 1.0);
  CHECK_THROWS_AS(channel_transmittance(-1.0, ch), std::domain_error);
}

TEST_CASE("validation messages name the offending field and bound") {
  SystemConfig cfg;

  cfg.detector.efficiency = 1.2;
  auto msg = message_of(cfg);
  CHECK(msg.find("detector.efficiency") != std::string::npos);
  CHECK(msg.find("[0, 1]") != std::string::npos);

  cfg = SystemConfig{};
  cfg.channel.misalignment_a = 0.6;
  msg = message_of(cfg);
  CHECK(msg.find("channel.misalignment_a") != std::string::npos);
  CHECK(msg.find("0.5") != std::string::npos);

  cfg = SystemConfig{};
  cfg.memory.writing_efficiency = -0.1;
  CHECK(message_of(cfg).find("memory.writing_efficiency") != std::string::npos);

  // Intensities only matter for coherent-pulse sources.
  cfg = SystemConfig{};
  cfg.source.mu = -0.5;
  CHECK(message_of(cfg).empty());
  cfg.source.kind = SourceKind::decoy;
  CHECK(message_of(cfg).find("source.mu") != std::string::npos);

  cfg = SystemConfig{};
  cfg.geometry.distance_a_km = -3.0;
  CHECK(message_of(cfg).find("geometry.distance_a_km") != std::string::npos);

  cfg = SystemConfig{};
  cfg.source.repetition_period_s = 0.0;
  CHECK(message_of(cfg).find("source.repetition_period_s") != std::string::npos);

  cfg = SystemConfig{};
  cfg.source.pulse_width_s = 2e-9;  // exceeds the 1 ns repetition period
  CHECK(message_of(cfg).find("source.pulse_width_s") != std::string::npos);

  cfg = SystemConfig{};
  cfg.error_correction_inefficiency = 0.5;  // below the Shannon limit
  CHECK(message_of(cfg).find("error_correction_inefficiency") != std::string::npos);
}

TEST_CASE("a heralding link must not outpace its memories") {
  SystemConfig cfg;
  cfg.heralding = Heralding::direct;
  cfg.memory.writing_time_s = 2e-9;  // longer than the 1 ns repetition period
  auto msg = message_of(cfg);
  CHECK(msg.find("memory.writing_time_s") != std::string::npos);
  // Without a memory in the link the same timing is fine.
  cfg.heralding = Heralding::none;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("per-pulse probabilities scale with the pulse width") {
  ChannelParams ch;
  ch.background_rate_hz = 5e5;
  DetectorParams det;
  det.dark_rate_hz = 1e3;
  SourceParams src;
  src.pulse_width_s = 300e-12;
  const auto pp = per_pulse_probabilities(ch, det, src);
  CHECK(pp.p_bg == doctest::Approx(2.0 * 5e5 * 300e-12).epsilon(1e-15));
  CHECK(pp.p_dc == doctest::Approx(1e3 * 300e-12).epsilon(1e-15));
}

TEST_CASE("memory decay laws") {
  MemoryParams mem;
  mem.reading_efficiency_0 = 0.8;
  mem.amplitude_decay_time_s = 1e-6;
  mem.coherence_time_s = 1e-6;
  CHECK(reading_efficiency_at(mem, 0.0) == 0.8);
  CHECK(reading_efficiency_at(mem, 1e-6) == doctest::Approx(0.8 * std::exp(-1.0)).epsilon(1e-15));
  // (1 + e^-1)/2, frozen from a 50-digit evaluation.
  CHECK(dephasing_weight(mem, 1e-6) == doctest::Approx(0.683939720585721161).epsilon(1e-15));

  mem.amplitude_decay_time_s = kInfiniteTime;
  mem.coherence_time_s = kInfiniteTime;
  CHECK(reading_efficiency_at(mem, 123.0) == 0.8);
  CHECK(dephasing_weight(mem, 123.0) == 1.0);
}

TEST_CASE("binary entropy reference points") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == 1.0);
  // Frozen from 50-digit evaluations.
  CHECK(binary_entropy(0.11) == doctest::Approx(0.499915958164527996).epsilon(1e-15));
  CHECK(binary_entropy(0.01) == doctest::Approx(0.0807931358959111728).epsilon(1e-15));
  CHECK(binary_entropy(1.0 / 3.0) == doctest::Approx(0.918295834054489515).epsilon(1e-15));
  CHECK(binary_entropy(0.3) == binary_entropy(0.7));
  CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("enum names round-trip to strings") {
  CHECK(to_string(Heralding::direct) == "direct");
  CHECK(to_string(Heralding::indirect) == "indirect");
  CHECK(to_string(Heralding::none) == "none");
  CHECK(to_string(SourceKind::single_photon) == "single_photon");
  CHECK(to_string(SourceKind::decoy) == "decoy");
}
