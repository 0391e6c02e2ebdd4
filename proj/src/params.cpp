#include "mamdi/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mamdi {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void require_probability(double v, const std::string& field) {
  require(v >= 0.0 && v <= 1.0, field + " must lie in [0, 1] (got " + num(v) + ")");
}

void require_nonnegative(double v, const std::string& field) {
  require(v >= 0.0 && !std::isnan(v), field + " must be >= 0 (got " + num(v) + ")");
}

}  // namespace

std::string to_string(Heralding h) {
  switch (h) {
    case Heralding::direct: return "direct";
    case Heralding::indirect: return "indirect";
    case Heralding::none: return "none";
  }
  return "none";
}

std::string to_string(SourceKind k) {
  return k == SourceKind::single_photon ? "single_photon" : "decoy";
}

double attenuation_length_from_loss(double loss_db_per_km) {
  if (!(loss_db_per_km > 0.0))
    throw std::invalid_argument("channel.loss_db_per_km must be > 0 (got " +
                                num(loss_db_per_km) + ")");
  return 10.0 / (std::numbers::ln10 * loss_db_per_km);
}

void SystemConfig::validate() const {
  require(channel.attenuation_length_km > 0.0,
          "channel.attenuation_length_km must be > 0 (got " + num(channel.attenuation_length_km) + ")");
  require_nonnegative(channel.background_rate_hz, "channel.background_rate_hz");
  require(channel.misalignment_a >= 0.0 && channel.misalignment_a <= 0.5,
          "channel.misalignment_a must lie in [0, 0.5] (got " + num(channel.misalignment_a) + ")");
  require(channel.misalignment_b >= 0.0 && channel.misalignment_b <= 0.5,
          "channel.misalignment_b must lie in [0, 0.5] (got " + num(channel.misalignment_b) + ")");

  require_probability(detector.efficiency, "detector.efficiency");
  require_nonnegative(detector.dark_rate_hz, "detector.dark_rate_hz");

  require_probability(memory.writing_efficiency, "memory.writing_efficiency");
  require_probability(memory.entangling_efficiency, "memory.entangling_efficiency");
  require_probability(memory.reading_efficiency_0, "memory.reading_efficiency_0");
  require(memory.amplitude_decay_time_s > 0.0,
          "memory.amplitude_decay_time_s must be > 0 or infinite (got " +
              num(memory.amplitude_decay_time_s) + ")");
  require(memory.coherence_time_s > 0.0,
          "memory.coherence_time_s must be > 0 or infinite (got " + num(memory.coherence_time_s) + ")");
  require_nonnegative(memory.writing_time_s, "memory.writing_time_s");
  require_nonnegative(memory.reading_time_s, "memory.reading_time_s");

  require(source.repetition_period_s > 0.0,
          "source.repetition_period_s must be > 0 (got " + num(source.repetition_period_s) + ")");
  require(source.pulse_width_s > 0.0 && source.pulse_width_s <= source.repetition_period_s,
          "source.pulse_width_s must lie in (0, repetition_period_s] (got " +
              num(source.pulse_width_s) + ")");
  if (source.kind == SourceKind::decoy) {
    require(source.mu > 0.0, "source.mu must be > 0 for decoy sources (got " + num(source.mu) + ")");
    require(source.nu > 0.0, "source.nu must be > 0 for decoy sources (got " + num(source.nu) + ")");
  }

  require_nonnegative(geometry.distance_a_km, "geometry.distance_a_km");
  require_nonnegative(geometry.distance_b_km, "geometry.distance_b_km");
  require(geometry.light_speed_m_per_s > 0.0,
          "geometry.light_speed_m_per_s must be > 0 (got " + num(geometry.light_speed_m_per_s) + ")");

  require(error_correction_inefficiency >= 1.0,
          "protocol.error_correction_inefficiency must be >= 1 (got " +
              num(error_correction_inefficiency) + ")");
  if (heralding != Heralding::none) {
    require(memory.writing_time_s <= source.repetition_period_s,
            "memory.writing_time_s must not exceed source.repetition_period_s: sending photons "
            "faster than they can be stored is of no benefit (got " +
                num(memory.writing_time_s) + " > " + num(source.repetition_period_s) + ")");
  }
}

double channel_transmittance(double length_km, const ChannelParams& channel) {
  if (!(length_km >= 0.0)) throw std::domain_error("channel length must be >= 0 km");
  return std::exp(-length_km / channel.attenuation_length_km);
}

PerPulseProbabilities per_pulse_probabilities(const ChannelParams& channel,
                                              const DetectorParams& detector,
                                              const SourceParams& source) {
  return {2.0 * channel.background_rate_hz * source.pulse_width_s,
          detector.dark_rate_hz * source.pulse_width_s};
}

double reading_efficiency_at(const MemoryParams& memory, double hold_time_s) {
  if (!(hold_time_s >= 0.0)) throw std::domain_error("hold time must be >= 0 s");
  if (std::isinf(memory.amplitude_decay_time_s)) return memory.reading_efficiency_0;
  return memory.reading_efficiency_0 * std::exp(-hold_time_s / memory.amplitude_decay_time_s);
}

double dephasing_weight(const MemoryParams& memory, double hold_time_s) {
  if (!(hold_time_s >= 0.0)) throw std::domain_error("hold time must be >= 0 s");
  if (std::isinf(memory.coherence_time_s)) return 1.0;
  return 0.5 * (1.0 + std::exp(-hold_time_s / memory.coherence_time_s));
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("binary_entropy: argument must lie in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace mamdi
