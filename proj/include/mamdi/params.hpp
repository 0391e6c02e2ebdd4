#pragma once

#include <limits>
#include <string>

namespace mamdi {

// Sentinel for "no decay": exp(-t/inf) evaluates exactly to 1.
inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

enum class Heralding { direct, indirect, none };
enum class SourceKind { single_photon, decoy };
enum class Leg { a, b };
enum class Basis { x, z };

std::string to_string(Heralding h);
std::string to_string(SourceKind k);

// Fibre model: transmittance exp(-L/L_att), plus stray light and per-end
// polarization misalignment probabilities.
struct ChannelParams {
  double attenuation_length_km = 21.714724095162588;  // 0.2 dB/km fibre
  double background_rate_hz = 0.0;                    // stray photons per polarization mode
  double misalignment_a = 0.0;
  double misalignment_b = 0.0;

  bool operator==(const ChannelParams&) const = default;
};

// Converts a dB/km loss figure to the equivalent attenuation length.
double attenuation_length_from_loss(double loss_db_per_km);

struct DetectorParams {
  double efficiency = 1.0;
  double dark_rate_hz = 0.0;

  bool operator==(const DetectorParams&) const = default;
};

struct MemoryParams {
  double writing_efficiency = 1.0;
  double entangling_efficiency = 1.0;
  double reading_efficiency_0 = 1.0;
  double amplitude_decay_time_s = kInfiniteTime;  // retrieval amplitude decay constant
  double coherence_time_s = kInfiniteTime;        // dephasing time constant
  double writing_time_s = 1e-9;
  double reading_time_s = 0.0;

  bool operator==(const MemoryParams&) const = default;
};

struct SourceParams {
  SourceKind kind = SourceKind::single_photon;
  double mu = 0.5;  // signal intensity, leg A
  double nu = 0.5;  // signal intensity, leg B
  double pulse_width_s = 1e-9;
  double repetition_period_s = 1e-9;
  double repetition_rate_hz() const { return 1.0 / repetition_period_s; }

  bool operator==(const SourceParams&) const = default;
};

struct LinkGeometry {
  double distance_a_km = 0.0;
  double distance_b_km = 0.0;
  double light_speed_m_per_s = 2e8;  // speed of light in fibre
  double total_km() const { return distance_a_km + distance_b_km; }

  bool operator==(const LinkGeometry&) const = default;
};

struct SystemConfig {
  ChannelParams channel;
  DetectorParams detector;
  MemoryParams memory;
  SourceParams source;
  LinkGeometry geometry;
  double error_correction_inefficiency = 1.16;
  Heralding heralding = Heralding::none;

  // Throws std::invalid_argument naming the offending field and bound.
  // Every public operation validates its config before computing.
  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

// exp(-length/L_att); negative lengths are rejected.
double channel_transmittance(double length_km, const ChannelParams& channel);

struct PerPulseProbabilities {
  double p_bg;  // mean background photons per pulse (both polarization modes)
  double p_dc;  // dark count probability per detector per pulse
};
PerPulseProbabilities per_pulse_probabilities(const ChannelParams& channel,
                                              const DetectorParams& detector,
                                              const SourceParams& source);

// Retrieval efficiency after holding a state for hold_time_s.
double reading_efficiency_at(const MemoryParams& memory, double hold_time_s);

// Probability that a held state has NOT dephased: (1 + exp(-t/T2))/2.
double dephasing_weight(const MemoryParams& memory, double hold_time_s);

// Shannon binary entropy in bits, continuous at 0 and 1.
double binary_entropy(double p);

}  // namespace mamdi
