#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mamdi/params.hpp"

namespace mamdi {

enum class ProtocolChoice { bb84, mdi, ma_mdi_direct, ma_mdi_indirect };

std::string to_string(ProtocolChoice protocol);
ProtocolChoice protocol_choice_from_string(const std::string& name);

// Copy of the config with the total distance changed, keeping the ratio
// between the two legs (an all-zero geometry splits evenly).
SystemConfig with_total_distance(SystemConfig config, double total_km);

// Copy of the config with the heralding scheme the protocol implies.
SystemConfig with_protocol(SystemConfig config, ProtocolChoice protocol);

// Signed secret-key rate of one protocol on one config.
double protocol_rate_per_pulse(const SystemConfig& config, ProtocolChoice protocol);
double protocol_rate_per_second(const SystemConfig& config, ProtocolChoice protocol);

// Rectangular table of computed columns over a distance grid. All values are
// analytic (no sampling), so rows are bit-reproducible.
struct SweepResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> metadata;
};

// One row per distance; every protocol is evaluated on the identical config
// except for the distance and the heralding scheme it implies. Rates in the
// table are signed; error fractions and loading columns are appended for the
// protocols that have them.
SweepResult sweep(const SystemConfig& config, const std::vector<ProtocolChoice>& protocols,
                  const std::vector<double>& distances_km);

enum class CrossoverKind { rate_crossover, storage_time_crossover, rate_cutoff };
std::string to_string(CrossoverKind kind);

struct CrossoverReport {
  CrossoverKind kind = CrossoverKind::rate_crossover;
  double location_km = 0.0;
  double bracket_lo_km = 0.0;
  double bracket_hi_km = 0.0;
  double tolerance_km = 0.0;
  int iterations = 0;
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bisection on a signed objective of total distance. The objective must have
// opposite signs at the bracket endpoints (BracketError otherwise); the
// result interval is narrowed to the tolerance and its midpoint reported.
CrossoverReport find_crossover(CrossoverKind kind,
                               const std::function<double(double)>& objective, double lo_km,
                               double hi_km, double tolerance_km);

// Ready-made objectives for the crossovers the analyses need. All are signed
// functions of the total distance in km.
std::function<double(double)> rate_difference_objective(SystemConfig config,
                                                        ProtocolChoice lhs,
                                                        ProtocolChoice rhs);
std::function<double(double)> rate_cutoff_objective(SystemConfig config,
                                                    ProtocolChoice protocol);
// Mean waiting time of the first-loaded memory minus the signal transit time
// over the whole link; its root is where stored qubits outlive flying ones.
std::function<double(double)> storage_vs_transit_objective(SystemConfig config);

enum class PresetKind { rate_curves, storage_time_curves };

struct PresetCurve {
  std::string label;
  ProtocolChoice protocol = ProtocolChoice::ma_mdi_direct;
  SystemConfig config;
};

// A named, fully parameterized analysis: a grid plus one config per curve.
struct FigurePreset {
  std::string name;
  PresetKind kind = PresetKind::rate_curves;
  bool per_pulse = false;  // report rates per pulse instead of per second
  std::vector<double> grid_km;
  std::vector<PresetCurve> curves;
};

std::vector<std::string> preset_names();
FigurePreset figure_preset(const std::string& name);

// Evaluates a preset to a table: clamped rates (curves are meant for log
// plots), plus an X-basis error column for each memory-assisted curve and
// transit/storage-time columns for timing presets.
SweepResult run_preset(const FigurePreset& preset);

}  // namespace mamdi
