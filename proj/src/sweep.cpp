#include "mamdi/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mamdi/bb84.hpp"
#include "mamdi/engine.hpp"
#include "mamdi/mdi.hpp"

namespace mamdi {

namespace {

std::string column_prefix(ProtocolChoice p) {
  std::string s = to_string(p);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

std::string format_km(double km) {
  std::ostringstream os;
  os << km;
  return os.str();
}

SystemConfig curve_config_at(const PresetCurve& curve, double distance_km) {
  return with_protocol(with_total_distance(curve.config, distance_km), curve.protocol);
}

bool is_memory_assisted(ProtocolChoice p) {
  return p == ProtocolChoice::ma_mdi_direct || p == ProtocolChoice::ma_mdi_indirect;
}

}  // namespace

std::string to_string(ProtocolChoice protocol) {
  switch (protocol) {
    case ProtocolChoice::bb84: return "bb84";
    case ProtocolChoice::mdi: return "mdi";
    case ProtocolChoice::ma_mdi_direct: return "ma-mdi-direct";
    case ProtocolChoice::ma_mdi_indirect: return "ma-mdi-indirect";
  }
  return "unknown";
}

ProtocolChoice protocol_choice_from_string(const std::string& name) {
  if (name == "bb84") return ProtocolChoice::bb84;
  if (name == "mdi") return ProtocolChoice::mdi;
  if (name == "ma-mdi-direct") return ProtocolChoice::ma_mdi_direct;
  if (name == "ma-mdi-indirect") return ProtocolChoice::ma_mdi_indirect;
  throw std::invalid_argument(
      "unknown protocol '" + name +
      "' (expected bb84, mdi, ma-mdi-direct, or ma-mdi-indirect)");
}

std::string to_string(CrossoverKind kind) {
  switch (kind) {
    case CrossoverKind::rate_crossover: return "rate_crossover";
    case CrossoverKind::storage_time_crossover: return "storage_time_crossover";
    case CrossoverKind::rate_cutoff: return "rate_cutoff";
  }
  return "unknown";
}

SystemConfig with_total_distance(SystemConfig config, double total_km) {
  if (!(total_km >= 0.0)) throw std::domain_error("total distance must be >= 0 km");
  const double current = config.geometry.total_km();
  const double fraction_a =
      current > 0.0 ? config.geometry.distance_a_km / current : 0.5;
  config.geometry.distance_a_km = fraction_a * total_km;
  config.geometry.distance_b_km = total_km - config.geometry.distance_a_km;
  return config;
}

SystemConfig with_protocol(SystemConfig config, ProtocolChoice protocol) {
  switch (protocol) {
    case ProtocolChoice::bb84:
    case ProtocolChoice::mdi:
      config.heralding = Heralding::none;
      break;
    case ProtocolChoice::ma_mdi_direct:
      config.heralding = Heralding::direct;
      break;
    case ProtocolChoice::ma_mdi_indirect:
      config.heralding = Heralding::indirect;
      break;
  }
  return config;
}

double protocol_rate_per_pulse(const SystemConfig& config, ProtocolChoice protocol) {
  const SystemConfig cfg = with_protocol(config, protocol);
  const bool single = cfg.source.kind == SourceKind::single_photon;
  switch (protocol) {
    case ProtocolChoice::bb84:
      return (single ? bb84_single_photon(cfg) : bb84_decoy(cfg)).rate_per_pulse;
    case ProtocolChoice::mdi:
      return (single ? mdi_single_photon_rate(cfg) : mdi_decoy_rate(cfg)).rate_per_pulse;
    default:
      return rate(cfg).rate_per_pulse;
  }
}

double protocol_rate_per_second(const SystemConfig& config, ProtocolChoice protocol) {
  return protocol_rate_per_pulse(config, protocol) * config.source.repetition_rate_hz();
}

SweepResult sweep(const SystemConfig& config, const std::vector<ProtocolChoice>& protocols,
                  const std::vector<double>& distances_km) {
  if (distances_km.empty()) throw std::invalid_argument("sweep requires a non-empty grid");
  if (protocols.empty()) throw std::invalid_argument("sweep requires at least one protocol");
  for (std::size_t i = 1; i < distances_km.size(); ++i)
    if (!(distances_km[i] > distances_km[i - 1]))
      throw std::invalid_argument("sweep distances must be strictly increasing");

  SweepResult result;
  result.columns.push_back("distance_km");
  for (ProtocolChoice p : protocols) {
    const std::string prefix = column_prefix(p);
    result.columns.push_back(prefix + "_rate_per_pulse");
    result.columns.push_back(prefix + "_rate_per_second");
    switch (p) {
      case ProtocolChoice::bb84:
        result.columns.push_back(prefix + "_qber");
        break;
      case ProtocolChoice::mdi:
        result.columns.push_back(prefix + "_e11x");
        result.columns.push_back(prefix + "_e11z");
        break;
      default:
        result.columns.push_back(prefix + "_e11x");
        result.columns.push_back(prefix + "_e11z");
        result.columns.push_back(prefix + "_yield_or_gain");
        result.columns.push_back(prefix + "_storage_time_s");
        break;
    }
  }

  for (double distance : distances_km) {
    std::vector<double> row;
    row.push_back(distance);
    try {
      const SystemConfig at_distance = with_total_distance(config, distance);
      for (ProtocolChoice p : protocols) {
        const SystemConfig cfg = with_protocol(at_distance, p);
        const bool single = cfg.source.kind == SourceKind::single_photon;
        switch (p) {
          case ProtocolChoice::bb84: {
            const Bb84Breakdown b = single ? bb84_single_photon(cfg) : bb84_decoy(cfg);
            row.insert(row.end(), {b.rate_per_pulse, b.rate_per_second, b.qber});
            break;
          }
          case ProtocolChoice::mdi: {
            const RateBreakdown b = single ? mdi_single_photon_rate(cfg) : mdi_decoy_rate(cfg);
            row.insert(row.end(),
                       {b.rate_per_pulse, b.rate_per_second, b.e11x_qm, b.e11z_qm});
            break;
          }
          default: {
            const RateBreakdown b = rate(cfg);
            const double yield_or_gain =
                b.kind == SourceKind::single_photon ? b.yield_y11_qm : b.gain_q11_qm;
            row.insert(row.end(), {b.rate_per_pulse, b.rate_per_second, b.e11x_qm,
                                   b.e11z_qm, yield_or_gain, b.storage_time_s});
            break;
          }
        }
      }
    } catch (const std::exception& e) {
      throw std::domain_error("sweep point at " + format_km(distance) + " km: " + e.what());
    }
    result.rows.push_back(std::move(row));
  }

  result.metadata["rate_convention"] = "signed";
  result.metadata["source_kind"] = to_string(config.source.kind);
  std::string names;
  for (ProtocolChoice p : protocols) {
    if (!names.empty()) names += ",";
    names += to_string(p);
  }
  result.metadata["protocols"] = names;
  return result;
}

CrossoverReport find_crossover(CrossoverKind kind,
                               const std::function<double(double)>& objective, double lo_km,
                               double hi_km, double tolerance_km) {
  if (!(tolerance_km > 0.0)) throw std::invalid_argument("crossover tolerance must be > 0");
  if (!(hi_km > lo_km)) throw std::invalid_argument("crossover bracket must satisfy lo < hi");

  CrossoverReport report;
  report.kind = kind;
  report.bracket_lo_km = lo_km;
  report.bracket_hi_km = hi_km;
  report.tolerance_km = tolerance_km;

  const double f_lo = objective(lo_km);
  const double f_hi = objective(hi_km);
  if (f_lo == 0.0) {
    report.location_km = lo_km;
    return report;
  }
  if (f_hi == 0.0) {
    report.location_km = hi_km;
    return report;
  }
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    std::ostringstream os;
    os << "objective has the same sign at both bracket endpoints: f(" << lo_km
       << ") = " << f_lo << ", f(" << hi_km << ") = " << f_hi;
    throw BracketError(os.str());
  }

  double a = lo_km, b = hi_km;
  const bool lo_positive = f_lo > 0.0;
  while (b - a > tolerance_km) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;  // interval narrower than representable
    ++report.iterations;
    const double f_mid = objective(mid);
    if (f_mid == 0.0) {
      a = b = mid;
      break;
    }
    if ((f_mid > 0.0) == lo_positive)
      a = mid;
    else
      b = mid;
  }
  report.location_km = 0.5 * (a + b);
  return report;
}

std::function<double(double)> rate_difference_objective(SystemConfig config,
                                                        ProtocolChoice lhs,
                                                        ProtocolChoice rhs) {
  return [config, lhs, rhs](double km) {
    const SystemConfig cfg = with_total_distance(config, km);
    return protocol_rate_per_second(cfg, lhs) - protocol_rate_per_second(cfg, rhs);
  };
}

std::function<double(double)> rate_cutoff_objective(SystemConfig config,
                                                    ProtocolChoice protocol) {
  return [config, protocol](double km) {
    return protocol_rate_per_second(with_total_distance(config, km), protocol);
  };
}

std::function<double(double)> storage_vs_transit_objective(SystemConfig config) {
  return [config](double km) {
    const SystemConfig cfg = with_total_distance(config, km);
    const double transit_s = km * 1000.0 / cfg.geometry.light_speed_m_per_s;
    return symmetric_summary(cfg).storage_time_s - transit_s;
  };
}

namespace {

std::vector<double> linear_grid(double start, double stop, double step) {
  std::vector<double> grid;
  for (double v = start; v <= stop + step * 1e-9; v += step) grid.push_back(v);
  return grid;
}

// Shared baseline of the published analyses: symmetric legs, writing time
// equal to the repetition period, standard fiber loss, f = 1.16.
SystemConfig analysis_base(double period_s) {
  SystemConfig c;
  c.source.repetition_period_s = period_s;
  c.source.pulse_width_s = period_s;
  c.memory.writing_time_s = period_s;
  c.error_correction_inefficiency = 1.16;
  return c;
}

SystemConfig detector_stack_base(double eta_r0, double t_decay_s) {
  SystemConfig c = analysis_base(300e-12);
  c.source.pulse_width_s = 300e-12;
  c.channel.misalignment_a = 0.005;
  c.channel.misalignment_b = 0.005;
  c.detector.efficiency = 0.93;
  c.detector.dark_rate_hz = 1.0;
  c.memory.entangling_efficiency = 0.05;
  c.memory.reading_efficiency_0 = eta_r0;
  c.memory.amplitude_decay_time_s = t_decay_s;
  c.memory.coherence_time_s = t_decay_s;
  c.memory.reading_time_s = 300e-12;
  c.heralding = Heralding::indirect;
  return c;
}

SystemConfig fig6_baseline_config() {
  SystemConfig c = detector_stack_base(1.0, kInfiniteTime);
  c.heralding = Heralding::none;
  c.memory = MemoryParams{};
  c.source.repetition_period_s = 1.0 / 3.3e9;
  c.source.pulse_width_s = 300e-12;
  return c;
}

FigurePreset make_fig3() {
  FigurePreset p;
  p.name = "fig3";
  p.kind = PresetKind::storage_time_curves;
  p.grid_km = linear_grid(0.0, 800.0, 10.0);
  const std::pair<const char*, double> taus[] = {
      {"tau_w_1ns", 1e-9}, {"tau_w_10ns", 1e-8}, {"tau_w_100ns", 1e-7}, {"tau_w_1us", 1e-6}};
  for (const auto& [label, tau] : taus) {
    SystemConfig c = analysis_base(tau);
    c.heralding = Heralding::direct;
    p.curves.push_back({label, ProtocolChoice::ma_mdi_direct, c});
  }
  return p;
}

FigurePreset make_fig4() {
  FigurePreset p;
  p.name = "fig4";
  p.kind = PresetKind::rate_curves;
  p.per_pulse = true;
  p.grid_km = linear_grid(0.0, 600.0, 5.0);
  const std::pair<const char*, double> ratios[] = {
      {"ma_t2_over_t_1e2", 1e2}, {"ma_t2_over_t_1e3", 1e3}, {"ma_t2_over_t_1e4", 1e4}};
  for (const auto& [label, ratio] : ratios) {
    SystemConfig c = analysis_base(1e-9);
    c.memory.coherence_time_s = ratio * c.source.repetition_period_s;
    c.heralding = Heralding::direct;
    p.curves.push_back({label, ProtocolChoice::ma_mdi_direct, c});
  }
  p.curves.push_back({"bb84", ProtocolChoice::bb84, analysis_base(1e-9)});
  return p;
}

FigurePreset make_fig5() {
  FigurePreset p;
  p.name = "fig5";
  p.kind = PresetKind::rate_curves;
  p.grid_km = linear_grid(0.0, 800.0, 10.0);
  const std::pair<const char*, double> taus[] = {{"ma_tau_w_1ns", 1e-9},
                                                 {"ma_tau_w_10ns", 1e-8},
                                                 {"ma_tau_w_100ns", 1e-7},
                                                 {"ma_tau_w_1us", 1e-6}};
  for (const auto& [label, tau] : taus) {
    SystemConfig c = analysis_base(tau);
    c.memory.coherence_time_s = 1000.0 * tau;
    c.heralding = Heralding::direct;
    p.curves.push_back({label, ProtocolChoice::ma_mdi_direct, c});
  }
  p.curves.push_back({"bb84", ProtocolChoice::bb84, analysis_base(1e-9)});
  return p;
}

FigurePreset make_fig6(const std::string& name, double eta_r0, double t_decay_s,
                       double stop_km) {
  FigurePreset p;
  p.name = name;
  p.kind = PresetKind::rate_curves;
  p.grid_km = linear_grid(0.0, stop_km, 10.0);
  p.curves.push_back({"ma_mdi", ProtocolChoice::ma_mdi_indirect,
                      detector_stack_base(eta_r0, t_decay_s)});
  p.curves.push_back({"bb84", ProtocolChoice::bb84, fig6_baseline_config()});
  p.curves.push_back({"mdi", ProtocolChoice::mdi, fig6_baseline_config()});
  return p;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5", "fig6a", "fig6b"}; }

FigurePreset figure_preset(const std::string& name) {
  if (name == "fig3") return make_fig3();
  if (name == "fig4") return make_fig4();
  if (name == "fig5") return make_fig5();
  if (name == "fig6a") return make_fig6("fig6a", 0.3, 4e-6, 600.0);
  if (name == "fig6b") return make_fig6("fig6b", 0.73, 100e-6, 800.0);
  throw std::invalid_argument("unknown preset '" + name +
                              "' (expected fig3, fig4, fig5, fig6a, or fig6b)");
}

SweepResult run_preset(const FigurePreset& preset) {
  SweepResult result;
  result.columns.push_back("distance_km");

  if (preset.kind == PresetKind::storage_time_curves) {
    result.columns.push_back("transit_time_s");
    for (const auto& curve : preset.curves)
      result.columns.push_back(curve.label + "_storage_time_s");
    for (double km : preset.grid_km) {
      std::vector<double> row{km};
      const double c_m_per_s = preset.curves.empty()
                                   ? LinkGeometry{}.light_speed_m_per_s
                                   : preset.curves.front().config.geometry.light_speed_m_per_s;
      row.push_back(km * 1000.0 / c_m_per_s);
      for (const auto& curve : preset.curves)
        row.push_back(symmetric_summary(curve_config_at(curve, km)).storage_time_s);
      result.rows.push_back(std::move(row));
    }
  } else {
    const std::string rate_suffix = preset.per_pulse ? "_rate_per_pulse" : "_rate_per_second";
    for (const auto& curve : preset.curves) {
      result.columns.push_back(curve.label + rate_suffix);
      if (is_memory_assisted(curve.protocol)) result.columns.push_back(curve.label + "_e11x");
    }
    for (double km : preset.grid_km) {
      std::vector<double> row{km};
      for (const auto& curve : preset.curves) {
        const SystemConfig cfg = curve_config_at(curve, km);
        const bool single = cfg.source.kind == SourceKind::single_photon;
        switch (curve.protocol) {
          case ProtocolChoice::bb84: {
            const Bb84Breakdown b = single ? bb84_single_photon(cfg) : bb84_decoy(cfg);
            row.push_back(preset.per_pulse ? b.clamped_rate_per_pulse()
                                           : b.clamped_rate_per_second());
            break;
          }
          case ProtocolChoice::mdi: {
            const RateBreakdown b = single ? mdi_single_photon_rate(cfg) : mdi_decoy_rate(cfg);
            row.push_back(preset.per_pulse ? b.clamped_rate_per_pulse()
                                           : b.clamped_rate_per_second());
            break;
          }
          default: {
            const RateBreakdown b = rate(cfg);
            row.push_back(preset.per_pulse ? b.clamped_rate_per_pulse()
                                           : b.clamped_rate_per_second());
            row.push_back(b.e11x_qm);
            break;
          }
        }
      }
      result.rows.push_back(std::move(row));
    }
  }

  result.metadata["preset"] = preset.name;
  result.metadata["rate_convention"] = "clamped";
  result.metadata["rate_units"] = preset.per_pulse ? "per_pulse" : "per_second";
  return result;
}

}  // namespace mamdi
