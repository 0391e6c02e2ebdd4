#include "mamdi/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace mamdi {

namespace {

using nlohmann::json;

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number())
    throw std::invalid_argument("config field " + path + " must be a number");
  return v.get<double>();
}

double require_time(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInfiniteTime;
    throw std::invalid_argument("config field " + path +
                                " must be a number or \"inf\" (got \"" + s + "\")");
  }
  return require_number(v, path);
}

std::string require_string(const json& v, const std::string& path) {
  if (!v.is_string())
    throw std::invalid_argument("config field " + path + " must be a string");
  return v.get<std::string>();
}

void parse_channel(const json& body, ChannelParams& channel) {
  bool saw_loss = false, saw_attenuation = false;
  for (const auto& [key, value] : body.items()) {
    if (key == "loss_db_per_km") {
      saw_loss = true;
      channel.attenuation_length_km =
          attenuation_length_from_loss(require_number(value, "channel.loss_db_per_km"));
    } else if (key == "attenuation_length_km") {
      saw_attenuation = true;
      channel.attenuation_length_km = require_number(value, "channel.attenuation_length_km");
    } else if (key == "background_rate_hz") {
      channel.background_rate_hz = require_number(value, "channel.background_rate_hz");
    } else if (key == "misalignment_a") {
      channel.misalignment_a = require_number(value, "channel.misalignment_a");
    } else if (key == "misalignment_b") {
      channel.misalignment_b = require_number(value, "channel.misalignment_b");
    } else {
      throw std::invalid_argument("unknown config key 'channel." + key + "'");
    }
  }
  if (saw_loss && saw_attenuation)
    throw std::invalid_argument(
        "channel.loss_db_per_km and channel.attenuation_length_km are mutually exclusive");
}

void parse_detector(const json& body, DetectorParams& detector) {
  for (const auto& [key, value] : body.items()) {
    if (key == "efficiency")
      detector.efficiency = require_number(value, "detector.efficiency");
    else if (key == "dark_rate_hz")
      detector.dark_rate_hz = require_number(value, "detector.dark_rate_hz");
    else
      throw std::invalid_argument("unknown config key 'detector." + key + "'");
  }
}

void parse_memory(const json& body, MemoryParams& memory) {
  for (const auto& [key, value] : body.items()) {
    if (key == "writing_efficiency")
      memory.writing_efficiency = require_number(value, "memory.writing_efficiency");
    else if (key == "entangling_efficiency")
      memory.entangling_efficiency = require_number(value, "memory.entangling_efficiency");
    else if (key == "reading_efficiency_0")
      memory.reading_efficiency_0 = require_number(value, "memory.reading_efficiency_0");
    else if (key == "amplitude_decay_time_s")
      memory.amplitude_decay_time_s = require_time(value, "memory.amplitude_decay_time_s");
    else if (key == "coherence_time_s")
      memory.coherence_time_s = require_time(value, "memory.coherence_time_s");
    else if (key == "writing_time_s")
      memory.writing_time_s = require_number(value, "memory.writing_time_s");
    else if (key == "reading_time_s")
      memory.reading_time_s = require_number(value, "memory.reading_time_s");
    else
      throw std::invalid_argument("unknown config key 'memory." + key + "'");
  }
}

void parse_source(const json& body, SourceParams& source) {
  for (const auto& [key, value] : body.items()) {
    if (key == "kind") {
      const std::string kind = require_string(value, "source.kind");
      if (kind == "single_photon" || kind == "single")
        source.kind = SourceKind::single_photon;
      else if (kind == "decoy")
        source.kind = SourceKind::decoy;
      else
        throw std::invalid_argument(
            "config field source.kind must be 'single_photon' or 'decoy' (got '" + kind +
            "')");
    } else if (key == "mu") {
      source.mu = require_number(value, "source.mu");
    } else if (key == "nu") {
      source.nu = require_number(value, "source.nu");
    } else if (key == "pulse_width_s") {
      source.pulse_width_s = require_number(value, "source.pulse_width_s");
    } else if (key == "repetition_period_s") {
      source.repetition_period_s = require_number(value, "source.repetition_period_s");
    } else {
      throw std::invalid_argument("unknown config key 'source." + key + "'");
    }
  }
}

void parse_geometry(const json& body, LinkGeometry& geometry) {
  for (const auto& [key, value] : body.items()) {
    if (key == "distance_a_km")
      geometry.distance_a_km = require_number(value, "geometry.distance_a_km");
    else if (key == "distance_b_km")
      geometry.distance_b_km = require_number(value, "geometry.distance_b_km");
    else if (key == "light_speed_m_per_s")
      geometry.light_speed_m_per_s = require_number(value, "geometry.light_speed_m_per_s");
    else
      throw std::invalid_argument("unknown config key 'geometry." + key + "'");
  }
}

void parse_protocol(const json& body, SystemConfig& config) {
  for (const auto& [key, value] : body.items()) {
    if (key == "heralding") {
      const std::string h = require_string(value, "protocol.heralding");
      if (h == "direct")
        config.heralding = Heralding::direct;
      else if (h == "indirect")
        config.heralding = Heralding::indirect;
      else if (h == "none")
        config.heralding = Heralding::none;
      else
        throw std::invalid_argument(
            "config field protocol.heralding must be 'direct', 'indirect', or 'none' (got '" +
            h + "')");
    } else if (key == "error_correction_inefficiency") {
      config.error_correction_inefficiency =
          require_number(value, "protocol.error_correction_inefficiency");
    } else {
      throw std::invalid_argument("unknown config key 'protocol." + key + "'");
    }
  }
}

json time_json(double seconds) {
  if (std::isinf(seconds)) return json("inf");
  return json(seconds);
}

}  // namespace

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + name + "' (expected csv or json)");
}

SystemConfig parse_config(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object())
    throw std::invalid_argument("config document must be a JSON object");

  SystemConfig config;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object())
      throw std::invalid_argument("config section '" + section + "' must be an object");
    if (section == "channel")
      parse_channel(body, config.channel);
    else if (section == "detector")
      parse_detector(body, config.detector);
    else if (section == "memory")
      parse_memory(body, config.memory);
    else if (section == "source")
      parse_source(body, config.source);
    else if (section == "geometry")
      parse_geometry(body, config.geometry);
    else if (section == "protocol")
      parse_protocol(body, config);
    else
      throw std::invalid_argument("unknown config section '" + section + "'");
  }
  config.validate();
  return config;
}

std::string emit_config(const SystemConfig& c) {
  json j;
  j["channel"] = {{"attenuation_length_km", c.channel.attenuation_length_km},
                  {"background_rate_hz", c.channel.background_rate_hz},
                  {"misalignment_a", c.channel.misalignment_a},
                  {"misalignment_b", c.channel.misalignment_b}};
  j["detector"] = {{"efficiency", c.detector.efficiency},
                   {"dark_rate_hz", c.detector.dark_rate_hz}};
  j["memory"] = {{"writing_efficiency", c.memory.writing_efficiency},
                 {"entangling_efficiency", c.memory.entangling_efficiency},
                 {"reading_efficiency_0", c.memory.reading_efficiency_0},
                 {"amplitude_decay_time_s", time_json(c.memory.amplitude_decay_time_s)},
                 {"coherence_time_s", time_json(c.memory.coherence_time_s)},
                 {"writing_time_s", c.memory.writing_time_s},
                 {"reading_time_s", c.memory.reading_time_s}};
  j["source"] = {{"kind", to_string(c.source.kind)},
                 {"mu", c.source.mu},
                 {"nu", c.source.nu},
                 {"pulse_width_s", c.source.pulse_width_s},
                 {"repetition_period_s", c.source.repetition_period_s}};
  j["geometry"] = {{"distance_a_km", c.geometry.distance_a_km},
                   {"distance_b_km", c.geometry.distance_b_km},
                   {"light_speed_m_per_s", c.geometry.light_speed_m_per_s}};
  j["protocol"] = {{"heralding", to_string(c.heralding)},
                   {"error_correction_inefficiency", c.error_correction_inefficiency}};
  return j.dump(2) + "\n";
}

std::string emit(const SweepResult& result, OutputFormat format) {
  if (format == OutputFormat::csv) {
    std::string out;
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
      if (i) out += ",";
      out += result.columns[i];
    }
    out += "\n";
    for (const auto& row : result.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ",";
        out += csv_number(row[i]);
      }
      out += "\n";
    }
    return out;
  }
  json j;
  j["columns"] = result.columns;
  j["metadata"] = result.metadata;
  j["rows"] = result.rows;
  return j.dump(2) + "\n";
}

namespace {

json to_json(const RateBreakdown& b) {
  return {{"kind", to_string(b.kind)},
          {"heralding", to_string(b.heralding)},
          {"rate_per_pulse", b.rate_per_pulse},
          {"rate_per_second", b.rate_per_second},
          {"yield_y11_qm", b.yield_y11_qm},
          {"gain_q11_qm", b.gain_q11_qm},
          {"gain_z", b.gain_z},
          {"qber_z_total", b.qber_z_total},
          {"e11x_qm", b.e11x_qm},
          {"e11z_qm", b.e11z_qm},
          {"n_load", b.n_load},
          {"n_read", b.n_read},
          {"eta_m", b.eta_m},
          {"eta_m_prime", b.eta_m_prime},
          {"eta_load_a", b.eta_load_a},
          {"eta_load_b", b.eta_load_b},
          {"storage_time_s", b.storage_time_s},
          {"extension_composition", b.extension_composition}};
}

json to_json(const Bb84Breakdown& b) {
  return {{"kind", to_string(b.kind)},
          {"yield_or_gain_correct", b.yield_or_gain_correct},
          {"yield_or_gain_error", b.yield_or_gain_error},
          {"yield_1", b.yield_1},
          {"gain_1", b.gain_1},
          {"gain_mu", b.gain_mu},
          {"qber", b.qber},
          {"qber_single_photon", b.qber_single_photon},
          {"rate_per_pulse", b.rate_per_pulse},
          {"rate_per_second", b.rate_per_second}};
}

json to_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

json to_json(const EmpiricalEstimates& e) {
  return {{"y11_qm", to_json(e.y11_qm)},
          {"e11x", to_json(e.e11x)},
          {"e11z", to_json(e.e11z)},
          {"n_load", to_json(e.n_load)},
          {"storage_time_s", to_json(e.storage_time)},
          {"trials", e.trials},
          {"successes_z", e.successes_z},
          {"successes_x", e.successes_x},
          {"errors_z", e.errors_z},
          {"errors_x", e.errors_x},
          {"seed", e.seed}};
}

json to_json(const CrossoverReport& r) {
  return {{"kind", to_string(r.kind)},
          {"location_km", r.location_km},
          {"bracket_lo_km", r.bracket_lo_km},
          {"bracket_hi_km", r.bracket_hi_km},
          {"tolerance_km", r.tolerance_km},
          {"iterations", r.iterations}};
}

// One-row CSV sharing the JSON field names, in a fixed column order.
std::string csv_from_flat_json(const json& j, const std::vector<std::string>& order) {
  std::string header, row;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) {
      header += ",";
      row += ",";
    }
    header += order[i];
    const json& v = j.at(order[i]);
    if (v.is_number_float())
      row += csv_number(v.get<double>());
    else if (v.is_boolean())
      row += v.get<bool>() ? "true" : "false";
    else if (v.is_string())
      row += v.get<std::string>();
    else
      row += v.dump();
  }
  return header + "\n" + row + "\n";
}

}  // namespace

std::string emit(const RateBreakdown& breakdown, OutputFormat format) {
  const json j = to_json(breakdown);
  if (format == OutputFormat::json) return j.dump(2) + "\n";
  return csv_from_flat_json(
      j, {"kind", "heralding", "rate_per_pulse", "rate_per_second", "yield_y11_qm",
          "gain_q11_qm", "gain_z", "qber_z_total", "e11x_qm", "e11z_qm", "n_load", "n_read",
          "eta_m", "eta_m_prime", "eta_load_a", "eta_load_b", "storage_time_s",
          "extension_composition"});
}

std::string emit(const Bb84Breakdown& breakdown, OutputFormat format) {
  const json j = to_json(breakdown);
  if (format == OutputFormat::json) return j.dump(2) + "\n";
  return csv_from_flat_json(
      j, {"kind", "yield_or_gain_correct", "yield_or_gain_error", "yield_1", "gain_1",
          "gain_mu", "qber", "qber_single_photon", "rate_per_pulse", "rate_per_second"});
}

std::string emit(const EmpiricalEstimates& estimates, OutputFormat format) {
  if (format == OutputFormat::json) return to_json(estimates).dump(2) + "\n";
  json flat;
  for (const auto* name : {"y11_qm", "e11x", "e11z", "n_load", "storage_time_s"}) {
    const json nested = to_json(estimates).at(name);
    flat[std::string(name)] = nested.at("value");
    flat[std::string(name) + "_std_error"] = nested.at("std_error");
  }
  flat["trials"] = estimates.trials;
  flat["successes_z"] = estimates.successes_z;
  flat["successes_x"] = estimates.successes_x;
  flat["errors_z"] = estimates.errors_z;
  flat["errors_x"] = estimates.errors_x;
  flat["seed"] = estimates.seed;
  return csv_from_flat_json(
      flat, {"y11_qm", "y11_qm_std_error", "e11x", "e11x_std_error", "e11z",
             "e11z_std_error", "n_load", "n_load_std_error", "storage_time_s",
             "storage_time_s_std_error", "trials", "successes_z", "successes_x", "errors_z",
             "errors_x", "seed"});
}

std::string emit(const CrossoverReport& report, OutputFormat format) {
  const json j = to_json(report);
  if (format == OutputFormat::json) return j.dump(2) + "\n";
  return csv_from_flat_json(j, {"kind", "location_km", "bracket_lo_km", "bracket_hi_km",
                                "tolerance_km", "iterations"});
}

}  // namespace mamdi
