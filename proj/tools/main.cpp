#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mamdi/bb84.hpp"
#include "mamdi/config_io.hpp"
#include "mamdi/engine.hpp"
#include "mamdi/mdi.hpp"
#include "mamdi/misalignment.hpp"
#include "mamdi/protocol_mc.hpp"
#include "mamdi/sweep.hpp"

namespace {

using mamdi::SystemConfig;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write output file '" + out_path + "'");
  out << content;
  if (!out.good()) throw std::invalid_argument("failed writing output file '" + out_path + "'");
}

// Shared flags: config document, overrides, and how to emit the result.
struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string protocol;
  std::string source;
  std::string format = "json";
  std::string out_path;
};

void add_config_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Config file (JSON)");
  cmd->add_option("--set", opts.sets,
                  "Override a config value as section.key=value (repeatable)");
  cmd->add_option("--source", opts.source, "Source kind: single or decoy")
      ->check(CLI::IsMember({"single", "decoy"}));
}

void add_output_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", opts.out_path, "Output path (default: stdout)");
}

json apply_set(json doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("--set expects section.key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  const auto dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
    throw std::invalid_argument("--set expects section.key=value, got '" + assignment + "'");
  const std::string section = path.substr(0, dot);
  const std::string key = path.substr(dot + 1);

  // Numbers become JSON numbers; anything else stays a string ("inf", enum names).
  json parsed;
  try {
    std::size_t consumed = 0;
    const double number = std::stod(value, &consumed);
    parsed = consumed == value.size() ? json(number) : json(value);
  } catch (const std::exception&) {
    parsed = json(value);
  }
  doc[section][key] = parsed;
  return doc;
}

SystemConfig load_config(const CommonOpts& opts) {
  json doc = json::object();
  if (!opts.config_path.empty()) {
    try {
      doc = json::parse(read_file(opts.config_path));
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
  }
  for (const auto& assignment : opts.sets) doc = apply_set(doc, assignment);
  SystemConfig config = mamdi::parse_config(doc.dump());
  if (!opts.source.empty()) {
    config.source.kind = opts.source == "decoy" ? mamdi::SourceKind::decoy
                                                : mamdi::SourceKind::single_photon;
    config.validate();
  }
  return config;
}

std::vector<double> parse_grid(const std::string& spec) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !is.eof())
    throw std::invalid_argument("--grid expects START:STOP:STEP, got '" + spec + "'");
  if (!(step > 0.0)) throw std::invalid_argument("--grid step must be > 0");
  if (!(stop >= start)) throw std::invalid_argument("--grid stop must be >= start");
  std::vector<double> grid;
  for (double v = start; v <= stop + step * 1e-9; v += step) grid.push_back(v);
  return grid;
}

std::pair<double, double> parse_bracket(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  char c1 = 0;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi) || c1 != ':' || !is.eof())
    throw std::invalid_argument("--bracket expects LO:HI, got '" + spec + "'");
  return {lo, hi};
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return std::to_string(std::chrono::duration_cast<std::chrono::seconds>(now).count());
}

std::string compact_config(const SystemConfig& config) {
  return json::parse(mamdi::emit_config(config)).dump();
}

mamdi::ProtocolChoice default_protocol(const SystemConfig& config) {
  switch (config.heralding) {
    case mamdi::Heralding::direct: return mamdi::ProtocolChoice::ma_mdi_direct;
    case mamdi::Heralding::indirect: return mamdi::ProtocolChoice::ma_mdi_indirect;
    default: return mamdi::ProtocolChoice::bb84;
  }
}

// Storage-time analyses need a memory scheme; an unset one defaults to the
// directly heralded memory.
SystemConfig ensure_heralding(SystemConfig config) {
  if (config.heralding == mamdi::Heralding::none) config.heralding = mamdi::Heralding::direct;
  return config;
}

int run_rate(const CommonOpts& opts, double distance_km, bool distance_given) {
  SystemConfig config = load_config(opts);
  if (distance_given) config = mamdi::with_total_distance(config, distance_km);
  const mamdi::ProtocolChoice protocol = opts.protocol.empty()
                                             ? default_protocol(config)
                                             : mamdi::protocol_choice_from_string(opts.protocol);
  config = mamdi::with_protocol(config, protocol);
  const auto format = mamdi::output_format_from_string(opts.format);
  const bool single = config.source.kind == mamdi::SourceKind::single_photon;
  std::string text;
  switch (protocol) {
    case mamdi::ProtocolChoice::bb84:
      text = emit(single ? mamdi::bb84_single_photon(config) : mamdi::bb84_decoy(config),
                  format);
      break;
    case mamdi::ProtocolChoice::mdi:
      text = emit(
          single ? mamdi::mdi_single_photon_rate(config) : mamdi::mdi_decoy_rate(config),
          format);
      break;
    default:
      text = emit(mamdi::rate(config), format);
      break;
  }
  write_output(opts.out_path, text);
  return 0;
}

int run_sweep(const CommonOpts& opts, const std::vector<std::string>& protocol_names,
              const std::string& grid_spec, const std::string& preset_name) {
  mamdi::SweepResult result;
  if (!preset_name.empty()) {
    result = mamdi::run_preset(mamdi::figure_preset(preset_name));
  } else {
    const SystemConfig config = load_config(opts);
    std::vector<mamdi::ProtocolChoice> protocols;
    if (protocol_names.empty()) {
      protocols = {mamdi::ProtocolChoice::bb84, mamdi::ProtocolChoice::mdi,
                   mamdi::ProtocolChoice::ma_mdi_direct,
                   mamdi::ProtocolChoice::ma_mdi_indirect};
    } else {
      for (const auto& name : protocol_names)
        protocols.push_back(mamdi::protocol_choice_from_string(name));
    }
    result = mamdi::sweep(config, protocols, parse_grid(grid_spec));
    result.metadata["config"] = compact_config(config);
  }
  result.metadata["timestamp_unix"] = timestamp_now();
  write_output(opts.out_path, emit(result, mamdi::output_format_from_string(opts.format)));
  return 0;
}

int run_storage_time(const CommonOpts& opts, const std::string& grid_spec) {
  SystemConfig config = ensure_heralding(load_config(opts));
  if (!opts.protocol.empty())
    config = mamdi::with_protocol(config, mamdi::protocol_choice_from_string(opts.protocol));

  mamdi::SweepResult result;
  result.columns = {"distance_km", "storage_time_s", "transit_time_s", "loading_prob",
                    "expected_rounds"};
  for (double km : parse_grid(grid_spec)) {
    const SystemConfig cfg = mamdi::with_total_distance(config, km);
    const auto summary = mamdi::symmetric_summary(cfg);
    result.rows.push_back({km, summary.storage_time_s,
                           km * 1000.0 / cfg.geometry.light_speed_m_per_s,
                           summary.loading_prob, summary.expected_rounds});
  }
  result.metadata["config"] = compact_config(config);
  result.metadata["timestamp_unix"] = timestamp_now();
  write_output(opts.out_path, emit(result, mamdi::output_format_from_string(opts.format)));
  return 0;
}

int run_crossover(const CommonOpts& opts, const std::string& kind_name,
                  const std::string& baseline_name, const std::string& bracket_spec,
                  double tolerance_km) {
  SystemConfig config = load_config(opts);
  const auto [lo, hi] = parse_bracket(bracket_spec);

  mamdi::CrossoverKind kind;
  std::function<double(double)> objective;
  if (kind_name == "rate") {
    if (opts.protocol.empty() || baseline_name.empty())
      throw std::invalid_argument(
          "crossover --kind rate requires --protocol and --baseline");
    kind = mamdi::CrossoverKind::rate_crossover;
    objective = mamdi::rate_difference_objective(
        config, mamdi::protocol_choice_from_string(opts.protocol),
        mamdi::protocol_choice_from_string(baseline_name));
  } else if (kind_name == "cutoff") {
    if (opts.protocol.empty())
      throw std::invalid_argument("crossover --kind cutoff requires --protocol");
    kind = mamdi::CrossoverKind::rate_cutoff;
    objective =
        mamdi::rate_cutoff_objective(config, mamdi::protocol_choice_from_string(opts.protocol));
  } else {  // storage-time
    kind = mamdi::CrossoverKind::storage_time_crossover;
    SystemConfig timed = ensure_heralding(config);
    if (!opts.protocol.empty())
      timed = mamdi::with_protocol(timed, mamdi::protocol_choice_from_string(opts.protocol));
    objective = mamdi::storage_vs_transit_objective(timed);
  }

  const auto report = mamdi::find_crossover(kind, objective, lo, hi, tolerance_km);
  write_output(opts.out_path, emit(report, mamdi::output_format_from_string(opts.format)));
  return 0;
}

int run_preset_dump(const std::string& name, const std::string& out_path) {
  const auto preset = mamdi::figure_preset(name);
  json curves = json::array();
  for (const auto& curve : preset.curves)
    curves.push_back({{"label", curve.label},
                      {"protocol", to_string(curve.protocol)},
                      {"config", json::parse(mamdi::emit_config(curve.config))}});
  const json doc = {{"name", preset.name},
                    {"kind", preset.kind == mamdi::PresetKind::rate_curves
                                 ? "rate_curves"
                                 : "storage_time_curves"},
                    {"per_pulse", preset.per_pulse},
                    {"grid_km", preset.grid_km},
                    {"curves", curves}};
  write_output(out_path, doc.dump(2) + "\n");
  return 0;
}

// ---- mc-validate ------------------------------------------------------

struct ValidationCase {
  std::string name;
  SystemConfig config;
};

SystemConfig validation_base() {
  SystemConfig c;
  c.heralding = mamdi::Heralding::direct;
  c.geometry.distance_a_km = 25.0;
  c.geometry.distance_b_km = 25.0;
  return c;
}

std::vector<ValidationCase> builtin_validation_suite() {
  std::vector<ValidationCase> cases;

  cases.push_back({"no_noise", validation_base()});

  SystemConfig finite_t2 = validation_base();
  finite_t2.memory.coherence_time_s = 100e-9;
  cases.push_back({"finite_t2", finite_t2});

  SystemConfig finite_t1 = validation_base();
  finite_t1.memory.amplitude_decay_time_s = 50e-9;
  cases.push_back({"finite_t1", finite_t1});

  SystemConfig background = validation_base();
  background.channel.background_rate_hz = 5e5;
  background.memory.writing_efficiency = 0.8;
  cases.push_back({"background_only", background});

  SystemConfig darks = validation_base();
  darks.detector.dark_rate_hz = 1e6;
  darks.memory.reading_efficiency_0 = 0.6;
  cases.push_back({"dark_counts_only", darks});

  SystemConfig misalignment = validation_base();
  misalignment.channel.misalignment_a = 0.03;
  misalignment.channel.misalignment_b = 0.05;
  cases.push_back({"misalignment_only", misalignment});

  SystemConfig asymmetric = validation_base();
  asymmetric.geometry.distance_a_km = 10.0;
  asymmetric.geometry.distance_b_km = 30.0;
  asymmetric.channel.misalignment_a = 0.02;
  asymmetric.channel.misalignment_b = 0.01;
  asymmetric.memory.coherence_time_s = 200e-9;
  cases.push_back({"asymmetric_legs", asymmetric});

  SystemConfig low_reading = validation_base();
  low_reading.memory.reading_efficiency_0 = 0.3;
  low_reading.detector.efficiency = 0.9;
  cases.push_back({"low_reading_efficiency", low_reading});

  SystemConfig combined = validation_base();
  combined.geometry.distance_a_km = 25.0;
  combined.geometry.distance_b_km = 25.0;
  combined.channel.misalignment_a = 0.005;
  combined.channel.misalignment_b = 0.005;
  combined.channel.background_rate_hz = 1e5;
  combined.detector.dark_rate_hz = 1e5;
  combined.detector.efficiency = 0.93;
  combined.memory.writing_efficiency = 0.5;
  combined.memory.reading_efficiency_0 = 0.73;
  combined.memory.amplitude_decay_time_s = 4e-6;
  combined.memory.coherence_time_s = 4e-6;
  combined.memory.reading_time_s = 1e-9;
  cases.push_back({"combined_noise", combined});

  SystemConfig decoy = validation_base();
  decoy.source.kind = mamdi::SourceKind::decoy;
  decoy.source.mu = 0.5;
  decoy.source.nu = 0.4;
  decoy.channel.misalignment_a = 0.01;
  decoy.channel.misalignment_b = 0.02;
  decoy.channel.background_rate_hz = 1e5;
  decoy.memory.coherence_time_s = 500e-9;
  cases.push_back({"decoy_direct", decoy});

  return cases;
}

struct Reference {
  double y11_qm, e11x, e11z, n_load, storage_time_s;
};

// Closed-form values the simulation is compared against, composed at the
// loading probabilities the source kind puts in effect.
Reference closed_form_reference(const SystemConfig& cfg) {
  if (cfg.source.kind == mamdi::SourceKind::single_photon) {
    const auto r = mamdi::rate_single_photon(cfg);
    return {r.yield_y11_qm, r.e11x_qm, r.e11z_qm, r.n_load, r.storage_time_s};
  }
  const auto r = mamdi::rate_decoy(cfg);
  const double eta_a = mamdi::loading_prob_direct(cfg, mamdi::Leg::a, cfg.source.mu);
  const double eta_b = mamdi::loading_prob_direct(cfg, mamdi::Leg::b, cfg.source.nu);
  const auto eff = mamdi::effective_measurement_efficiencies(cfg, eta_a, eta_b);
  const auto pm = mamdi::pair_misalignment(cfg, eta_a, eta_b);
  const double p_dc = cfg.detector.dark_rate_hz * cfg.source.pulse_width_s;
  const double e11x =
      mamdi::mdi_kernel(eff.eta_m, eff.eta_m_prime, p_dc, pm.mean_e_dx_pair).e11x;
  return {r.gain_z, e11x, r.qber_z_total, r.n_load, r.storage_time_s};
}

json check_json(const std::string& name, double closed, const mamdi::Estimate& est) {
  const double diff = std::abs(est.value - closed);
  const double sigma = est.std_error > 0.0 ? diff / est.std_error : (diff > 0.0 ? 1e18 : 0.0);
  const bool pass = diff <= 3.0 * est.std_error + 1e-12;
  return {{"name", name},          {"closed_form", closed}, {"estimate", est.value},
          {"std_error", est.std_error}, {"sigma", sigma},   {"pass", pass}};
}

int run_mc_validate(const CommonOpts& opts, std::uint64_t trials, std::uint64_t seed) {
  std::vector<ValidationCase> cases;
  if (!opts.config_path.empty() || !opts.sets.empty() || !opts.source.empty()) {
    cases.push_back({"custom", load_config(opts)});
  } else {
    cases = builtin_validation_suite();
  }

  bool all_pass = true;
  json case_array = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& vc = cases[i];
    const Reference ref = closed_form_reference(vc.config);
    const auto est = mamdi::simulate_direct(vc.config, trials, seed + i);
    json checks = json::array();
    checks.push_back(check_json("y11_qm", ref.y11_qm, est.y11_qm));
    checks.push_back(check_json("e11x", ref.e11x, est.e11x));
    checks.push_back(check_json("e11z", ref.e11z, est.e11z));
    checks.push_back(check_json("n_load", ref.n_load, est.n_load));
    checks.push_back(check_json("storage_time_s", ref.storage_time_s, est.storage_time));
    bool case_pass = true;
    for (const auto& c : checks) case_pass = case_pass && c.at("pass").get<bool>();
    all_pass = all_pass && case_pass;
    case_array.push_back({{"name", vc.name},
                          {"trials", trials},
                          {"seed", seed + i},
                          {"checks", checks},
                          {"pass", case_pass}});
  }

  const json doc = {
      {"suite", "closed-form vs trial-level simulation"},
      {"tolerance", "3 standard errors"},
      {"trials", trials},
      {"seed", seed},
      {"cases", case_array},
      {"pass", all_pass},
  };
  write_output(opts.out_path, doc.dump(2) + "\n");
  return all_pass ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secret-key rates for memory-assisted MDI quantum key distribution"};
  app.require_subcommand(1);

  CommonOpts rate_opts;
  double rate_distance = 0.0;
  auto* rate_cmd = app.add_subcommand("rate", "Secret-key rate at a single distance");
  add_config_flags(rate_cmd, rate_opts);
  add_output_flags(rate_cmd, rate_opts);
  rate_cmd->add_option("--protocol", rate_opts.protocol,
                       "bb84, mdi, ma-mdi-direct, or ma-mdi-indirect");
  auto* rate_distance_opt =
      rate_cmd->add_option("--distance", rate_distance, "Total distance in km");

  CommonOpts sweep_opts;
  std::vector<std::string> sweep_protocols;
  std::string sweep_grid = "0:500:10";
  std::string sweep_preset;
  auto* sweep_cmd = app.add_subcommand("sweep", "Rates over a distance grid");
  add_config_flags(sweep_cmd, sweep_opts);
  add_output_flags(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--protocol", sweep_protocols,
                        "Protocol column (repeatable; default: all four)");
  sweep_cmd->add_option("--grid", sweep_grid, "Distance grid START:STOP:STEP in km");
  sweep_cmd->add_option("--preset", sweep_preset,
                        "Run a named preset instead (fig3|fig4|fig5|fig6a|fig6b)");

  CommonOpts storage_opts;
  std::string storage_grid = "0:800:10";
  auto* storage_cmd =
      app.add_subcommand("storage-time", "Mean memory waiting time over a distance grid");
  add_config_flags(storage_cmd, storage_opts);
  add_output_flags(storage_cmd, storage_opts);
  storage_cmd->add_option("--protocol", storage_opts.protocol,
                          "ma-mdi-direct or ma-mdi-indirect");
  storage_cmd->add_option("--grid", storage_grid, "Distance grid START:STOP:STEP in km");

  CommonOpts crossover_opts;
  std::string crossover_kind = "rate";
  std::string crossover_baseline;
  std::string crossover_bracket;
  double crossover_tol = 0.1;
  auto* crossover_cmd =
      app.add_subcommand("crossover", "Bisect for a crossover or cut-off distance");
  add_config_flags(crossover_cmd, crossover_opts);
  add_output_flags(crossover_cmd, crossover_opts);
  crossover_cmd
      ->add_option("--kind", crossover_kind,
                   "rate (two protocols), cutoff (one protocol), or storage-time")
      ->check(CLI::IsMember({"rate", "cutoff", "storage-time"}));
  crossover_cmd->add_option("--protocol", crossover_opts.protocol, "Protocol under test");
  crossover_cmd->add_option("--baseline", crossover_baseline,
                            "Baseline protocol for --kind rate");
  crossover_cmd->add_option("--bracket", crossover_bracket, "Search bracket LO:HI in km")
      ->required();
  crossover_cmd->add_option("--tol", crossover_tol, "Bisection tolerance in km");

  CommonOpts mc_opts;
  std::uint64_t mc_trials = 200000;
  std::uint64_t mc_seed = 20240817;
  auto* mc_cmd = app.add_subcommand(
      "mc-validate", "Compare closed forms against the trial-level simulation");
  add_config_flags(mc_cmd, mc_opts);
  mc_cmd->add_option("--out", mc_opts.out_path, "Output path (default: stdout)");
  mc_cmd->add_option("--trials", mc_trials, "Simulation trials per case");
  mc_cmd->add_option("--seed", mc_seed, "Base random seed");

  std::string preset_name;
  std::string preset_out;
  auto* preset_cmd = app.add_subcommand("preset", "Dump a named preset's full definition");
  preset_cmd->add_option("name,--preset", preset_name, "fig3, fig4, fig5, fig6a, or fig6b")
      ->required();
  preset_cmd->add_option("--out", preset_out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rate_cmd->parsed())
      return run_rate(rate_opts, rate_distance, rate_distance_opt->count() > 0);
    if (sweep_cmd->parsed())
      return run_sweep(sweep_opts, sweep_protocols, sweep_grid, sweep_preset);
    if (storage_cmd->parsed()) return run_storage_time(storage_opts, storage_grid);
    if (crossover_cmd->parsed())
      return run_crossover(crossover_opts, crossover_kind, crossover_baseline,
                           crossover_bracket, crossover_tol);
    if (mc_cmd->parsed()) return run_mc_validate(mc_opts, mc_trials, mc_seed);
    if (preset_cmd->parsed()) return run_preset_dump(preset_name, preset_out);
  } catch (const mamdi::BracketError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
