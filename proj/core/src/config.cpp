#include "echosim/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <string>

#include <json.hpp>

#include "echosim/errors.hpp"
#include "echosim/version.hpp"

namespace echosim {

namespace {

using nlohmann::json;

const json& section(const json& root, const char* name) {
  const auto it = root.find(name);
  if (it == root.end()) throw ConfigError(std::string("config: missing section '") + name + "'");
  if (!it->is_object()) throw ConfigError(std::string("config: section '") + name + "' must be an object");
  return *it;
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("config: unknown key '" + where + "." + item.key() + "'");
    }
  }
}

double need_number(const json& sec, const std::string& where, const char* key) {
  const auto it = sec.find(key);
  if (it == sec.end()) throw ConfigError("config: missing '" + where + "." + key + "'");
  if (!it->is_number()) throw ConfigError("config: '" + where + "." + key + "' must be a number");
  return it->get<double>();
}

double opt_number(const json& sec, const std::string& where, const char* key, double fallback) {
  const auto it = sec.find(key);
  if (it == sec.end()) return fallback;
  if (!it->is_number()) throw ConfigError("config: '" + where + "." + key + "' must be a number");
  return it->get<double>();
}

std::string opt_string(const json& sec, const std::string& where, const char* key,
                       const std::string& fallback) {
  const auto it = sec.find(key);
  if (it == sec.end()) return fallback;
  if (!it->is_string()) throw ConfigError("config: '" + where + "." + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<double> need_number_list(const json& sec, const std::string& where, const char* key) {
  const auto it = sec.find(key);
  if (it == sec.end()) throw ConfigError("config: missing '" + where + "." + key + "'");
  if (!it->is_array()) throw ConfigError("config: '" + where + "." + key + "' must be an array");
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) throw ConfigError("config: '" + where + "." + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double parse_tau_c(const json& sec) {
  const auto it = sec.find("tau_c");
  if (it == sec.end()) return std::numeric_limits<double>::infinity();
  if (it->is_string()) {
    const auto s = it->get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw ConfigError("config: atom.tau_c string must be \"inf\"");
  }
  if (!it->is_number()) throw ConfigError("config: atom.tau_c must be a number or \"inf\"");
  return it->get<double>();
}

std::vector<double> build_grid(const DetectionGrid& g) {
  if (!(g.t_step > 0.0)) throw ConfigError("config: echo.t_step must be > 0");
  if (!(g.t_max >= g.t_min)) throw ConfigError("config: echo.t_max must be >= echo.t_min");
  std::vector<double> grid;
  const double limit = g.t_max + 1e-9 * g.t_step;
  for (std::size_t k = 0;; ++k) {
    const double t = g.t_min + static_cast<double>(k) * g.t_step;
    if (t > limit) break;
    grid.push_back(t);
  }
  return grid;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: invalid JSON in " + file.string() + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "<top>", {"atom", "pulses", "noise", "echo", "ensemble", "output", "sweep", "fit"});

  ExperimentConfig cfg;

  const json& atom = section(root, "atom");
  check_keys(atom, "atom", {"eps0", "sigma0", "dipole_mag", "tau_c"});
  cfg.run.atom.eps0 = opt_number(atom, "atom", "eps0", 0.0);
  cfg.run.atom.sigma0 = opt_number(atom, "atom", "sigma0", 1.0);
  cfg.run.atom.dipole_mag = opt_number(atom, "atom", "dipole_mag", 1.0);
  cfg.run.atom.tau_c = parse_tau_c(atom);

  const json& pulses = section(root, "pulses");
  check_keys(pulses, "pulses", {"rabi", "duration1", "duration2"});
  const double rabi = need_number(pulses, "pulses", "rabi");
  cfg.run.echo.pulse1 = {rabi, need_number(pulses, "pulses", "duration1"), WavevectorTag::K1};
  cfg.run.echo.pulse2 = {rabi, need_number(pulses, "pulses", "duration2"), WavevectorTag::K2};

  const json& noise = section(root, "noise");
  check_keys(noise, "noise", {"phi_amp", "gamma", "dt", "seed"});
  cfg.run.noise.phi_amp = need_number(noise, "noise", "phi_amp");
  cfg.run.noise.gamma = need_number(noise, "noise", "gamma");
  cfg.run.noise.dt = need_number(noise, "noise", "dt");
  {
    const auto it = noise.find("seed");
    if (it == noise.end()) throw ConfigError("config: missing 'noise.seed'");
    if (!it->is_number_unsigned()) {
      throw ConfigError("config: 'noise.seed' must be a nonnegative integer");
    }
    cfg.run.noise.seed = it->get<std::uint64_t>();
  }

  const json& echo = section(root, "echo");
  check_keys(echo, "echo", {"tau", "t_min", "t_max", "t_step"});
  cfg.run.echo.tau = need_number(echo, "echo", "tau");
  cfg.grid.t_min = need_number(echo, "echo", "t_min");
  cfg.grid.t_max = need_number(echo, "echo", "t_max");
  cfg.grid.t_step = need_number(echo, "echo", "t_step");
  cfg.run.echo.t_grid = build_grid(cfg.grid);

  const json& ens = section(root, "ensemble");
  check_keys(ens, "ensemble", {"n_repeats", "phase_mode", "singularity_policy", "threads"});
  const double reps = need_number(ens, "ensemble", "n_repeats");
  if (!(reps >= 1.0) || reps != std::floor(reps)) {
    throw ConfigError("config: ensemble.n_repeats must be a positive integer");
  }
  cfg.run.n_repeats = static_cast<std::size_t>(reps);
  {
    const auto mode = opt_string(ens, "ensemble", "phase_mode", "shared");
    if (mode == "shared") {
      cfg.run.phase_mode = PhaseMode::Shared;
    } else if (mode == "independent") {
      cfg.run.phase_mode = PhaseMode::Independent;
    } else {
      throw ConfigError("config: ensemble.phase_mode must be \"shared\" or \"independent\"");
    }
    const auto pol = opt_string(ens, "ensemble", "singularity_policy", "abort");
    if (pol == "abort") {
      cfg.run.singularity_policy = SingularityPolicy::Abort;
    } else if (pol == "skip") {
      cfg.run.singularity_policy = SingularityPolicy::SkipAndCount;
    } else {
      throw ConfigError("config: ensemble.singularity_policy must be \"abort\" or \"skip\"");
    }
    const double threads = opt_number(ens, "ensemble", "threads", 1.0);
    if (!(threads >= 1.0) || threads != std::floor(threads)) {
      throw ConfigError("config: ensemble.threads must be a positive integer");
    }
    cfg.threads = static_cast<int>(threads);
  }

  if (root.contains("output")) {
    const json& out = section(root, "output");
    check_keys(out, "output", {"prefix", "signal_distribution_bins"});
    cfg.output.prefix = opt_string(out, "output", "prefix", "out_");
    if (out.contains("signal_distribution_bins")) {
      const double bins = need_number(out, "output", "signal_distribution_bins");
      if (!(bins >= 2.0) || bins != std::floor(bins)) {
        throw ConfigError("config: output.signal_distribution_bins must be an integer >= 2");
      }
      cfg.output.signal_distribution_bins = static_cast<std::size_t>(bins);
    }
  }

  if (root.contains("sweep")) {
    const json& sw = section(root, "sweep");
    check_keys(sw, "sweep", {"parameter", "values"});
    SweepOptions opts;
    const auto par = opt_string(sw, "sweep", "parameter", "");
    if (par == "PHI") {
      opts.parameter = SweepParameter::Phi;
    } else if (par == "GAMMA") {
      opts.parameter = SweepParameter::Gamma;
    } else if (par == "TAU") {
      opts.parameter = SweepParameter::Tau;
    } else {
      throw ConfigError("config: sweep.parameter must be PHI, GAMMA or TAU");
    }
    opts.values = need_number_list(sw, "sweep", "values");
    cfg.sweep = std::move(opts);
  }

  if (root.contains("fit")) {
    const json& ft = section(root, "fit");
    check_keys(ft, "fit", {"tau_values"});
    cfg.fit = FitOptions{need_number_list(ft, "fit", "tau_values")};
  }

  // full semantic validation before any computation
  cfg.run.validate();
  return cfg;
}

std::string manifest_text(const ExperimentConfig& cfg, std::string_view command) {
  json config;
  config["atom"]["eps0"] = cfg.run.atom.eps0;
  config["atom"]["sigma0"] = cfg.run.atom.sigma0;
  config["atom"]["dipole_mag"] = cfg.run.atom.dipole_mag;
  if (std::isinf(cfg.run.atom.tau_c)) {
    config["atom"]["tau_c"] = "inf";
  } else {
    config["atom"]["tau_c"] = cfg.run.atom.tau_c;
  }
  config["pulses"]["rabi"] = cfg.run.echo.pulse1.rabi;
  config["pulses"]["duration1"] = cfg.run.echo.pulse1.duration;
  config["pulses"]["duration2"] = cfg.run.echo.pulse2.duration;
  config["noise"]["phi_amp"] = cfg.run.noise.phi_amp;
  config["noise"]["gamma"] = cfg.run.noise.gamma;
  config["noise"]["dt"] = cfg.run.noise.dt;
  config["noise"]["seed"] = cfg.run.noise.seed;
  config["echo"]["tau"] = cfg.run.echo.tau;
  config["echo"]["t_min"] = cfg.grid.t_min;
  config["echo"]["t_max"] = cfg.grid.t_max;
  config["echo"]["t_step"] = cfg.grid.t_step;
  config["ensemble"]["n_repeats"] = cfg.run.n_repeats;
  config["ensemble"]["phase_mode"] =
      cfg.run.phase_mode == PhaseMode::Shared ? "shared" : "independent";
  config["ensemble"]["singularity_policy"] =
      cfg.run.singularity_policy == SingularityPolicy::Abort ? "abort" : "skip";
  config["output"]["prefix"] = cfg.output.prefix;
  if (cfg.output.signal_distribution_bins) {
    config["output"]["signal_distribution_bins"] = *cfg.output.signal_distribution_bins;
  }
  if (cfg.sweep) {
    const char* names[] = {"PHI", "GAMMA", "TAU"};
    config["sweep"]["parameter"] = names[static_cast<int>(cfg.sweep->parameter)];
    config["sweep"]["values"] = cfg.sweep->values;
  }
  if (cfg.fit) {
    config["fit"]["tau_values"] = cfg.fit->tau_values;
  }

  json manifest;
  manifest["version"] = std::string(kVersion);
  manifest["command"] = std::string(command);
  manifest["config"] = std::move(config);
  return manifest.dump(2) + "\n";
}

void write_manifest(const ExperimentConfig& cfg, std::string_view command) {
  const std::filesystem::path path = cfg.output.prefix + "manifest.json";
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  out << manifest_text(cfg, command);
}

}  // namespace echosim
