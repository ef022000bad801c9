#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "echosim/ensemble.hpp"

namespace echosim {

struct OutputOptions {
  std::string prefix = "out_";
  std::optional<std::size_t> signal_distribution_bins;  // extra heat-map CSV when set
};

struct SweepOptions {
  SweepParameter parameter = SweepParameter::Phi;
  std::vector<double> values;
};

struct FitOptions {
  std::vector<double> tau_values;
};

struct DetectionGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  double t_step = 0.0;
};

// Everything a command needs, parsed from one JSON file with a fixed schema
// (top-level sections: atom, pulses, noise, echo, ensemble, output, and the
// optional sweep/fit sections). Unknown keys anywhere are rejected.
struct ExperimentConfig {
  RunSpec run;
  DetectionGrid grid;  // source of run.echo.t_grid, kept for the manifest
  int threads = 1;
  OutputOptions output;
  std::optional<SweepOptions> sweep;
  std::optional<FitOptions> fit;
};

ExperimentConfig load_config(const std::filesystem::path& file);

// The run manifest: code version, command, and every semantic input (seed
// included, execution-only knobs like thread count excluded). The embedded
// "config" object is itself a valid configuration file.
std::string manifest_text(const ExperimentConfig& cfg, std::string_view command);

// Writes <prefix>manifest.json next to the other outputs.
void write_manifest(const ExperimentConfig& cfg, std::string_view command);

}  // namespace echosim
