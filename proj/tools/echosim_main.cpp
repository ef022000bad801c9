#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "echosim/commands.hpp"
#include "echosim/config.hpp"
#include "echosim/errors.hpp"
#include "echosim/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_prefix;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&args](std::uint64_t v) { args.seed = v; }, "override noise.seed");
  cmd->add_option_function<int>(
      "--threads", [&args](int v) { args.threads = v; }, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option_function<std::string>(
      "--out", [&args](const std::string& v) { args.out_prefix = v; },
      "override output path prefix");
}

echosim::ExperimentConfig resolve(const CommonArgs& args) {
  echosim::ExperimentConfig cfg = echosim::load_config(args.config_path);
  if (args.seed) cfg.run.noise.seed = *args.seed;
  if (args.threads) cfg.threads = *args.threads;
  if (args.out_prefix) cfg.output.prefix = *args.out_prefix;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-pulse photon echo simulator with stochastic pulse phase"};
  app.set_version_flag("--version", std::string(echosim::kVersion));
  app.require_subcommand(1);

  CommonArgs sim_args, sweep_args, fit_args;
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::vector<double> fit_taus;

  CLI::App* sim = app.add_subcommand("simulate", "ensemble signal and factor distribution");
  add_common(sim, sim_args);

  CLI::App* swp = app.add_subcommand("sweep", "mean factor versus a noise parameter");
  add_common(swp, sweep_args);
  swp->add_option("--param", sweep_param, "PHI or GAMMA (overrides config)");
  swp->add_option("--values", sweep_values, "sweep values (overrides config)");

  CLI::App* fit = app.add_subcommand("fit", "coherence time from a delay sweep");
  add_common(fit, fit_args);
  fit->add_option("--taus", fit_taus, "delay values (overrides config)");

  CLI::App* val = app.add_subcommand("validate", "run the oracle suite");

  try {
    app.parse(argc, argv);

    if (sim->parsed()) {
      return echosim::cmd_simulate(resolve(sim_args), std::cout);
    }
    if (swp->parsed()) {
      echosim::ExperimentConfig cfg = resolve(sweep_args);
      if (!sweep_param.empty()) {
        if (!cfg.sweep) cfg.sweep = echosim::SweepOptions{};
        if (sweep_param == "PHI") {
          cfg.sweep->parameter = echosim::SweepParameter::Phi;
        } else if (sweep_param == "GAMMA") {
          cfg.sweep->parameter = echosim::SweepParameter::Gamma;
        } else {
          throw echosim::ConfigError("--param must be PHI or GAMMA");
        }
      }
      if (!sweep_values.empty()) {
        if (!cfg.sweep) throw echosim::ConfigError("--values needs --param or a sweep section");
        cfg.sweep->values = sweep_values;
      }
      return echosim::cmd_sweep(cfg, std::cout);
    }
    if (fit->parsed()) {
      echosim::ExperimentConfig cfg = resolve(fit_args);
      if (!fit_taus.empty()) cfg.fit = echosim::FitOptions{fit_taus};
      return echosim::cmd_fit(cfg, std::cout);
    }
    if (val->parsed()) {
      return echosim::cmd_validate(std::cout);
    }
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const echosim::SingularityError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  } catch (const echosim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
