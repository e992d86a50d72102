#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qkdrate/sweep.hpp"

namespace {

using qkdrate::ConfigError;
using qkdrate::IoError;
using qkdrate::OutputFormat;
using qkdrate::RunConfig;
using qkdrate::SimMode;

struct CliOptions {
  std::string config_path;
  std::string fiber_spec;
  std::vector<double> thetas;
  std::vector<double> xs;
  std::string out_path;
  std::string format = "csv";
  int workers = 0;
};

void parse_fiber_spec(const std::string& spec, RunConfig& cfg) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char extra = '\0';
  const int n =
      std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &extra);
  if (n != 3) {
    throw ConfigError("fiber: expected start:stop:step, got '" + spec + "'");
  }
  cfg.fiber = {start, stop, step};
}

RunConfig build_config(const CliOptions& opts, SimMode mode) {
  RunConfig cfg;
  cfg.mode = mode;
  if (mode == SimMode::SinglePhoton) {
    cfg.fiber = {0.0, 250.0, 1.0};
    cfg.out_path = "sim1.csv";
    for (double t : {0.0, 1.0, 3.0, 5.0, 7.0, 9.0}) {
      cfg.fluctuations.emplace_back(t, 0.0);
    }
  } else {
    cfg.fiber = {0.0, 200.0, 1.0};
    cfg.out_path = "sim2.csv";
    for (double t : {0.0, 1.0, 3.0, 5.0, 7.0}) {
      cfg.fluctuations.emplace_back(t, t);
    }
  }

  if (!opts.config_path.empty()) apply_config_file(cfg, opts.config_path);
  if (!opts.fiber_spec.empty()) parse_fiber_spec(opts.fiber_spec, cfg);

  if (!opts.thetas.empty()) {
    cfg.fluctuations.clear();
    if (mode == SimMode::SinglePhoton) {
      if (!opts.xs.empty()) {
        throw ConfigError("x: the single-photon sweep has no intensity list");
      }
      for (double t : opts.thetas) cfg.fluctuations.emplace_back(t, 0.0);
    } else {
      // Percent list defaults to the theta list, matching curve pairs.
      const std::vector<double>& xs = opts.xs.empty() ? opts.thetas : opts.xs;
      if (xs.size() != opts.thetas.size()) {
        throw ConfigError("x: list length must match theta list");
      }
      for (std::size_t i = 0; i < opts.thetas.size(); ++i) {
        cfg.fluctuations.emplace_back(opts.thetas[i], xs[i]);
      }
    }
  } else if (!opts.xs.empty()) {
    throw ConfigError("x: requires a matching theta list");
  }

  if (!opts.out_path.empty()) cfg.out_path = opts.out_path;
  if (opts.format == "csv") {
    cfg.format = OutputFormat::Csv;
  } else if (opts.format == "tsv") {
    cfg.format = OutputFormat::Tsv;
  } else {
    throw ConfigError("format: expected csv or tsv, got '" + opts.format + "'");
  }
  if (opts.workers > 0) cfg.workers = opts.workers;
  cfg.validate();
  return cfg;
}

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_path,
                  "Key-value configuration file");
  cmd->add_option("--fiber", opts.fiber_spec,
                  "Fiber sweep as start:stop:step in km");
  cmd->add_option("--theta", opts.thetas,
                  "Phase fluctuation half-widths in degrees")
      ->delimiter(',');
  cmd->add_option("--x", opts.xs, "Intensity fluctuation percentages")
      ->delimiter(',');
  cmd->add_option("--out", opts.out_path, "Output file path");
  cmd->add_option("--format", opts.format, "Output format: csv or tsv");
  cmd->add_option("--workers", opts.workers, "Worker thread count")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Certified secret-key-rate bounds for a three-state decoy QKD protocol "
      "with fluctuating phase and intensity"};
  app.require_subcommand(1);

  CliOptions opts1, opts2;
  CLI::App* sim1 = app.add_subcommand(
      "sim1", "Key rate vs fiber length for a single-photon source");
  add_common_flags(sim1, opts1);
  CLI::App* sim2 = app.add_subcommand(
      "sim2",
      "Optimized key rate vs fiber length for a Gaussian-fluctuating "
      "coherent source");
  add_common_flags(sim2, opts2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim1->parsed()) {
      const RunConfig cfg = build_config(opts1, SimMode::SinglePhoton);
      emit(run_first_simulation(cfg), cfg);
      std::fprintf(stderr, "wrote %s\n", cfg.out_path.c_str());
    } else {
      const RunConfig cfg = build_config(opts2, SimMode::Coherent);
      emit(run_second_simulation(cfg), cfg);
      std::fprintf(stderr, "wrote %s\n", cfg.out_path.c_str());
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
