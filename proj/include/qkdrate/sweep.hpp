#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qkdrate/keyrate.hpp"

namespace qkdrate {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SimMode { SinglePhoton, Coherent };
enum class OutputFormat { Csv, Tsv };

struct FiberRange {
  double start_km = 0.0;
  double stop_km = 200.0;
  double step_km = 1.0;

  std::vector<double> lengths() const;
};

struct RunConfig {
  SimMode mode = SimMode::Coherent;
  FiberRange fiber;
  // (theta degrees, intensity percent) per curve; percent is ignored by the
  // single-photon sweep.
  std::vector<std::pair<double, double>> fluctuations;
  SystemParams system;
  double mu_d2_bar = 2e-4;
  double sigma_divisor = 5.33;
  double delta_theta = 1e-7;
  double delta_mu = 1e-7;
  OptimizerSettings optimizer;
  std::string out_path;
  OutputFormat format = OutputFormat::Csv;
  int workers = 1;

  void validate() const;  // throws ConfigError naming the offending field
};

struct SweepRow {
  enum class Status { Ok, ZeroRate, Infeasible };

  double fiber_length_km = 0.0;
  double theta_deg = 0.0;
  double x_pct = 0.0;
  double rate = 0.0;
  double e_z = 0.0;
  double e_x_upper = 0.0;
  double q_det = 0.0;
  double q1_lo = 0.0;
  double mu_s_opt = 0.0;
  double mu_d1_opt = 0.0;
  Status status = Status::ZeroRate;
};

// Key rate vs fiber length for the single-photon source, one row per
// (curve, length), sorted by (theta, length).
std::vector<SweepRow> run_first_simulation(const RunConfig& cfg);

// Key rate vs fiber length for the coherent source with per-point intensity
// optimization, one row per (curve, length), sorted by (theta, length).
std::vector<SweepRow> run_second_simulation(const RunConfig& cfg);

// Header plus one delimited line per row, 12 significant digits.
std::string format_rows(const std::vector<SweepRow>& rows,
                        OutputFormat format);

// Writes the formatted table to cfg.out_path. Throws IoError with the path
// on failure; rejects empty row sets.
void emit(const std::vector<SweepRow>& rows, const RunConfig& cfg);

// Flat key-value configuration file with dotted sections, '#' comments.
// Unknown keys and malformed values raise ConfigError.
void apply_config_file(RunConfig& cfg, const std::string& path);

}  // namespace qkdrate
