#include "qkdrate/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace qkdrate {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string_view status_name(SweepRow::Status s) {
  switch (s) {
    case SweepRow::Status::Ok: return "ok";
    case SweepRow::Status::ZeroRate: return "zero-rate";
    case SweepRow::Status::Infeasible: return "infeasible";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Runs one task per row index on up to `workers` threads; each result lands
// in its own slot, so assembly order never depends on scheduling. The first
// exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
  const int n_threads =
      std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count && !failed.load();
           i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

FluctuationSpec make_fluct(const RunConfig& cfg, double theta_deg,
                           double x_pct, bool single_photon) {
  FluctuationSpec fluct;
  fluct.theta_halfwidth = theta_deg * kDegToRad;
  fluct.intensity_pct = single_photon ? 0.0 : x_pct;
  fluct.sigma_divisor = cfg.sigma_divisor;
  fluct.delta_theta = cfg.delta_theta;
  // A single-photon source has no intensity to drift.
  fluct.delta_mu = single_photon ? 0.0 : cfg.delta_mu;
  return fluct;
}

}  // namespace

std::vector<double> FiberRange::lengths() const {
  std::vector<double> out;
  const std::size_t count =
      step_km > 0.0
          ? static_cast<std::size_t>(
                std::floor((stop_km - start_km) / step_km + 1e-9)) +
                1
          : 0;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(start_km + static_cast<double>(i) * step_km);
  }
  return out;
}

void RunConfig::validate() const {
  if (!(fiber.step_km > 0.0)) throw ConfigError("fiber.step: must be > 0");
  if (!(fiber.stop_km >= fiber.start_km)) {
    throw ConfigError("fiber.stop: must be >= fiber.start");
  }
  if (fiber.start_km < 0.0) throw ConfigError("fiber.start: must be >= 0");
  if (fluctuations.empty()) {
    throw ConfigError("fluctuations: list must not be empty");
  }
  for (const auto& [theta_deg, x_pct] : fluctuations) {
    if (!(theta_deg >= 0.0 && theta_deg < 10.0)) {
      throw ConfigError("theta: entries must lie in [0, 10) degrees");
    }
    if (x_pct < 0.0 || x_pct >= 100.0) {
      throw ConfigError("x: entries must lie in [0, 100) percent");
    }
  }
  if (workers < 1) throw ConfigError("workers: must be >= 1");
  if (mu_d2_bar < 0.0) throw ConfigError("decoy.mu_d2_bar: must be >= 0");
  if (sigma_divisor <= 0.0) throw ConfigError("fluct.sigma_divisor: must be > 0");
  // Both sweep endpoints must give a valid system; the far end catches
  // transmittances that underflow to zero.
  for (const double length : {fiber.start_km, fiber.stop_km}) {
    try {
      SystemParams p = system;
      p.fiber_length_km = length;
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("system: ") + e.what());
    }
  }
}

std::vector<SweepRow> run_first_simulation(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<double> lengths = cfg.fiber.lengths();
  auto curves = cfg.fluctuations;
  std::sort(curves.begin(), curves.end());

  std::vector<SweepRow> rows(curves.size() * lengths.size());
  parallel_for(rows.size(), cfg.workers, [&](std::size_t idx) {
    const std::size_t ci = idx / lengths.size();
    const std::size_t li = idx % lengths.size();
    const double theta_deg = curves[ci].first;

    SystemParams params = cfg.system;
    params.fiber_length_km = lengths[li];
    const KeyRateResult res = single_photon_key_rate(
        params, make_fluct(cfg, theta_deg, 0.0, /*single_photon=*/true));

    SweepRow& row = rows[idx];
    row.fiber_length_km = lengths[li];
    row.theta_deg = theta_deg;
    row.x_pct = 0.0;
    row.rate = res.rate;
    row.e_z = res.e_z;
    row.e_x_upper = res.e_x_upper;
    row.q_det = res.q_det_zzs;
    row.q1_lo = res.q1_lo;
    row.status =
        res.rate > 0.0 ? SweepRow::Status::Ok : SweepRow::Status::ZeroRate;
  });
  return rows;
}

std::vector<SweepRow> run_second_simulation(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<double> lengths = cfg.fiber.lengths();
  auto curves = cfg.fluctuations;
  std::sort(curves.begin(), curves.end());

  std::vector<SweepRow> rows(curves.size() * lengths.size());
  parallel_for(rows.size(), cfg.workers, [&](std::size_t idx) {
    const std::size_t ci = idx / lengths.size();
    const std::size_t li = idx % lengths.size();
    const auto [theta_deg, x_pct] = curves[ci];

    SystemParams params = cfg.system;
    params.fiber_length_km = lengths[li];
    const OptimizationResult opt = optimize_intensities(
        params, make_fluct(cfg, theta_deg, x_pct, /*single_photon=*/false),
        cfg.mu_d2_bar, cfg.optimizer);

    SweepRow& row = rows[idx];
    row.fiber_length_km = lengths[li];
    row.theta_deg = theta_deg;
    row.x_pct = x_pct;
    if (!opt.feasible) {
      row.status = SweepRow::Status::Infeasible;
      return;
    }
    row.rate = opt.result.rate;
    row.e_z = opt.result.e_z;
    row.e_x_upper = opt.result.e_x_upper;
    row.q_det = opt.result.q_det_zzs;
    row.q1_lo = opt.result.q1_lo;
    row.mu_s_opt = opt.mus.mu_s_bar;
    row.mu_d1_opt = opt.mus.mu_d1_bar;
    row.status =
        opt.result.rate > 0.0 ? SweepRow::Status::Ok : SweepRow::Status::ZeroRate;
  });
  return rows;
}

std::string format_rows(const std::vector<SweepRow>& rows,
                        OutputFormat format) {
  const char sep = format == OutputFormat::Csv ? ',' : '\t';
  std::ostringstream out;
  const char* fields[] = {"fiber_length_km", "theta_deg", "x_pct",
                          "rate",            "e_Z",       "e_X_upper",
                          "q_det",           "q1_lo",     "mu_s_opt",
                          "mu_d1_opt",       "status"};
  for (std::size_t i = 0; i < std::size(fields); ++i) {
    if (i) out << sep;
    out << fields[i];
  }
  out << '\n';
  for (const SweepRow& r : rows) {
    out << format_number(r.fiber_length_km) << sep << format_number(r.theta_deg)
        << sep << format_number(r.x_pct) << sep << format_number(r.rate) << sep
        << format_number(r.e_z) << sep << format_number(r.e_x_upper) << sep
        << format_number(r.q_det) << sep << format_number(r.q1_lo) << sep
        << format_number(r.mu_s_opt) << sep << format_number(r.mu_d1_opt)
        << sep << status_name(r.status) << '\n';
  }
  return out.str();
}

void emit(const std::vector<SweepRow>& rows, const RunConfig& cfg) {
  if (rows.empty()) throw ConfigError("emit: no rows to write");
  if (cfg.out_path.empty()) throw ConfigError("out: output path is empty");
  std::ofstream file(cfg.out_path, std::ios::binary);
  if (!file) throw IoError("cannot open output file: " + cfg.out_path);
  file << format_rows(rows, cfg.format);
  file.flush();
  if (!file) throw IoError("write failed: " + cfg.out_path);
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: " + value);
  }
  if (pos != value.size()) throw ConfigError(key + ": trailing junk: " + value);
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) throw ConfigError(key + ": not an integer");
  return static_cast<int>(v);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "system.attenuation_db_per_km") {
      cfg.system.attenuation_db_per_km = parse_double(key, value);
    } else if (key == "system.eta_b") {
      cfg.system.eta_b = parse_double(key, value);
    } else if (key == "system.p_d") {
      cfg.system.p_d = parse_double(key, value);
    } else if (key == "system.f_ec") {
      cfg.system.f_ec = parse_double(key, value);
    } else if (key == "protocol.p_z") {
      cfg.system.p_z = parse_double(key, value);
    } else if (key == "protocol.p_s") {
      cfg.system.p_s = parse_double(key, value);
    } else if (key == "decoy.mu_d2_bar") {
      cfg.mu_d2_bar = parse_double(key, value);
    } else if (key == "fluct.sigma_divisor") {
      cfg.sigma_divisor = parse_double(key, value);
    } else if (key == "fluct.delta_theta") {
      cfg.delta_theta = parse_double(key, value);
    } else if (key == "fluct.delta_mu") {
      cfg.delta_mu = parse_double(key, value);
    } else if (key == "optimizer.coarse_grid") {
      cfg.optimizer.coarse_grid = parse_int(key, value);
    } else if (key == "optimizer.refine_resolution") {
      cfg.optimizer.refine_resolution = parse_double(key, value);
    } else if (key == "optimizer.mu_s_min") {
      cfg.optimizer.mu_s_min = parse_double(key, value);
    } else if (key == "sweep.workers") {
      cfg.workers = parse_int(key, value);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
}

}  // namespace qkdrate
