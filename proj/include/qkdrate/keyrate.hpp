#pragma once

#include <map>
#include <optional>
#include <string>

#include "qkdrate/channel_sim.hpp"
#include "qkdrate/decoy_bounds.hpp"
#include "qkdrate/virtual_bounds.hpp"

namespace qkdrate {

// -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0. Rejects x outside [0,1].
double binary_entropy(double x);

struct PhaseErrorBound {
  double value = 0.5;    // clamped into [0, 1/2]
  bool vacuous = false;  // denominator <= 0 or raw ratio above 1/2
};

// Upper bound on the phase error rate of the untagged single-photon signal
// events: (Y^+_{0,1|vir} + Y^+_{1,0|vir}) / Y^-_{det|Z,Z,1}.
PhaseErrorBound phase_error_upper(const DecoyBounds& db,
                                  const GCoefficients& g);

// Same bound assembled from raw interval tables; used by the single-photon
// pipeline, which has no decoy structure.
PhaseErrorBound phase_error_from_parts(
    const SettingMap<std::array<YieldInterval, 2>>& y1, double y_det_lo,
    const GCoefficients& g);

/// Final certified result for one parameter point.
struct KeyRateResult {
  double rate = 0.0;       // secret bits per pulse, clamped at 0
  double e_x_upper = 0.5;
  double e_z = 0.5;
  double q_det_zzs = 0.0;
  double q1_lo = 0.0;
  std::optional<MeanIntensities> intensities;  // empty for the
                                               // single-photon source
  std::map<std::string, double> diagnostics;
};

// Decoy-pipeline rate: max(0, p_z^2 p_s { q1_lo (1 - h(e_x_up))
//                                         - q_det_zzs f_ec h(e_z) }).
KeyRateResult key_rate(const SystemParams& params, double q_det_zzs,
                       double q1_lo, double e_x_up, double e_z);

// Full certification for the single-photon source: tag-sandwiched yields,
// coefficient bounds, and the p_z^2-prefactor rate (no intensity settings).
KeyRateResult single_photon_key_rate(const SystemParams& params,
                                     const FluctuationSpec& fluct);

// Full certification for the coherent source at fixed mean intensities:
// simulated rates -> decoy bounds -> phase error bound -> rate.
KeyRateResult coherent_key_rate(const SystemParams& params,
                                const FluctuationSpec& fluct,
                                const MeanIntensities& mus);

struct OptimizerSettings {
  int coarse_grid = 40;            // points per axis in the first pass
  double refine_resolution = 1e-4;
  double mu_s_min = 0.05;
};

struct OptimizationResult {
  MeanIntensities mus;
  KeyRateResult result;
  bool feasible = false;  // false when no intensity pair satisfies the
                          // interval orderings
};

// Maximizes the coherent-source rate over (mu_s_bar, mu_d1_bar) with the
// weakest decoy fixed: coarse grid then coordinate refinement. Deterministic
// for a fixed configuration. Grid points whose widened intervals violate the
// decoy orderings are skipped, not fatal.
OptimizationResult optimize_intensities(const SystemParams& params,
                                        const FluctuationSpec& fluct,
                                        double mu_d2_bar,
                                        const OptimizerSettings& opt = {});

}  // namespace qkdrate
