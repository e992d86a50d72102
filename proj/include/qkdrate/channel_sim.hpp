#pragma once

#include "qkdrate/decoy_bounds.hpp"
#include "qkdrate/settings.hpp"
#include "qkdrate/source_model.hpp"

namespace qkdrate {

/// Fiber-system parameters. The overall single-photon transmittance is
/// eta = eta_ch * eta_b / 2: channel loss times detector efficiency times
/// the 1/2 of the receiving interferometer.
struct SystemParams {
  double fiber_length_km = 0.0;
  double attenuation_db_per_km = 0.2;
  double eta_b = 0.15;  // detector efficiency
  double p_d = 5e-7;    // dark count probability per detector per pulse
  double f_ec = 1.22;   // error-correction inefficiency
  double p_z = 2.0 / 3.0;
  double p_s = 1.0 / 3.0;

  double channel_transmittance() const;
  double overall_transmittance() const;
  void validate() const;
};

/// Width of the source fluctuations: the phase wanders at most
/// +-theta_halfwidth and the intensity at most +-intensity_pct percent.
/// The Gaussian models behind the observed rates use standard deviation
/// (half-width)/sigma_divisor; the 5.33 convention leaves ~1e-7 of the mass
/// outside the interval, matching the default confidence defects.
struct FluctuationSpec {
  double theta_halfwidth = 0.0;  // radians
  double intensity_pct = 0.0;    // percent
  double sigma_divisor = 5.33;
  double delta_theta = 1e-7;
  double delta_mu = 1e-7;

  double phase_sigma() const { return theta_halfwidth / sigma_divisor; }
  // Shrink factor of the averaged Bloch vector under Gaussian phase jitter.
  double bloch_shrink() const;
  double intensity_sigma(double mu_bar) const {
    return 0.01 * intensity_pct * mu_bar / sigma_divisor;
  }
  void validate() const;
};

// Mean photon numbers of the three intensity settings.
struct MeanIntensities {
  double mu_s_bar = 0.5;
  double mu_d1_bar = 0.1;
  double mu_d2_bar = 2e-4;

  PulseMap<double> bars() const { return {mu_s_bar, mu_d1_bar, mu_d2_bar}; }
  PulseMap<IntensityRange> ranges(double intensity_pct) const;
  // Strict ordering of the means and the widened-interval orderings the
  // decoy bounds need; throws when violated.
  void validate(double intensity_pct) const;
  static bool feasible(double mu_s_bar, double mu_d1_bar, double mu_d2_bar,
                       double intensity_pct);
};

// Bloch vector of the averaged sending state for setting c: length
// bloch_shrink() along +Z, -Z or +X.
BlochVector effective_bloch(Setting c, const FluctuationSpec& fluct);

// Probability that a lossless measurement of the averaged state for setting
// c in the given basis yields bit b. Detector misalignment, which this model
// omits, would enter here as a rotation of the measurement axis.
double detection_prob(int b, Setting c, Basis basis,
                      const FluctuationSpec& fluct);

/// Observable rates of the single-photon source: Q[c][basis][b] per
/// (setting, measurement basis, outcome), the Z-basis gain and the bit
/// error rate.
struct SinglePhotonRates {
  SettingMap<std::array<std::array<double, 2>, 2>> q{};  // [c][basis][b]
  double q_det_zz = 0.0;
  double e_z = 0.0;

  double rate(Setting c, Basis w, int b) const {
    return q[index(c)][index(w)][b];
  }
};

// Per-outcome click rates for a single-photon source: photon click, dark
// count click, and half-weighted double clicks.
SinglePhotonRates single_photon_rates(const SystemParams& params,
                                      const FluctuationSpec& fluct);

// E[e^{coef*mu}] for mu ~ N(mean, sigma^2): exp(coef*mean + coef^2 sigma^2/2).
double gaussian_expectation(double mean, double sigma, double coef);

struct CoherentRates {
  ObservedRates obs;
  double q_1_0z_z_s = 0.0;  // Q_{1|0_Z, Z, s}
  double q_0_1z_z_s = 0.0;  // Q_{0|1_Z, Z, s}
  double e_z = 0.0;
};

// Observable rates of the phase-randomized coherent source with Gaussian
// phase and intensity fluctuations. All Gaussian integrals reduce to
// moment-generating-function terms because the integrands are linear
// combinations of exponentials linear in the intensity.
CoherentRates coherent_rates(const SystemParams& params,
                             const FluctuationSpec& fluct,
                             const MeanIntensities& mus);

}  // namespace qkdrate
