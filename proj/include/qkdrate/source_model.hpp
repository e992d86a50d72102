#pragma once

#include <utility>

#include "qkdrate/settings.hpp"

namespace qkdrate {

// Default tolerance for floating-point invariant checks.
inline constexpr double kDefaultTolerance = 1e-12;

// Closed phase interval [lo, hi] in radians. Narrower than pi so that the
// three settings' intervals can be pairwise disjoint.
struct PhaseRange {
  double lo;
  double hi;

  PhaseRange(double lo_rad, double hi_rad);

  static PhaseRange centered(double center, double halfwidth);

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double theta) const { return lo <= theta && theta <= hi; }
  // Exact interval arithmetic, no tolerance.
  bool overlaps(const PhaseRange& other) const;
};

// Closed mean-photon-number interval [lo, hi], both nonnegative.
struct IntensityRange {
  double lo;
  double hi;

  IntensityRange(double lo_val, double hi_val);

  // Interval (1 - pct/100)*mean .. (1 + pct/100)*mean.
  static IntensityRange centered_pct(double mean, double pct);
};

/// Everything Alice certifies about her source before the protocol runs:
/// per-setting phase intervals, per-setting intensity intervals, and the
/// confidence defects delta_theta / delta_mu with which a pulse may escape
/// those intervals.
struct SourceCharacterization {
  SettingMap<PhaseRange> phase;
  PulseMap<IntensityRange> intensity;
  double delta_theta;
  double delta_mu;

  SourceCharacterization(SettingMap<PhaseRange> phase_ranges,
                         PulseMap<IntensityRange> intensity_ranges,
                         double delta_theta_val, double delta_mu_val);

  // Symmetric boxes around the nominal phases 0, pi, pi/2 and the supplied
  // mean intensities widened by +-pct percent.
  static SourceCharacterization symmetric(double theta_halfwidth,
                                          const PulseMap<double>& mu_bars,
                                          double intensity_pct,
                                          double delta_theta_val,
                                          double delta_mu_val);

  const PhaseRange& phase_range(Setting c) const { return phase[index(c)]; }
  const IntensityRange& intensity_range(Pulse k) const {
    return intensity[index(k)];
  }
};

// Protocol setting probabilities. Alice picks the Z basis with p_z and the
// signal / first-decoy intensities with p_s / p_d1; the rest follow.
struct ProtocolProbabilities {
  double p_z;
  double p_s;
  double p_d1;

  ProtocolProbabilities(double p_z_val, double p_s_val, double p_d1_val);

  double p_x() const { return 1.0 - p_z; }
  double p_d2() const { return 1.0 - p_s - p_d1; }
  double setting_prob(Setting c) const;
  double pulse_prob(Pulse k) const;
};

// Qubit state as a real 3-vector; pure states sit on the unit sphere.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
};

// Probability that a pulse falls outside the certified phase or intensity
// interval: 1 - (1 - delta_theta)(1 - delta_mu).
double tagging_probability(const SourceCharacterization& src);

// Bloch vector {sin(theta), 0, cos(theta)} of the single-photon qubit with
// relative phase theta.
BlochVector bloch_of_theta(double theta);

struct FilterResult {
  BlochVector state;
  double success_prob;
};

// Applies the two-outcome filter diag(q, 1-q) in the Y eigenbasis to a state
// on the X-Z plane. The output picks up a y-component (2q-1)/(1-2q+2q^2)
// that is independent of the input, the in-plane components shrink by
// f(q) = 2q(1-q)/(1-2q+2q^2), and the success probability q^2-q+1/2 is the
// same for every state on the plane. q = 1/2 is rejected: the filter
// degenerates to a scaled identity there.
FilterResult filter_transform(const BlochVector& v, double q,
                              double tolerance = kDefaultTolerance);

}  // namespace qkdrate
