#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qkdrate/settings.hpp"
#include "qkdrate/source_model.hpp"

namespace qkdrate {

/// The experimentally available statistics: Z-basis gains per intensity
/// setting and the per-outcome X-basis rates for every (setting, bit,
/// intensity) combination.
struct ObservedRates {
  PulseMap<double> q_det_zz{};                       // gain, both chose Z
  SettingMap<std::array<PulseMap<double>, 2>> q_bcx{};  // [c][b][k], Bob in X

  double q_det(Pulse k) const { return q_det_zz[index(k)]; }
  double q(Setting c, int b, Pulse k) const {
    return q_bcx[index(c)][b][index(k)];
  }
  double& q(Setting c, int b, Pulse k) {
    return q_bcx[index(c)][b][index(k)];
  }

  // Entries in [0,1] and q(c,0,k) + q(c,1,k) <= 1; throws otherwise.
  void validate() const;
};

// Certified interval for a yield fraction, 0 <= lo <= hi <= 1.
struct YieldInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Output of the decoy estimator: certified bounds on the untagged
/// single-photon and vacuum yields, for the Z-basis gain and for every
/// X-basis (setting, bit) rate.
struct DecoyBounds {
  double y1_det_zz_lo = 0.0;   // untagged single-photon Z yield, lower
  double y0_det_zz_lo = 0.0;   // untagged vacuum Z yield, lower
  double q1_det_zzs_lo = 0.0;  // untagged single-photon signal gain, lower
  SettingMap<std::array<YieldInterval, 2>> y1_bcx{};  // [c][b]
  SettingMap<std::array<double, 2>> y0_bcx_lo{};      // [c][b]
  std::vector<std::string> notes;  // diagnostics for pathological inputs
};

// Bounds on the untagged fraction of an observed rate q when a pulse is
// tagged with probability p_t:
//   max((q - p_t)/(1 - p_t), 0) <= q_untagged <= min(q/(1 - p_t), 1).
std::pair<double, double> tagged_sandwich(double q, double p_t);

// Lower bound on the untagged vacuum yield from the two decoy rates.
// Requires mu_d1.lo > mu_d2.hi.
double y0_lower(double q_d1, double q_d2, const PulseMap<IntensityRange>& mu,
                double p_t);

// Three-intensity lower bound on the untagged single-photon yield, clamped
// to [0,1]. Requires mu_s.lo > mu_d1.hi + mu_d2.lo and mu_d1.hi > mu_d2.lo.
double y1_lower(double q_s, double q_d1, double q_d2,
                const PulseMap<IntensityRange>& mu, double p_t, double y0_lo);

// Upper bound on the untagged single-photon yield from the two decoy rates,
// clamped to [0,1]. Requires mu_d1.lo > mu_d2.hi.
double y1_upper(double q_d1, double q_d2, const PulseMap<IntensityRange>& mu,
                double p_t);

// (1 - p_t) * mu_s.lo * exp(-mu_s.lo) * y1_lo: lower bound on the gain
// fraction coming from untagged single-photon signal pulses.
double q1_signal_lower(double y1_lo, const IntensityRange& mu_s, double p_t);

// Runs the full estimator over all observed rates.
DecoyBounds estimate(const ObservedRates& obs,
                     const SourceCharacterization& src);

}  // namespace qkdrate
