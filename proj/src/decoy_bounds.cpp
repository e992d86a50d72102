#include "qkdrate/decoy_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkdrate {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void check_fraction(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " outside [0,1]");
  }
}

}  // namespace

void ObservedRates::validate() const {
  for (Pulse k : kPulses) check_fraction(q_det(k), "ObservedRates: gain");
  for (Setting c : kSettings) {
    for (Pulse k : kPulses) {
      const double q0 = q(c, 0, k);
      const double q1 = q(c, 1, k);
      check_fraction(q0, "ObservedRates: rate");
      check_fraction(q1, "ObservedRates: rate");
      if (q0 + q1 > 1.0) {
        throw std::invalid_argument(
            "ObservedRates: outcome rates exceed 1 for one setting");
      }
    }
  }
}

std::pair<double, double> tagged_sandwich(double q, double p_t) {
  check_fraction(q, "tagged_sandwich: q");
  if (!(p_t >= 0.0 && p_t < 1.0)) {
    throw std::invalid_argument("tagged_sandwich: p_t outside [0,1)");
  }
  const double lo = std::max((q - p_t) / (1.0 - p_t), 0.0);
  const double hi = std::min(q / (1.0 - p_t), 1.0);
  return {lo, hi};
}

double y0_lower(double q_d1, double q_d2, const PulseMap<IntensityRange>& mu,
                double p_t) {
  const IntensityRange& d1 = mu[index(Pulse::Decoy1)];
  const IntensityRange& d2 = mu[index(Pulse::Decoy2)];
  if (!(d1.lo > d2.hi)) {
    throw std::invalid_argument("y0_lower: need mu_d1 low > mu_d2 high");
  }
  const double num = d1.lo * (q_d2 - p_t) * std::exp(d2.lo) -
                     d2.hi * q_d1 * std::exp(d1.hi);
  const double raw = num / ((1.0 - p_t) * (d1.lo - d2.hi));
  return clamp01(std::max(raw, 0.0));
}

double y1_lower(double q_s, double q_d1, double q_d2,
                const PulseMap<IntensityRange>& mu, double p_t, double y0_lo) {
  const IntensityRange& s = mu[index(Pulse::Signal)];
  const IntensityRange& d1 = mu[index(Pulse::Decoy1)];
  const IntensityRange& d2 = mu[index(Pulse::Decoy2)];
  if (!(s.lo > d1.hi + d2.lo)) {
    throw std::invalid_argument(
        "y1_lower: need mu_s low > mu_d1 high + mu_d2 low");
  }
  if (!(d1.hi > d2.lo)) {
    throw std::invalid_argument("y1_lower: need mu_d1 high > mu_d2 low");
  }
  const double prefactor =
      s.lo / ((s.lo - d1.hi - d2.lo) * (d1.hi - d2.lo));
  const double decoy_diff =
      ((q_d1 - p_t) * std::exp(d1.lo) - q_d2 * std::exp(d2.hi)) / (1.0 - p_t);
  const double multi_photon =
      (d1.hi * d1.hi - d2.lo * d2.lo) / (s.lo * s.lo) *
      (q_s * std::exp(s.hi) / (1.0 - p_t) - y0_lo);
  return clamp01(prefactor * (decoy_diff - multi_photon));
}

double y1_upper(double q_d1, double q_d2, const PulseMap<IntensityRange>& mu,
                double p_t) {
  const IntensityRange& d1 = mu[index(Pulse::Decoy1)];
  const IntensityRange& d2 = mu[index(Pulse::Decoy2)];
  if (!(d1.lo > d2.hi)) {
    throw std::invalid_argument("y1_upper: need mu_d1 low > mu_d2 high");
  }
  const double raw = (q_d1 * std::exp(d1.hi) - (q_d2 - p_t) * std::exp(d2.lo)) /
                     ((1.0 - p_t) * (d1.lo - d2.hi));
  return clamp01(raw);
}

double q1_signal_lower(double y1_lo, const IntensityRange& mu_s, double p_t) {
  return (1.0 - p_t) * mu_s.lo * std::exp(-mu_s.lo) * y1_lo;
}

DecoyBounds estimate(const ObservedRates& obs,
                     const SourceCharacterization& src) {
  obs.validate();
  const double p_t = tagging_probability(src);
  const PulseMap<IntensityRange>& mu = src.intensity;

  DecoyBounds out;
  out.y0_det_zz_lo = y0_lower(obs.q_det(Pulse::Decoy1),
                              obs.q_det(Pulse::Decoy2), mu, p_t);
  out.y1_det_zz_lo =
      y1_lower(obs.q_det(Pulse::Signal), obs.q_det(Pulse::Decoy1),
               obs.q_det(Pulse::Decoy2), mu, p_t, out.y0_det_zz_lo);
  out.q1_det_zzs_lo = q1_signal_lower(
      out.y1_det_zz_lo, src.intensity_range(Pulse::Signal), p_t);

  for (Setting c : kSettings) {
    for (int b = 0; b < 2; ++b) {
      const double q_s = obs.q(c, b, Pulse::Signal);
      const double q_d1 = obs.q(c, b, Pulse::Decoy1);
      const double q_d2 = obs.q(c, b, Pulse::Decoy2);
      const double y0 = y0_lower(q_d1, q_d2, mu, p_t);
      double lo = y1_lower(q_s, q_d1, q_d2, mu, p_t, y0);
      const double hi = y1_upper(q_d1, q_d2, mu, p_t);
      if (lo > hi) {
        // Pathological inputs can cross the endpoints after clamping; keep
        // the arithmetic total and flag the data.
        out.notes.push_back(std::string("yield interval crossed for ") +
                            std::string(name(c)) + ", bit " +
                            std::to_string(b));
        lo = hi;
      }
      out.y0_bcx_lo[index(c)][b] = y0;
      out.y1_bcx[index(c)][b] = YieldInterval{lo, hi};
    }
  }
  return out;
}

}  // namespace qkdrate
