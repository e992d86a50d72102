#include "qkdrate/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkdrate {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

double SystemParams::channel_transmittance() const {
  return std::pow(10.0, -attenuation_db_per_km * fiber_length_km / 10.0);
}

double SystemParams::overall_transmittance() const {
  return channel_transmittance() * eta_b / 2.0;
}

void SystemParams::validate() const {
  require(fiber_length_km >= 0.0, "SystemParams: negative fiber length");
  require(attenuation_db_per_km >= 0.0, "SystemParams: negative attenuation");
  require(eta_b > 0.0 && eta_b <= 1.0, "SystemParams: eta_b outside (0,1]");
  require(p_d >= 0.0 && p_d < 1.0, "SystemParams: p_d outside [0,1)");
  require(f_ec >= 1.0, "SystemParams: f_ec below 1");
  require(p_z > 0.0 && p_z < 1.0, "SystemParams: p_z outside (0,1)");
  require(p_s > 0.0 && p_s < 1.0, "SystemParams: p_s outside (0,1)");
  const double eta = overall_transmittance();
  require(eta > 0.0 && eta <= 0.5, "SystemParams: transmittance outside (0,1/2]");
}

double FluctuationSpec::bloch_shrink() const {
  const double sigma = phase_sigma();
  return std::exp(-sigma * sigma / 2.0);
}

void FluctuationSpec::validate() const {
  require(theta_halfwidth >= 0.0, "FluctuationSpec: negative phase half-width");
  require(intensity_pct >= 0.0, "FluctuationSpec: negative intensity percent");
  require(sigma_divisor > 0.0, "FluctuationSpec: sigma divisor must be > 0");
  require(delta_theta >= 0.0 && delta_theta < 1.0,
          "FluctuationSpec: delta_theta outside [0,1)");
  require(delta_mu >= 0.0 && delta_mu < 1.0,
          "FluctuationSpec: delta_mu outside [0,1)");
}

PulseMap<IntensityRange> MeanIntensities::ranges(double intensity_pct) const {
  return {IntensityRange::centered_pct(mu_s_bar, intensity_pct),
          IntensityRange::centered_pct(mu_d1_bar, intensity_pct),
          IntensityRange::centered_pct(mu_d2_bar, intensity_pct)};
}

bool MeanIntensities::feasible(double mu_s, double mu_d1, double mu_d2,
                               double intensity_pct) {
  if (!(mu_s > mu_d1 && mu_d1 > mu_d2 && mu_d2 >= 0.0)) return false;
  const double w_lo = 1.0 - 0.01 * intensity_pct;
  const double w_hi = 1.0 + 0.01 * intensity_pct;
  if (w_lo <= 0.0) return false;
  if (!(w_hi * mu_s <= 1.0)) return false;
  if (!(w_lo * mu_d1 > w_hi * mu_d2)) return false;
  if (!(w_lo * mu_s > w_hi * mu_d1 + w_lo * mu_d2)) return false;
  return true;
}

void MeanIntensities::validate(double intensity_pct) const {
  require(feasible(mu_s_bar, mu_d1_bar, mu_d2_bar, intensity_pct),
          "MeanIntensities: widened ranges violate the intensity orderings");
}

BlochVector effective_bloch(Setting c, const FluctuationSpec& fluct) {
  const double r = fluct.bloch_shrink();
  switch (c) {
    case Setting::Z0: return BlochVector{0.0, 0.0, r};
    case Setting::Z1: return BlochVector{0.0, 0.0, -r};
    case Setting::X0: return BlochVector{r, 0.0, 0.0};
  }
  throw std::invalid_argument("effective_bloch: bad setting");
}

double detection_prob(int b, Setting c, Basis basis,
                      const FluctuationSpec& fluct) {
  require(b == 0 || b == 1, "detection_prob: outcome not 0/1");
  const BlochVector v = effective_bloch(c, fluct);
  const double component = basis == Basis::Z ? v.z : v.x;
  return 0.5 * (1.0 + (b == 0 ? component : -component));
}

SinglePhotonRates single_photon_rates(const SystemParams& params,
                                      const FluctuationSpec& fluct) {
  params.validate();
  fluct.validate();
  const double eta = params.overall_transmittance();
  const double p_d = params.p_d;
  // Double clicks are split half-half between the outcomes; their total
  // weight does not depend on the state.
  const double dark_single = (1.0 - eta) * p_d * (1.0 - p_d);
  const double double_click =
      0.5 * (eta * p_d + (1.0 - eta) * p_d * p_d);

  SinglePhotonRates out;
  for (Setting c : kSettings) {
    for (Basis w : {Basis::Z, Basis::X}) {
      for (int b = 0; b < 2; ++b) {
        const double pr = detection_prob(b, c, w, fluct);
        out.q[index(c)][index(w)][b] =
            eta * pr * (1.0 - p_d) + dark_single + double_click;
      }
    }
  }
  out.q_det_zz = 1.0 - (1.0 - p_d) * (1.0 - p_d) * (1.0 - eta);
  out.e_z = (0.5 * out.rate(Setting::Z0, Basis::Z, 1) +
             0.5 * out.rate(Setting::Z1, Basis::Z, 0)) /
            out.q_det_zz;
  return out;
}

double gaussian_expectation(double mean, double sigma, double coef) {
  require(sigma >= 0.0, "gaussian_expectation: negative sigma");
  return std::exp(coef * mean + coef * coef * sigma * sigma / 2.0);
}

namespace {

// E over the intensity distribution of the probability that Bob's outcome is
// b: the click/no-click product expands into moment-generating-function
// terms with exponents -Pr[b] eta, -Pr[not b] eta and -eta.
double coherent_outcome_rate(int b, Setting c, Basis w, double mu_bar,
                             double sigma, double eta, double p_d,
                             const FluctuationSpec& fluct) {
  const double pr_b = detection_prob(b, c, w, fluct);
  const double pr_bbar = detection_prob(1 - b, c, w, fluct);
  const double nd = 1.0 - p_d;
  const double raw =
      0.5 + 0.5 * nd * gaussian_expectation(mu_bar, sigma, -pr_bbar * eta) -
      0.5 * nd * gaussian_expectation(mu_bar, sigma, -pr_b * eta) -
      0.5 * nd * nd * gaussian_expectation(mu_bar, sigma, -eta);
  // Roundoff in the cancelling exponentials can leave a hair outside [0,1].
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace

CoherentRates coherent_rates(const SystemParams& params,
                             const FluctuationSpec& fluct,
                             const MeanIntensities& mus) {
  params.validate();
  fluct.validate();
  mus.validate(fluct.intensity_pct);

  const double eta = params.overall_transmittance();
  const double p_d = params.p_d;
  const double nd = 1.0 - p_d;
  const PulseMap<double> bars = mus.bars();

  CoherentRates out;
  for (Pulse k : kPulses) {
    const double mu_bar = bars[index(k)];
    const double sigma = fluct.intensity_sigma(mu_bar);
    out.obs.q_det_zz[index(k)] =
        1.0 - nd * nd * gaussian_expectation(mu_bar, sigma, -eta);
    for (Setting c : kSettings) {
      for (int b = 0; b < 2; ++b) {
        out.obs.q(c, b, k) = coherent_outcome_rate(b, c, Basis::X, mu_bar,
                                                   sigma, eta, p_d, fluct);
      }
    }
  }

  const double mu_s = bars[index(Pulse::Signal)];
  const double sigma_s = fluct.intensity_sigma(mu_s);
  out.q_1_0z_z_s = coherent_outcome_rate(1, Setting::Z0, Basis::Z, mu_s,
                                         sigma_s, eta, p_d, fluct);
  out.q_0_1z_z_s = coherent_outcome_rate(0, Setting::Z1, Basis::Z, mu_s,
                                         sigma_s, eta, p_d, fluct);
  out.e_z = (0.5 * out.q_1_0z_z_s + 0.5 * out.q_0_1z_z_s) /
            out.obs.q_det(Pulse::Signal);
  out.obs.validate();
  return out;
}

}  // namespace qkdrate
