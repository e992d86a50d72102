#include "qkdrate/source_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qkdrate {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

PhaseRange::PhaseRange(double lo_rad, double hi_rad) : lo(lo_rad), hi(hi_rad) {
  require(std::isfinite(lo) && std::isfinite(hi), "PhaseRange: non-finite");
  require(lo <= hi, "PhaseRange: lo > hi");
  require(hi - lo < std::numbers::pi, "PhaseRange: width must be below pi");
}

PhaseRange PhaseRange::centered(double center, double halfwidth) {
  return PhaseRange(center - halfwidth, center + halfwidth);
}

bool PhaseRange::overlaps(const PhaseRange& other) const {
  return lo <= other.hi && other.lo <= hi;
}

IntensityRange::IntensityRange(double lo_val, double hi_val)
    : lo(lo_val), hi(hi_val) {
  require(std::isfinite(lo) && std::isfinite(hi), "IntensityRange: non-finite");
  require(0.0 <= lo, "IntensityRange: lo < 0");
  require(lo <= hi, "IntensityRange: lo > hi");
}

IntensityRange IntensityRange::centered_pct(double mean, double pct) {
  return IntensityRange((1.0 - 0.01 * pct) * mean, (1.0 + 0.01 * pct) * mean);
}

SourceCharacterization::SourceCharacterization(
    SettingMap<PhaseRange> phase_ranges, PulseMap<IntensityRange> intensity_ranges,
    double delta_theta_val, double delta_mu_val)
    : phase(std::move(phase_ranges)),
      intensity(std::move(intensity_ranges)),
      delta_theta(delta_theta_val),
      delta_mu(delta_mu_val) {
  for (std::size_t i = 0; i < phase.size(); ++i) {
    for (std::size_t j = i + 1; j < phase.size(); ++j) {
      require(!phase[i].overlaps(phase[j]),
              "SourceCharacterization: phase ranges overlap");
    }
  }
  const IntensityRange& s = intensity[index(Pulse::Signal)];
  const IntensityRange& d1 = intensity[index(Pulse::Decoy1)];
  const IntensityRange& d2 = intensity[index(Pulse::Decoy2)];
  require(s.hi <= 1.0, "SourceCharacterization: mu_s upper must be <= 1");
  require(d1.lo > d2.hi, "SourceCharacterization: need mu_d1 low > mu_d2 high");
  require(s.lo > d1.hi + d2.lo,
          "SourceCharacterization: need mu_s low > mu_d1 high + mu_d2 low");
  require(0.0 <= delta_theta && delta_theta < 1.0,
          "SourceCharacterization: delta_theta outside [0,1)");
  require(0.0 <= delta_mu && delta_mu < 1.0,
          "SourceCharacterization: delta_mu outside [0,1)");
}

SourceCharacterization SourceCharacterization::symmetric(
    double theta_halfwidth, const PulseMap<double>& mu_bars,
    double intensity_pct, double delta_theta_val, double delta_mu_val) {
  const double half_pi = std::numbers::pi / 2.0;
  SettingMap<PhaseRange> phases{
      PhaseRange::centered(0.0, theta_halfwidth),
      PhaseRange::centered(std::numbers::pi, theta_halfwidth),
      PhaseRange::centered(half_pi, theta_halfwidth)};
  PulseMap<IntensityRange> mus{
      IntensityRange::centered_pct(mu_bars[0], intensity_pct),
      IntensityRange::centered_pct(mu_bars[1], intensity_pct),
      IntensityRange::centered_pct(mu_bars[2], intensity_pct)};
  return SourceCharacterization(phases, mus, delta_theta_val, delta_mu_val);
}

ProtocolProbabilities::ProtocolProbabilities(double p_z_val, double p_s_val,
                                             double p_d1_val)
    : p_z(p_z_val), p_s(p_s_val), p_d1(p_d1_val) {
  require(0.0 < p_z && p_z < 1.0, "ProtocolProbabilities: p_z outside (0,1)");
  require(0.0 < p_s && p_s < 1.0, "ProtocolProbabilities: p_s outside (0,1)");
  require(0.0 < p_d1 && p_d1 < 1.0,
          "ProtocolProbabilities: p_d1 outside (0,1)");
  require(p_s + p_d1 < 1.0, "ProtocolProbabilities: p_s + p_d1 must be < 1");
}

double ProtocolProbabilities::setting_prob(Setting c) const {
  switch (c) {
    case Setting::Z0:
    case Setting::Z1:
      return p_z / 2.0;
    case Setting::X0:
      return p_x();
  }
  return 0.0;
}

double ProtocolProbabilities::pulse_prob(Pulse k) const {
  switch (k) {
    case Pulse::Signal: return p_s;
    case Pulse::Decoy1: return p_d1;
    case Pulse::Decoy2: return p_d2();
  }
  return 0.0;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double tagging_probability(const SourceCharacterization& src) {
  return 1.0 - (1.0 - src.delta_theta) * (1.0 - src.delta_mu);
}

BlochVector bloch_of_theta(double theta) {
  return BlochVector{std::sin(theta), 0.0, std::cos(theta)};
}

FilterResult filter_transform(const BlochVector& v, double q,
                              double tolerance) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("filter_transform: q outside [0,1]");
  }
  if (q == 0.5) {
    throw std::invalid_argument(
        "filter_transform: q = 1/2 degenerates to a scaled identity");
  }
  if (std::abs(v.y) > tolerance) {
    throw std::invalid_argument(
        "filter_transform: input must lie on the X-Z plane");
  }
  const double den = 1.0 - 2.0 * q + 2.0 * q * q;  // equals twice the
                                                   // success probability
  const double shrink = 2.0 * (1.0 - q) * q / den;
  const double lift = (2.0 * q - 1.0) / den;
  return FilterResult{BlochVector{shrink * v.x, lift, shrink * v.z},
                      q * q - q + 0.5};
}

}  // namespace qkdrate
