#include "qkdrate/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkdrate {

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("binary_entropy: argument outside [0,1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

PhaseErrorBound phase_error_from_parts(
    const SettingMap<std::array<YieldInterval, 2>>& y1, double y_det_lo,
    const GCoefficients& g) {
  if (!(y_det_lo > 0.0)) return PhaseErrorBound{0.5, true};
  const double numerator = y_vir_upper(g, 0, 1, y1) + y_vir_upper(g, 1, 0, y1);
  const double ratio = numerator / y_det_lo;
  return PhaseErrorBound{std::min(ratio, 0.5), ratio > 0.5};
}

PhaseErrorBound phase_error_upper(const DecoyBounds& db,
                                  const GCoefficients& g) {
  return phase_error_from_parts(db.y1_bcx, db.y1_det_zz_lo, g);
}

KeyRateResult key_rate(const SystemParams& params, double q_det_zzs,
                       double q1_lo, double e_x_up, double e_z) {
  KeyRateResult out;
  out.e_x_upper = e_x_up;
  out.e_z = e_z;
  out.q_det_zzs = q_det_zzs;
  out.q1_lo = q1_lo;
  const double raw =
      params.p_z * params.p_z * params.p_s *
      (q1_lo * (1.0 - binary_entropy(e_x_up)) -
       q_det_zzs * params.f_ec * binary_entropy(e_z));
  out.rate = std::max(raw, 0.0);
  return out;
}

KeyRateResult single_photon_key_rate(const SystemParams& params,
                                     const FluctuationSpec& fluct) {
  // Single-photon source: no intensity fluctuation, so only the phase defect
  // can tag a pulse.
  const double p_t = fluct.delta_theta;
  const SinglePhotonRates rates = single_photon_rates(params, fluct);

  const double q_u_lo = std::max(rates.q_det_zz - p_t, 0.0);
  const double y_det_lo = q_u_lo / (1.0 - p_t);

  SettingMap<std::array<YieldInterval, 2>> y1{};
  for (Setting c : kSettings) {
    for (int b = 0; b < 2; ++b) {
      const auto [lo, hi] = tagged_sandwich(rates.rate(c, Basis::X, b), p_t);
      y1[index(c)][b] = YieldInterval{lo, hi};
    }
  }

  const GCoefficients g = g_upper_bounds(fluct.theta_halfwidth);
  const PhaseErrorBound ex = phase_error_from_parts(y1, y_det_lo, g);
  const double e_z = std::clamp(rates.e_z, 0.0, 0.5);

  KeyRateResult out;
  out.e_x_upper = ex.value;
  out.e_z = e_z;
  out.q_det_zzs = rates.q_det_zz;
  out.q1_lo = q_u_lo;
  const double raw = params.p_z * params.p_z *
                     (q_u_lo * (1.0 - binary_entropy(ex.value)) -
                      rates.q_det_zz * params.f_ec * binary_entropy(e_z));
  out.rate = std::max(raw, 0.0);
  out.diagnostics = {{"p_t", p_t},
                     {"eta", params.overall_transmittance()},
                     {"r", fluct.bloch_shrink()},
                     {"y_det_zz_u_lo", y_det_lo},
                     {"e_x_vacuous", ex.vacuous ? 1.0 : 0.0}};
  return out;
}

KeyRateResult coherent_key_rate(const SystemParams& params,
                                const FluctuationSpec& fluct,
                                const MeanIntensities& mus) {
  const CoherentRates rates = coherent_rates(params, fluct, mus);
  const SourceCharacterization src = SourceCharacterization::symmetric(
      fluct.theta_halfwidth, mus.bars(), fluct.intensity_pct,
      fluct.delta_theta, fluct.delta_mu);

  const DecoyBounds db = estimate(rates.obs, src);
  const GCoefficients g = g_upper_bounds(fluct.theta_halfwidth);
  const PhaseErrorBound ex = phase_error_upper(db, g);
  const double e_z = std::clamp(rates.e_z, 0.0, 0.5);

  KeyRateResult out = key_rate(params, rates.obs.q_det(Pulse::Signal),
                               db.q1_det_zzs_lo, ex.value, e_z);
  out.intensities = mus;
  out.diagnostics = {{"p_t", tagging_probability(src)},
                     {"eta", params.overall_transmittance()},
                     {"y1_det_zz_lo", db.y1_det_zz_lo},
                     {"y0_det_zz_lo", db.y0_det_zz_lo},
                     {"y_vir_01_up", y_vir_upper(g, 0, 1, db.y1_bcx)},
                     {"y_vir_10_up", y_vir_upper(g, 1, 0, db.y1_bcx)},
                     {"e_x_vacuous", ex.vacuous ? 1.0 : 0.0}};
  return out;
}

namespace {

struct SearchBox {
  double mu_s_lo = 0.0;
  double mu_s_hi = 0.0;
  bool empty = true;
};

SearchBox signal_search_box(double mu_d2_bar, double intensity_pct,
                            const OptimizerSettings& opt) {
  SearchBox box;
  const double w_hi = 1.0 + 0.01 * intensity_pct;
  box.mu_s_lo = opt.mu_s_min;
  box.mu_s_hi = 1.0 / w_hi;
  box.empty = !(box.mu_s_lo < box.mu_s_hi) || mu_d2_bar < 0.0;
  return box;
}

// Feasible first-decoy means for a given signal mean; may be empty.
bool d1_interval(double mu_s, double mu_d2, double intensity_pct,
                 double& d1_lo, double& d1_hi) {
  const double w_lo = 1.0 - 0.01 * intensity_pct;
  const double w_hi = 1.0 + 0.01 * intensity_pct;
  if (w_lo <= 0.0) return false;
  d1_lo = mu_d2 * w_hi / w_lo;
  d1_hi = std::min((w_lo * mu_s - w_lo * mu_d2) / w_hi, mu_s);
  // Nudge off the open endpoints so strict orderings hold.
  const double pad = 1e-9 + 1e-6 * (d1_hi - d1_lo);
  d1_lo += pad;
  d1_hi -= pad;
  return d1_lo < d1_hi && d1_lo > mu_d2;
}

double grid_point(double lo, double hi, int i, int n) {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

OptimizationResult optimize_intensities(const SystemParams& params,
                                        const FluctuationSpec& fluct,
                                        double mu_d2_bar,
                                        const OptimizerSettings& opt) {
  params.validate();
  fluct.validate();
  if (opt.coarse_grid < 2) {
    throw std::invalid_argument("optimize_intensities: grid too small");
  }

  OptimizationResult best;
  best.mus = MeanIntensities{0.0, 0.0, mu_d2_bar};

  // First feasible point seeds the result; afterwards only strict
  // improvements replace it, so ties resolve in scan order.
  const auto try_point = [&](double mu_s, double mu_d1) {
    if (!MeanIntensities::feasible(mu_s, mu_d1, mu_d2_bar,
                                   fluct.intensity_pct)) {
      return;
    }
    const MeanIntensities mus{mu_s, mu_d1, mu_d2_bar};
    const KeyRateResult res = coherent_key_rate(params, fluct, mus);
    if (!best.feasible || res.rate > best.result.rate) {
      best.result = res;
      best.mus = mus;
    }
    best.feasible = true;
  };

  const SearchBox box =
      signal_search_box(mu_d2_bar, fluct.intensity_pct, opt);
  if (box.empty) return best;

  // Coarse pass: linear in the signal mean, geometric in the first decoy
  // (its optimum usually sits orders of magnitude below the signal).
  const int n = opt.coarse_grid;
  for (int i = 0; i < n; ++i) {
    const double mu_s = grid_point(box.mu_s_lo, box.mu_s_hi, i, n);
    double d1_lo = 0.0, d1_hi = 0.0;
    if (!d1_interval(mu_s, mu_d2_bar, fluct.intensity_pct, d1_lo, d1_hi)) {
      continue;
    }
    const double ratio = std::pow(d1_hi / d1_lo, 1.0 / (n - 1));
    double mu_d1 = d1_lo;
    for (int j = 0; j < n; ++j, mu_d1 *= ratio) {
      try_point(mu_s, mu_d1);
    }
  }
  if (!best.feasible || best.result.rate <= 0.0) return best;

  // Coordinate refinement: alternate 1-D scans around the incumbent; keep
  // the window when the best point migrated, shrink it when it stayed put.
  double span_s = (box.mu_s_hi - box.mu_s_lo) / static_cast<double>(n - 1);
  double span_d = best.mus.mu_d1_bar;
  constexpr int kLocal = 17;
  for (int round = 0;
       round < 60 &&
       (span_s > opt.refine_resolution || span_d > opt.refine_resolution);
       ++round) {
    const double prev_s = best.mus.mu_s_bar;
    const double prev_d = best.mus.mu_d1_bar;

    const double lo_s = std::max(prev_s - span_s, box.mu_s_lo);
    const double hi_s = std::min(prev_s + span_s, box.mu_s_hi);
    for (int i = 0; i < kLocal; ++i) {
      try_point(grid_point(lo_s, hi_s, i, kLocal), best.mus.mu_d1_bar);
    }
    double d1_lo = 0.0, d1_hi = 0.0;
    if (d1_interval(best.mus.mu_s_bar, mu_d2_bar, fluct.intensity_pct, d1_lo,
                    d1_hi)) {
      const double center_d = best.mus.mu_d1_bar;
      const double lo_d = std::max(center_d - span_d, d1_lo);
      const double hi_d = std::min(center_d + span_d, d1_hi);
      for (int j = 0; j < kLocal; ++j) {
        try_point(best.mus.mu_s_bar, grid_point(lo_d, hi_d, j, kLocal));
      }
    }
    const bool moved =
        std::abs(best.mus.mu_s_bar - prev_s) > 0.4 * span_s ||
        std::abs(best.mus.mu_d1_bar - prev_d) > 0.4 * span_d;
    if (!moved) {
      span_s *= 0.35;
      span_d *= 0.35;
    }
  }
  return best;
}

}  // namespace qkdrate
