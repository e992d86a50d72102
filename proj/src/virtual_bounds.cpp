#include "qkdrate/virtual_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qkdrate {

namespace {

void check_regime(double theta) {
  if (!(theta >= 0.0 && theta < kMaxClosedFormTheta)) {
    throw std::domain_error(
        "phase half-width outside the closed-form regime [0, 10 deg)");
  }
}

// Virtual emission probability for one pulse:
// (1 + (-1)^a cos((z0 - z1)/2)) / 2.
double p_vir_exact(int a, double z0, double z1) {
  const double c = std::cos(0.5 * (z0 - z1));
  return 0.5 * (1.0 + (a == 0 ? c : -c));
}

}  // namespace

double p_vir_plus(double theta, int a) {
  check_regime(theta);
  if (a != 0 && a != 1) throw std::invalid_argument("p_vir_plus: bit not 0/1");
  // Identical for both bits: (z0 - z1)/2 stays within theta of -pi/2, so
  // |cos| is at most sin(theta).
  return 0.5 * (1.0 + std::sin(theta));
}

GCoefficients g_plus(double theta) {
  check_regime(theta);
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double c32 = std::cos(1.5 * theta);
  const double s32 = std::sin(1.5 * theta);
  const double c2 = std::cos(2.0 * theta);

  const double den0 = s + c32;
  const double den1 = c2 - s;
  const double den2 = c - s32;
  const double den3 = 1.0 + s;
  if (den0 <= 0.0 || den1 <= 0.0 || den2 <= 0.0 || den3 <= 0.0) {
    throw std::domain_error("g_plus: denominator not positive");
  }

  GCoefficients out;
  out.g[0] = {s / den0, s / den0, (1.0 - s) / den1};
  out.g[1] = {c / den2, c / den2, -(1.0 - s) / den3};
  out.p_vir = {p_vir_plus(theta, 0), p_vir_plus(theta, 1)};
  return out;
}

double g_exact(int a, Setting c, const PhaseTriple& t, double det_tolerance) {
  if (a != 0 && a != 1) throw std::invalid_argument("g_exact: bit not 0/1");
  // The 3x3 system of (1, sin, cos) rows is invertible iff the three Bloch
  // directions form a triangle; its determinant is this cyclic sine sum.
  const double det = std::sin(t.z1 - t.x0) + std::sin(t.x0 - t.z0) +
                     std::sin(t.z0 - t.z1);
  if (std::abs(det) < det_tolerance) {
    throw std::domain_error("g_exact: degenerate phase geometry");
  }

  double u = 0.0, v = 0.0;
  if (a == 0) {
    switch (c) {
      case Setting::Z0:
        u = std::sin((t.z0 + t.z1 - 2.0 * t.x0) / 4.0);
        v = std::sin((-3.0 * t.z0 + t.z1 + 2.0 * t.x0) / 4.0);
        return u / (u - v);
      case Setting::Z1:
        u = std::sin((t.z0 + t.z1 - 2.0 * t.x0) / 4.0);
        v = std::sin((-t.z0 + 3.0 * t.z1 - 2.0 * t.x0) / 4.0);
        return u / (u + v);
      case Setting::X0:
        u = std::cos((t.z0 - t.z1) / 2.0);
        v = std::cos((t.z0 + t.z1 - 2.0 * t.x0) / 2.0);
        return (1.0 - u) / (v - u);
    }
  } else {
    switch (c) {
      case Setting::Z0:
        u = std::cos((t.z0 + t.z1 - 2.0 * t.x0) / 4.0);
        v = std::cos((-3.0 * t.z0 + t.z1 + 2.0 * t.x0) / 4.0);
        return u / (u - v);
      case Setting::Z1:
        u = std::cos((t.z0 + t.z1 - 2.0 * t.x0) / 4.0);
        v = std::cos((-t.z0 + 3.0 * t.z1 - 2.0 * t.x0) / 4.0);
        return u / (u - v);
      case Setting::X0:
        u = std::cos((t.z0 - t.z1) / 2.0);
        v = std::cos((t.z0 + t.z1 - 2.0 * t.x0) / 2.0);
        return (-1.0 - u) / (v - u);
    }
  }
  throw std::invalid_argument("g_exact: bad setting");
}

GCoefficients g_plus_numeric(const SettingMap<PhaseRange>& ranges,
                             int grid_points, double margin) {
  if (grid_points < 2) {
    throw std::invalid_argument("g_plus_numeric: need at least 2 grid points");
  }
  const auto axis = [&](Setting s, int i) {
    const PhaseRange& r = ranges[index(s)];
    return r.lo + (r.hi - r.lo) * static_cast<double>(i) /
                      static_cast<double>(grid_points - 1);
  };

  GCoefficients out;
  for (auto& row : out.g) row.fill(-std::numeric_limits<double>::infinity());
  out.p_vir.fill(0.0);

  for (int i = 0; i < grid_points; ++i) {
    const double z0 = axis(Setting::Z0, i);
    for (int j = 0; j < grid_points; ++j) {
      const double z1 = axis(Setting::Z1, j);
      for (int a = 0; a < 2; ++a) {
        out.p_vir[a] = std::max(out.p_vir[a], p_vir_exact(a, z0, z1));
      }
      for (int k = 0; k < grid_points; ++k) {
        const PhaseTriple t{z0, z1, axis(Setting::X0, k)};
        for (int a = 0; a < 2; ++a) {
          for (Setting c : kSettings) {
            double& best = out.g[a][index(c)];
            best = std::max(best, g_exact(a, c, t));
          }
        }
      }
    }
  }
  for (auto& row : out.g) {
    for (double& g : row) g += margin;
  }
  for (double& p : out.p_vir) p = std::min(p + margin, 1.0);
  return out;
}

GCoefficients g_upper_bounds(double theta) {
  if (theta >= 0.0 && theta < kMaxClosedFormTheta) return g_plus(theta);
  const double half_pi = std::numbers::pi / 2.0;
  SettingMap<PhaseRange> box{PhaseRange::centered(0.0, theta),
                             PhaseRange::centered(std::numbers::pi, theta),
                             PhaseRange::centered(half_pi, theta)};
  return g_plus_numeric(box);
}

double y_vir_upper(const GCoefficients& g, int a, int b,
                   const SettingMap<std::array<YieldInterval, 2>>& y1) {
  if (a != 0 && a != 1) throw std::invalid_argument("y_vir_upper: bit not 0/1");
  if (b != 0 && b != 1) {
    throw std::invalid_argument("y_vir_upper: outcome not 0/1");
  }
  double sum = 0.0;
  for (Setting c : kSettings) {
    const double coeff = g.coeff(a, c);
    const YieldInterval& iv = y1[index(c)][b];
    sum += coeff * (coeff > 0.0 ? iv.hi : iv.lo);
  }
  return std::max(g.p_vir[a] * sum, 0.0);
}

}  // namespace qkdrate
