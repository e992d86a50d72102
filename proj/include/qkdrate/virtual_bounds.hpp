#pragma once

#include "qkdrate/decoy_bounds.hpp"
#include "qkdrate/settings.hpp"
#include "qkdrate/source_model.hpp"

namespace qkdrate {

// Largest phase half-width (10 degrees, in radians) for which the closed-form
// coefficient bounds below are derived.
inline constexpr double kMaxClosedFormTheta = 0.17453292519943295;

/// Worst-case expansion coefficients for the virtual Z-basis emissions:
/// g[a][c] bounds the weight of setting c in the virtual state for bit a,
/// and p_vir[a] bounds the virtual emission probability.
struct GCoefficients {
  std::array<SettingMap<double>, 2> g{};
  std::array<double, 2> p_vir{};

  double coeff(int a, Setting c) const { return g[a][index(c)]; }
};

// Phases of the three sending states (0_Z, 1_Z, 0_X) for one pulse.
struct PhaseTriple {
  double z0 = 0.0;
  double z1 = 0.0;
  double x0 = 0.0;
};

// Maximum virtual emission probability over the symmetric fluctuation box of
// half-width theta: (1 + sin(theta))/2 for either bit. Valid for
// 0 <= theta < 10 degrees.
double p_vir_plus(double theta, int a);

// Closed-form upper bounds on all six coefficients plus both virtual
// emission probabilities, for the symmetric box of half-width theta.
// Valid for 0 <= theta < 10 degrees.
GCoefficients g_plus(double theta);

// Exact expansion coefficient for a specific phase triple: the unique g with
// Tr[D P(theta_vir)] = sum_c g_{a,c} Tr[D P(theta_c)] for every Hermitian D,
// where theta_vir = (z0+z1)/2 (+pi for a=1). Throws when the three Bloch
// directions are too close to collinear to invert.
double g_exact(int a, Setting c, const PhaseTriple& thetas,
               double det_tolerance = kDefaultTolerance);

// Numerical fallback for arbitrary phase intervals: maximizes g_exact (and
// the virtual emission probability) over a grid of in-range triples, then
// adds a safety margin. Grid resolution is per axis.
GCoefficients g_plus_numeric(const SettingMap<PhaseRange>& ranges,
                             int grid_points = 101, double margin = 1e-6);

// Closed form when the symmetric box lies inside the derivation regime,
// numerical fallback on the box otherwise.
GCoefficients g_upper_bounds(double theta);

// Upper bound on the virtual yield Y_{a,b|vir,u}: p_vir[a] times the signed
// combination of interval endpoints, picking hi where the coefficient is
// positive and lo where it is negative. Clamped below at 0.
double y_vir_upper(const GCoefficients& g, int a, int b,
                   const SettingMap<std::array<YieldInterval, 2>>& y1);

}  // namespace qkdrate
