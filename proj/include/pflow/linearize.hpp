#pragma once

#include <array>
#include <vector>

#include "pflow/model.hpp"

namespace pflow {

/// Rectangular magnitude/angle region over which the 1/conj(V) surrogate is
/// fitted, plus the grid resolution. Angles are radians; delta_center holds
/// one entry per phase (a, b, c). Meaningful fits need 0 < v_min < v_max,
/// delta_halfwidth > 0 and m, n >= 2; degenerate regions are representable
/// so that rank failures can surface where they are detected.
struct FitRegion {
  double v_min = 0.95;
  double v_max = 1.05;
  Vector3d delta_center{0.0, 2.0 * pi / 3.0, -2.0 * pi / 3.0};
  double delta_halfwidth = deg_to_rad(10.0);
  int m = 21;  // magnitude grid count
  int n = 21;  // angle grid count
};

/// True when the region satisfies the constraints above.
bool region_well_formed(const FitRegion& region);

/// One grid point: voltage components and the exact values of
/// f(V) = 1/conj(V) split as fX = X/(X^2+Y^2), fY = Y/(X^2+Y^2).
struct Sample {
  double x;
  double y;
  double fx;
  double fy;
};

/// Affine surrogate of f(V) = 1/conj(V) around one phase center:
///   fX ~ kx*X + ky*Y + bx,   fY ~ hx*X + hy*Y + by.
struct PhaseCoeffs {
  double kx = 0.0, ky = 0.0, bx = 0.0;
  double hx = 0.0, hy = 0.0, by = 0.0;

  Phasor eval(const Phasor& v) const {
    double fx = kx * v.real() + ky * v.imag() + bx;
    double fy = hx * v.real() + hy * v.imag() + by;
    return {fx, fy};
  }
};

/// Per-phase coefficients plus the region that scopes their validity and the
/// worst training-grid error per phase (largest |error| in either component).
struct LinCoeffs {
  std::array<PhaseCoeffs, 3> phase;
  FitRegion region;
  Vector3d max_fit_error = Vector3d::Zero();

  double worst_fit_error() const { return max_fit_error.maxCoeff(); }
};

/// Discretize the region for one phase into an m x n Cartesian product of
/// magnitudes and angles; grid extremes hit v_min/v_max and the angle limits
/// exactly. Returns m*n samples in row-major (magnitude-major) order.
std::vector<Sample> sample_grid(const FitRegion& region, Phase phase);

/// Least-squares affine fit of fX and fY over the samples (two independent
/// 3-parameter fits through the 3x3 normal equations). Also reports the
/// largest absolute component error over the training samples. Throws
/// std::runtime_error when the sample set is affinely dependent (collinear
/// grid), i.e. the normal matrix is rank-deficient.
struct FitOutcome {
  PhaseCoeffs coeffs;
  double max_fit_error = 0.0;
};
FitOutcome fit_lsm(const std::vector<Sample>& samples);

/// Fit all three phases of the region with the least-squares method.
LinCoeffs fit_lsm_all(const FitRegion& region);

/// Complex-expansion surrogate: f(V) ~ 2 e^{j delta} - conj(V) e^{j 2 delta},
/// exact at V = e^{j delta}, returned in the same layout as fit_lsm so the
/// two linearizers are interchangeable.
PhaseCoeffs cbm_coeffs(double delta_center);

/// CBM coefficients for every phase of the region, with training-grid errors
/// measured on the same grids as fit_lsm_all for comparability.
LinCoeffs cbm_all(const FitRegion& region);

/// Largest absolute error of either component over the samples.
double max_component_error(const PhaseCoeffs& coeffs,
                           const std::vector<Sample>& samples);

/// Closed interval of reals.
struct Interval {
  double lo;
  double hi;
  bool empty() const { return lo > hi; }
  double width() const { return hi - lo; }
};

/// Feasible set of z under the four-inequality envelope that reformulates
/// the product z = x*y of a binary x and a box-bounded real y:
///   x*y_min <= z <= x*y_max
///   y - (1-x)*y_max <= z <= y - (1-x)*y_min
/// The returned interval collapses to the single point {x*y}, which is the
/// exactness certificate for the mixed-integer reformulation the assignment
/// search relies on. Throws std::domain_error when x is not 0/1 or y lies
/// outside [y_min, y_max].
Interval rlp_reconstruct(int x, double y, double y_min, double y_max);

}  // namespace pflow
