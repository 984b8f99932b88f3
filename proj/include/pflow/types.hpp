#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace pflow {

/// All electrical quantities are per-unit phasors on a common base.
/// A phasor is stored rectangular; magnitude/angle views are derived,
/// with angles in radians wrapped to (-pi, pi].
using Phasor = std::complex<double>;

using Eigen::Matrix3cd;
using Eigen::Vector3cd;
using Eigen::Vector3d;

inline constexpr double pi = std::numbers::pi;

/// Conductor phase. The declaration order fixes the total order a < b < c
/// used for deterministic tie-breaking everywhere.
enum class Phase : int { a = 0, b = 1, c = 2 };

inline constexpr std::array<Phase, 3> all_phases{Phase::a, Phase::b, Phase::c};

constexpr int phase_index(Phase p) { return static_cast<int>(p); }

constexpr char phase_letter(Phase p) {
  constexpr char letters[] = {'a', 'b', 'c'};
  return letters[phase_index(p)];
}

/// Inverse of phase_letter; returns true and sets `out` on success.
constexpr bool phase_from_letter(char c, Phase& out) {
  switch (c) {
    case 'a': out = Phase::a; return true;
    case 'b': out = Phase::b; return true;
    case 'c': out = Phase::c; return true;
    default: return false;
  }
}

constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

/// Wrap an angle to the canonical interval (-pi, pi].
inline double wrap_angle(double rad) {
  double w = std::remainder(rad, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(const Phasor& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

template <class Derived>
bool finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Largest absolute entry of any Eigen expression (real or complex).
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace pflow
