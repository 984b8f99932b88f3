#include "pflow/linearize.hpp"

#include <cmath>
#include <stdexcept>

namespace pflow {

bool region_well_formed(const FitRegion& region) {
  return region.v_min > 0.0 && region.v_min < region.v_max &&
         region.delta_halfwidth > 0.0 && region.m >= 2 && region.n >= 2 &&
         finite(region.v_min) && finite(region.v_max) &&
         finite(region.delta_halfwidth) && finite(region.delta_center);
}

namespace {

// Inclusive linspace whose endpoints are exact.
std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo + step * i;
  out.back() = hi;
  return out;
}

}  // namespace

std::vector<Sample> sample_grid(const FitRegion& region, Phase phase) {
  if (region.m < 1 || region.n < 1)
    throw std::invalid_argument("grid counts must be positive");
  double center = region.delta_center[phase_index(phase)];
  std::vector<double> vm = linspace(region.v_min, region.v_max, region.m);
  std::vector<double> va = linspace(center - region.delta_halfwidth,
                                    center + region.delta_halfwidth, region.n);
  std::vector<Sample> out;
  out.reserve(static_cast<size_t>(region.m) * region.n);
  for (double v : vm)
    for (double d : va) {
      double x = v * std::cos(d);
      double y = v * std::sin(d);
      double mag2 = x * x + y * y;
      out.push_back({x, y, x / mag2, y / mag2});
    }
  return out;
}

double max_component_error(const PhaseCoeffs& coeffs,
                           const std::vector<Sample>& samples) {
  double worst = 0.0;
  for (const Sample& s : samples) {
    Phasor f = coeffs.eval({s.x, s.y});
    worst = std::max(worst, std::abs(f.real() - s.fx));
    worst = std::max(worst, std::abs(f.imag() - s.fy));
  }
  return worst;
}

FitOutcome fit_lsm(const std::vector<Sample>& samples) {
  if (samples.size() < 3)
    throw std::runtime_error("need at least 3 samples for an affine fit");

  // Normal equations (A^T A) c = A^T f with design rows (x, y, 1); the two
  // components share the normal matrix and differ only in the right side.
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atx = Eigen::Vector3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  for (const Sample& s : samples) {
    Eigen::Vector3d row(s.x, s.y, 1.0);
    ata += row * row.transpose();
    atx += row * s.fx;
    aty += row * s.fy;
  }

  Eigen::FullPivLU<Eigen::Matrix3d> lu(ata);
  lu.setThreshold(1e-10);
  if (lu.rank() < 3)
    throw std::runtime_error(
        "rank-deficient sample set (collinear grid): affine fit undetermined");

  Eigen::Vector3d cx = lu.solve(atx);
  Eigen::Vector3d cy = lu.solve(aty);
  FitOutcome out;
  out.coeffs = {cx[0], cx[1], cx[2], cy[0], cy[1], cy[2]};
  out.max_fit_error = max_component_error(out.coeffs, samples);
  return out;
}

LinCoeffs fit_lsm_all(const FitRegion& region) {
  LinCoeffs out;
  out.region = region;
  for (Phase ph : all_phases) {
    FitOutcome fit = fit_lsm(sample_grid(region, ph));
    out.phase[phase_index(ph)] = fit.coeffs;
    out.max_fit_error[phase_index(ph)] = fit.max_fit_error;
  }
  return out;
}

PhaseCoeffs cbm_coeffs(double delta_center) {
  // 2 e^{jd} - (X - jY) e^{j2d} expanded into affine functions of (X, Y):
  //   fX = -cos(2d) X - sin(2d) Y + 2 cos(d)
  //   fY = -sin(2d) X + cos(2d) Y + 2 sin(d)
  double c1 = std::cos(delta_center), s1 = std::sin(delta_center);
  double c2 = std::cos(2.0 * delta_center), s2 = std::sin(2.0 * delta_center);
  return {-c2, -s2, 2.0 * c1, -s2, c2, 2.0 * s1};
}

LinCoeffs cbm_all(const FitRegion& region) {
  LinCoeffs out;
  out.region = region;
  for (Phase ph : all_phases) {
    PhaseCoeffs coeffs = cbm_coeffs(region.delta_center[phase_index(ph)]);
    out.phase[phase_index(ph)] = coeffs;
    out.max_fit_error[phase_index(ph)] =
        max_component_error(coeffs, sample_grid(region, ph));
  }
  return out;
}

Interval rlp_reconstruct(int x, double y, double y_min, double y_max) {
  if (x != 0 && x != 1)
    throw std::domain_error("x must be binary");
  if (!(y_min <= y && y <= y_max))
    throw std::domain_error("y outside its box");
  double lo = std::max(x * y_min, y - (1 - x) * y_max);
  double hi = std::min(x * y_max, y - (1 - x) * y_min);
  return {lo, hi};
}

}  // namespace pflow
