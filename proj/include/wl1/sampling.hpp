#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "wl1/random.hpp"

namespace wl1 {

/// Probability measures the sample points are drawn from. Points are rows of
/// an m x point_dim matrix; sphere points are (phi, theta) with
/// phi in [0, 2 pi) and theta in [0, pi).
enum class MeasureKind {
  uniform_interval,  // dt/2 on [-1, 1]
  uniform_box,       // product of uniform_interval, d axes
  chebyshev_1d,      // dt / (pi sqrt(1 - t^2))
  chebyshev_tensor,  // product of chebyshev_1d, d axes
  sphere_uniform,    // sin(theta) dtheta dphi / (4 pi)
  sphere_flat,       // dtheta dphi / (2 pi^2)
  sphere_tan13       // |tan(theta)|^(1/3) dtheta dphi / Z
};

struct SamplingMeasure {
  MeasureKind kind = MeasureKind::uniform_interval;
  int dim = 1;  // axes for the box/tensor kinds

  int point_dim() const;
  bool on_sphere() const;
  bool operator==(const SamplingMeasure&) const = default;
};

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& name);
std::string describe(const SamplingMeasure& measure);

/// Normalizer Z = int_0^{2pi} int_0^pi |tan(theta)|^(1/3) dtheta dphi,
/// computed once by tanh-sinh quadrature and cached.
double tan13_normalizer();

/// m i.i.d. draws; a pure function of (measure, m, stream).
Eigen::MatrixXd draw_points(const SamplingMeasure& measure, std::size_t m, const RandomStream& stream);

/// Density with respect to Lebesgue measure in the point coordinates.
/// Returns +infinity where the density is singular (|t_j| = 1 for Chebyshev,
/// theta = pi/2 for sphere_tan13). Throws DomainError outside the domain.
double measure_pdf(const SamplingMeasure& measure, std::span<const double> point);

/// Cumulative distribution of chebyshev_1d: 1 - arccos(t)/pi.
double chebyshev_cdf(double t);

}  // namespace wl1
