#include "wl1/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "wl1/errors.hpp"

namespace wl1 {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_interval(double t) {
  if (!(t >= -1.0 && t <= 1.0)) throw DomainError("point coordinate outside [-1, 1]");
}

void check_sphere(double phi, double theta) {
  if (!(phi >= 0.0 && phi < 2.0 * kPi) || !(theta >= 0.0 && theta <= kPi))
    throw DomainError("sphere point outside [0, 2pi) x [0, pi]");
}
}  // namespace

int SamplingMeasure::point_dim() const {
  switch (kind) {
    case MeasureKind::uniform_interval:
    case MeasureKind::chebyshev_1d:
      return 1;
    case MeasureKind::uniform_box:
    case MeasureKind::chebyshev_tensor:
      return dim;
    default:
      return 2;
  }
}

bool SamplingMeasure::on_sphere() const {
  return kind == MeasureKind::sphere_uniform || kind == MeasureKind::sphere_flat ||
         kind == MeasureKind::sphere_tan13;
}

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::uniform_interval: return "uniform_interval";
    case MeasureKind::uniform_box: return "uniform_box";
    case MeasureKind::chebyshev_1d: return "chebyshev_1d";
    case MeasureKind::chebyshev_tensor: return "chebyshev_tensor";
    case MeasureKind::sphere_uniform: return "sphere_uniform";
    case MeasureKind::sphere_flat: return "sphere_flat";
    case MeasureKind::sphere_tan13: return "sphere_tan13";
  }
  return "?";
}

MeasureKind measure_kind_from_string(const std::string& name) {
  for (auto k : {MeasureKind::uniform_interval, MeasureKind::uniform_box, MeasureKind::chebyshev_1d,
                 MeasureKind::chebyshev_tensor, MeasureKind::sphere_uniform, MeasureKind::sphere_flat,
                 MeasureKind::sphere_tan13}) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown sampling measure '" + name + "'");
}

std::string describe(const SamplingMeasure& measure) {
  if (measure.kind == MeasureKind::uniform_box || measure.kind == MeasureKind::chebyshev_tensor)
    return to_string(measure.kind) + "(" + std::to_string(measure.dim) + ")";
  return to_string(measure.kind);
}

double tan13_normalizer() {
  static const double z = [] {
    boost::math::quadrature::tanh_sinh<double> integrator;
    // The two-argument form hands over the distance to the nearer endpoint,
    // which keeps tan accurate next to the singularity at pi/2.
    auto f = [](double theta, double tc) {
      if (theta > kPi / 4.0 && tc > 0.0) return std::cbrt(1.0 / std::tan(tc));
      return std::cbrt(std::tan(theta));
    };
    const double half = integrator.integrate(f, 0.0, kPi / 2.0, 1e-13);
    return 2.0 * kPi * 2.0 * half;
  }();
  return z;
}

double chebyshev_cdf(double t) {
  check_interval(t);
  return 1.0 - std::acos(t) / kPi;
}

Eigen::MatrixXd draw_points(const SamplingMeasure& measure, std::size_t m, const RandomStream& stream) {
  if (m < 1) throw UsageError("draw_points requires m >= 1");
  if (measure.point_dim() < 1) throw UsageError("measure dimension must be positive");
  const auto rows = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd pts(rows, measure.point_dim());
  Philox rng(stream);
  for (Eigen::Index i = 0; i < rows; ++i) {
    switch (measure.kind) {
      case MeasureKind::uniform_interval:
      case MeasureKind::uniform_box:
        for (Eigen::Index a = 0; a < pts.cols(); ++a) pts(i, a) = 2.0 * rng.uniform() - 1.0;
        break;
      case MeasureKind::chebyshev_1d:
      case MeasureKind::chebyshev_tensor:
        for (Eigen::Index a = 0; a < pts.cols(); ++a) pts(i, a) = std::cos(kPi * rng.uniform());
        break;
      case MeasureKind::sphere_uniform:
        pts(i, 0) = 2.0 * kPi * rng.uniform();
        pts(i, 1) = std::acos(1.0 - 2.0 * rng.uniform());
        break;
      case MeasureKind::sphere_flat:
        pts(i, 0) = 2.0 * kPi * rng.uniform();
        pts(i, 1) = kPi * rng.uniform();
        break;
      case MeasureKind::sphere_tan13: {
        pts(i, 0) = 2.0 * kPi * rng.uniform();
        // sin^2(theta) on the upper hemisphere is Beta(2/3, 1/3); the lower
        // hemisphere is its mirror image.
        const double u = boost::math::ibeta_inv(2.0 / 3.0, 1.0 / 3.0, rng.uniform());
        double theta = std::asin(std::sqrt(u));
        if (rng.uniform() < 0.5) theta = kPi - theta;
        pts(i, 1) = theta;
        break;
      }
    }
  }
  return pts;
}

double measure_pdf(const SamplingMeasure& measure, std::span<const double> point) {
  if (static_cast<int>(point.size()) != measure.point_dim())
    throw UsageError("point dimension does not match the measure");
  switch (measure.kind) {
    case MeasureKind::uniform_interval:
    case MeasureKind::uniform_box: {
      double p = 1.0;
      for (double t : point) {
        check_interval(t);
        p *= 0.5;
      }
      return p;
    }
    case MeasureKind::chebyshev_1d:
    case MeasureKind::chebyshev_tensor: {
      double p = 1.0;
      for (double t : point) {
        check_interval(t);
        if (std::abs(t) == 1.0) return kInf;
        p *= 1.0 / (kPi * std::sqrt(1.0 - t * t));
      }
      return p;
    }
    case MeasureKind::sphere_uniform:
      check_sphere(point[0], point[1]);
      return std::sin(point[1]) / (4.0 * kPi);
    case MeasureKind::sphere_flat:
      check_sphere(point[0], point[1]);
      return 1.0 / (2.0 * kPi * kPi);
    case MeasureKind::sphere_tan13: {
      check_sphere(point[0], point[1]);
      const double c = std::cos(point[1]);
      if (c == 0.0 || point[1] == kPi / 2.0) return kInf;
      return std::cbrt(std::abs(std::tan(point[1]))) / tan13_normalizer();
    }
  }
  return 0.0;
}

}  // namespace wl1
