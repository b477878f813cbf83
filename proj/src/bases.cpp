#include "wl1/bases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wl1/errors.hpp"
#include "wl1/quadrature.hpp"

namespace wl1 {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

void check_t(double t) {
  if (!(t >= -1.0 && t <= 1.0)) throw DomainError("t = " + std::to_string(t) + " outside [-1, 1]");
}

void check_sphere_point(double phi, double theta) {
  if (!(phi >= 0.0 && phi < 2.0 * kPi) || !(theta >= 0.0 && theta <= kPi))
    throw DomainError("(phi, theta) outside [0, 2pi) x [0, pi]");
}

// ---- 1-D building blocks. Each table routine produces exactly the values the
// scalar routine would, so row assembly and pointwise evaluation agree.

double chebyshev1(int k, double t) {
  if (k == 0) return 1.0;
  if (t == 1.0) return kSqrt2;
  if (t == -1.0) return k % 2 == 0 ? kSqrt2 : -kSqrt2;
  return kSqrt2 * std::cos(k * std::acos(t));
}

void legendre_table(int kmax, double t, double* out) {
  double p0 = 1.0;
  double p1 = t;
  out[0] = 1.0;
  if (kmax >= 1) out[1] = std::sqrt(3.0) * p1;
  for (int k = 1; k < kmax; ++k) {
    const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
    out[k + 1] = std::sqrt(2.0 * k + 3.0) * p1;
  }
}

double legendre1(int k, double t) {
  std::vector<double> tab(k + 1);
  legendre_table(k, t, tab.data());
  return tab[k];
}

double preconditioner(double t) { return std::sqrt(kPi / 2.0) * std::pow(1.0 - t * t, 0.25); }

double trig1(int position, double t) {
  if (position == 1) return 1.0;
  const int k = position / 2;
  const double arg = k * kPi * t;
  return position % 2 == 0 ? kSqrt2 * std::cos(arg) : kSqrt2 * std::sin(arg);
}

double family1(Family f, int k, double t) {
  switch (f) {
    case Family::chebyshev: return chebyshev1(k, t);
    case Family::legendre: return legendre1(k, t);
    case Family::legendre_preconditioned: return preconditioner(t) * legendre1(k, t);
    case Family::real_trigonometric: return trig1(k, t);
    default: break;
  }
  throw UsageError("not a 1-D family");
}

// Normalized associated Legendre Q_l^m with int_{-1}^1 Q^2 dx/2 = 1, no
// Condon-Shortley phase. Fills out[l - m] for l = m..lmax.
void assoc_legendre_column(int m, int lmax, double x, double s, double* out) {
  double qmm = 1.0;
  for (int i = 1; i <= m; ++i) qmm *= std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * s;
  out[0] = qmm;
  if (lmax == m) return;
  double q0 = qmm;
  double q1 = std::sqrt(2.0 * m + 3.0) * x * qmm;
  out[1] = q1;
  for (int l = m + 2; l <= lmax; ++l) {
    const double l2 = static_cast<double>(l) * l;
    const double m2 = static_cast<double>(m) * m;
    const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
    const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m2) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
    const double q2 = a * (x * q1 - b * q0);
    q0 = q1;
    q1 = q2;
    out[l - m] = q1;
  }
}

double azimuthal(int k, double phi) {
  if (k == 0) return 1.0;
  return k > 0 ? kSqrt2 * std::cos(k * phi) : kSqrt2 * std::sin(-k * phi);
}

double spherical_preconditioner(double x, double s) {
  static const double c = std::sqrt(tan13_normalizer() / (4.0 * kPi));
  return c * std::pow(s * s * std::abs(x), 1.0 / 6.0);
}

double spherical_value(const OrthonormalSystem& sys, int l, int k, double phi, double theta) {
  const int m = std::abs(k);
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<double> col(l - m + 1);
  assoc_legendre_column(m, l, x, s, col.data());
  double v = col[l - m] * azimuthal(k, phi);
  if (sys.family == Family::spherical_preconditioned) v *= spherical_preconditioner(x, s);
  return v;
}

// Degree (polynomial families) or position (trig) used on one axis.
int axis_order(Family f, int raw, IndexBase base) {
  if (f == Family::real_trigonometric) return base == IndexBase::position ? raw : raw + 1;
  return base == IndexBase::position ? raw - 1 : raw;
}

void check_index(const OrthonormalSystem& sys, const MultiIndex& k, IndexBase base) {
  if (sys.spherical()) {
    if (base != IndexBase::spherical || k.size() != 2 || k[0] < 0 || std::abs(k[1]) > k[0])
      throw UsageError("spherical systems take (l, k) indices with |k| <= l");
    return;
  }
  if (base == IndexBase::spherical) throw UsageError("spherical index used with an interval system");
  if (static_cast<int>(k.size()) != sys.dim) throw UsageError("index arity does not match system dimension");
  for (int v : k) {
    if (axis_order(sys.family, v, base) < (sys.family == Family::real_trigonometric ? 1 : 0))
      throw UsageError("index out of range for the basis family");
  }
}

void check_point(const OrthonormalSystem& sys, std::span<const double> t) {
  if (static_cast<int>(t.size()) != sys.point_dim()) throw UsageError("point dimension does not match system");
  if (sys.spherical()) {
    check_sphere_point(t[0], t[1]);
  } else {
    for (double v : t) check_t(v);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

OrthonormalSystem OrthonormalSystem::tensor(Family family, int dim) {
  OrthonormalSystem s;
  s.family = family;
  s.dim = dim;
  s.validate();
  return s;
}

void OrthonormalSystem::validate() const {
  if (spherical()) {
    if (dim != 1 && dim != 2) throw UsageError("spherical systems are not tensorized");
    if (!(spherical_c > 0.0)) throw UsageError("spherical constant must be positive");
    return;
  }
  if (dim < 1 || dim > 10) throw UsageError("tensor dimension must be in [1, 10]");
  if (family == Family::real_trigonometric && dim != 1) throw UsageError("trigonometric system is 1-D");
}

bool OrthonormalSystem::spherical() const {
  return family == Family::spherical_harmonics_real || family == Family::spherical_preconditioned;
}

int OrthonormalSystem::point_dim() const { return spherical() ? 2 : dim; }

IndexBase OrthonormalSystem::natural_base() const {
  if (spherical()) return IndexBase::spherical;
  return family == Family::real_trigonometric ? IndexBase::position : IndexBase::degree;
}

SamplingMeasure OrthonormalSystem::measure() const {
  switch (family) {
    case Family::real_trigonometric:
      return {MeasureKind::uniform_interval, 1};
    case Family::legendre:
      return dim == 1 ? SamplingMeasure{MeasureKind::uniform_interval, 1}
                      : SamplingMeasure{MeasureKind::uniform_box, dim};
    case Family::chebyshev:
    case Family::legendre_preconditioned:
      return dim == 1 ? SamplingMeasure{MeasureKind::chebyshev_1d, 1}
                      : SamplingMeasure{MeasureKind::chebyshev_tensor, dim};
    case Family::spherical_harmonics_real:
      return {MeasureKind::sphere_uniform, 2};
    case Family::spherical_preconditioned:
      return {MeasureKind::sphere_tan13, 2};
  }
  return {};
}

std::string to_string(Family family) {
  switch (family) {
    case Family::real_trigonometric: return "real_trigonometric";
    case Family::chebyshev: return "chebyshev";
    case Family::legendre: return "legendre";
    case Family::legendre_preconditioned: return "legendre_preconditioned";
    case Family::spherical_harmonics_real: return "spherical_harmonics_real";
    case Family::spherical_preconditioned: return "spherical_preconditioned";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  for (auto f : {Family::real_trigonometric, Family::chebyshev, Family::legendre, Family::legendre_preconditioned,
                 Family::spherical_harmonics_real, Family::spherical_preconditioned}) {
    if (to_string(f) == name) return f;
  }
  if (name == "trig" || name == "real_trig") return Family::real_trigonometric;
  throw UsageError("unknown basis family '" + name + "'");
}

std::string OrthonormalSystem::describe() const {
  if (dim > 1 && !spherical()) return "tensor(" + to_string(family) + ", " + std::to_string(dim) + ")";
  return to_string(family);
}

double evaluate(const OrthonormalSystem& sys, const MultiIndex& k, std::span<const double> t, IndexBase base) {
  check_index(sys, k, base);
  check_point(sys, t);
  if (sys.spherical()) return spherical_value(sys, k[0], k[1], t[0], t[1]);
  double v = 1.0;
  for (int a = 0; a < sys.dim; ++a) v *= family1(sys.family, axis_order(sys.family, k[a], base), t[a]);
  return v;
}

double evaluate(const OrthonormalSystem& sys, const MultiIndex& k, std::span<const double> t) {
  return evaluate(sys, k, t, sys.natural_base());
}

double sup_norm_bound(const OrthonormalSystem& sys, const MultiIndex& k, IndexBase base) {
  check_index(sys, k, base);
  switch (sys.family) {
    case Family::spherical_harmonics_real:
      return std::sqrt(2.0 * k[0] + 1.0);
    case Family::spherical_preconditioned:
      return sys.spherical_c * std::pow(static_cast<double>(std::max(k[0], 1)), 1.0 / 6.0);
    case Family::real_trigonometric:
      return axis_order(sys.family, k[0], base) == 1 ? 1.0 : kSqrt2;
    default:
      break;
  }
  double b = 1.0;
  for (int a = 0; a < sys.dim; ++a) {
    const int deg = axis_order(sys.family, k[a], base);
    switch (sys.family) {
      case Family::chebyshev:
        if (deg > 0) b *= kSqrt2;
        break;
      case Family::legendre:
        b *= std::sqrt(2.0 * deg + 1.0);
        break;
      case Family::legendre_preconditioned:
        b *= deg == 0 ? std::sqrt(kPi / 2.0) : std::sqrt(2.0 + 1.0 / deg);
        break;
      default:
        break;
    }
  }
  return b;
}

double sup_norm_bound(const OrthonormalSystem& sys, const MultiIndex& k) {
  return sup_norm_bound(sys, k, sys.natural_base());
}

bool is_odd(const OrthonormalSystem& sys, const MultiIndex& k, IndexBase base) {
  check_index(sys, k, base);
  if (sys.spherical()) return false;
  if (sys.family == Family::real_trigonometric) {
    const int p = axis_order(sys.family, k[0], base);
    return p > 1 && p % 2 == 1;
  }
  int total = 0;
  for (int a = 0; a < sys.dim; ++a) total += axis_order(sys.family, k[a], base);
  return total % 2 == 1;
}

void evaluate_row(const OrthonormalSystem& sys, const IndexSet& set, std::span<const double> point,
                  std::span<double> out) {
  if (out.size() != set.size()) throw UsageError("row buffer size does not match index set");
  check_point(sys, point);
  if (set.empty()) return;

  if (sys.spherical()) {
    if (set.base() != IndexBase::spherical) throw UsageError("spherical system needs a spherical index set");
    int lmax = 0;
    for (const auto& k : set.members()) lmax = std::max(lmax, k[0]);
    const double phi = point[0];
    const double x = std::cos(point[1]);
    const double s = std::sin(point[1]);
    // columns[m][l - m]
    std::vector<std::vector<double>> columns(lmax + 1);
    for (int m = 0; m <= lmax; ++m) {
      columns[m].resize(lmax - m + 1);
      assoc_legendre_column(m, lmax, x, s, columns[m].data());
    }
    const double pre =
        sys.family == Family::spherical_preconditioned ? spherical_preconditioner(x, s) : 1.0;
    for (std::size_t j = 0; j < set.size(); ++j) {
      const auto& k = set[j];
      const int m = std::abs(k[1]);
      double v = columns[m][k[0] - m] * azimuthal(k[1], phi);
      if (sys.family == Family::spherical_preconditioned) v *= pre;
      out[j] = v;
    }
    return;
  }

  std::vector<std::vector<double>> tables(sys.dim);
  for (int a = 0; a < sys.dim; ++a) {
    int top = 0;
    for (const auto& k : set.members()) top = std::max(top, axis_order(sys.family, k.at(a), set.base()));
    auto& tab = tables[a];
    tab.assign(top + 1, 0.0);
    const double t = point[a];
    switch (sys.family) {
      case Family::legendre:
        legendre_table(top, t, tab.data());
        break;
      case Family::legendre_preconditioned: {
        legendre_table(top, t, tab.data());
        const double v = preconditioner(t);
        for (double& e : tab) e = v * e;
        break;
      }
      case Family::chebyshev:
        for (int d = 0; d <= top; ++d) tab[d] = chebyshev1(d, t);
        break;
      case Family::real_trigonometric:
        for (int p = 1; p <= top; ++p) tab[p] = trig1(p, t);
        break;
      default:
        break;
    }
  }
  for (std::size_t j = 0; j < set.size(); ++j) {
    const auto& k = set[j];
    double v = 1.0;
    for (int a = 0; a < sys.dim; ++a) v *= tables[a][axis_order(sys.family, k[a], set.base())];
    out[j] = v;
  }
}

Eigen::MatrixXd sampling_matrix(const OrthonormalSystem& sys, const IndexSet& set, const Eigen::MatrixXd& points,
                                bool normalized) {
  sys.validate();
  if (set.empty()) throw UsageError("sampling matrix needs a nonempty index set");
  if (points.rows() < 1) throw UsageError("sampling matrix needs at least one point");
  if (points.cols() != sys.point_dim()) throw UsageError("point dimension does not match system");
  for (const auto& k : set.members()) check_index(sys, k, set.base());
  const Eigen::Index m = points.rows();
  const auto n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd a(m, n);
  std::vector<double> pt(points.cols());
  std::vector<double> row(set.size());
  const double scale = normalized ? 1.0 / std::sqrt(static_cast<double>(m)) : 1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) pt[c] = points(i, c);
    try {
      evaluate_row(sys, set, pt, row);
    } catch (const DomainError& e) {
      throw DomainError("sample row " + std::to_string(i) + ": " + e.what());
    }
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normalized ? row[j] * scale : row[j];
  }
  return a;
}

Eigen::MatrixXd gram_matrix(const OrthonormalSystem& sys, const IndexSet& set, const GramQuadrature& quadrature) {
  sys.validate();
  const auto n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  const SamplingMeasure nu = sys.measure();

  if (const auto* mc = std::get_if<MonteCarloQuadrature>(&quadrature)) {
    if (mc->n < 1) throw UsageError("Monte Carlo quadrature needs n >= 1");
    constexpr std::size_t kBlock = 4096;
    const Eigen::MatrixXd pts = draw_points(nu, mc->n, RandomStream{mc->seed, 0});
    for (std::size_t start = 0; start < mc->n; start += kBlock) {
      const auto rows = static_cast<Eigen::Index>(std::min(kBlock, mc->n - start));
      const Eigen::MatrixXd a =
          sampling_matrix(sys, set, pts.middleRows(static_cast<Eigen::Index>(start), rows), false);
      g.noalias() += a.transpose() * a;
    }
    return g / static_cast<double>(mc->n);
  }

  const int q = std::get<GaussQuadrature>(quadrature).n;
  if (q < 1) throw UsageError("Gauss quadrature order must be positive");
  Eigen::MatrixXd pts;
  Eigen::VectorXd w;
  if (sys.spherical()) {
    // Gauss-Legendre in cos(theta), trapezoid in phi; the weights carry the
    // ratio of nu to the uniform surface measure.
    const QuadratureRule gl = gauss_legendre(q);
    const int nphi = 2 * q;
    pts.resize(static_cast<Eigen::Index>(q) * nphi, 2);
    w.resize(pts.rows());
    const SamplingMeasure uniform{MeasureKind::sphere_uniform, 2};
    Eigen::Index r = 0;
    for (int i = 0; i < q; ++i) {
      const double theta = std::acos(gl.nodes[i]);
      for (int j = 0; j < nphi; ++j, ++r) {
        const double phi = 2.0 * kPi * j / nphi;
        pts(r, 0) = phi;
        pts(r, 1) = theta;
        const double p[2] = {phi, theta};
        w(r) = gl.weights[i] / nphi * measure_pdf(nu, p) / measure_pdf(uniform, p);
      }
    }
  } else {
    // Per-axis rule in which every Gram integrand is integrated exactly:
    // trapezoid for the periodic trig system, Gauss-Chebyshev for Chebyshev,
    // Gauss-Legendre (reweighted by the density ratio) for the rest.
    QuadratureRule rule;
    if (sys.family == Family::real_trigonometric) {
      rule.nodes.resize(q);
      rule.weights.assign(q, 1.0 / q);
      for (int i = 0; i < q; ++i) rule.nodes[i] = -1.0 + 2.0 * i / q;
    } else if (sys.family == Family::chebyshev) {
      rule = gauss_chebyshev(q);
    } else {
      rule = gauss_legendre(q);
      if (sys.family == Family::legendre_preconditioned) {
        const SamplingMeasure cheb1{MeasureKind::chebyshev_1d, 1};
        for (int i = 0; i < q; ++i) {
          const double t[1] = {rule.nodes[i]};
          rule.weights[i] *= measure_pdf(cheb1, t) / 0.5;
        }
      }
    }
    const double total = std::pow(static_cast<double>(q), sys.dim);
    if (total > 5e7) throw BudgetExceeded("tensor quadrature grid too large");
    const auto count = static_cast<Eigen::Index>(total);
    pts.resize(count, sys.dim);
    w.resize(count);
    std::vector<int> idx(sys.dim, 0);
    for (Eigen::Index r = 0; r < count; ++r) {
      double wr = 1.0;
      for (int a = 0; a < sys.dim; ++a) {
        pts(r, a) = rule.nodes[idx[a]];
        wr *= rule.weights[idx[a]];
      }
      w(r) = wr;
      for (int a = 0; a < sys.dim && ++idx[a] == q; ++a) idx[a] = 0;
    }
  }
  const Eigen::MatrixXd a = sampling_matrix(sys, set, pts, false);
  g.noalias() = a.transpose() * w.asDiagonal() * a;
  return g;
}

double gram_check(const OrthonormalSystem& sys, const IndexSet& set, const GramQuadrature& quadrature) {
  const Eigen::MatrixXd g = gram_matrix(sys, set, quadrature);
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

WeightScheme dominating_weights(const OrthonormalSystem& sys) {
  switch (sys.family) {
    case Family::real_trigonometric:
      return WeightScheme::constant(kSqrt2);
    case Family::chebyshev:
      return WeightScheme::hyperbolic();
    case Family::legendre:
    case Family::spherical_harmonics_real:
      return WeightScheme::legendre_dominating();
    case Family::legendre_preconditioned:
      return WeightScheme::constant(std::pow(3.0, sys.dim / 2.0));
    case Family::spherical_preconditioned:
      return WeightScheme::spherical(sys.spherical_c);
  }
  return WeightScheme::constant();
}

}  // namespace wl1
