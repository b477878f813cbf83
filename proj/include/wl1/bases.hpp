#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "wl1/index_model.hpp"
#include "wl1/sampling.hpp"

namespace wl1 {

enum class Family {
  real_trigonometric,        // 1, sqrt2 cos(k pi t), sqrt2 sin(k pi t) on [-1, 1], dt/2
  chebyshev,                 // 1, sqrt2 cos(k arccos t), Chebyshev measure
  legendre,                  // sqrt(2k+1) P_k, dt/2
  legendre_preconditioned,   // sqrt(pi/2) (1-t^2)^(1/4) L_k, Chebyshev measure
  spherical_harmonics_real,  // real Y_l^k, sin(theta) dtheta dphi / (4 pi)
  spherical_preconditioned   // c (sin^2 theta |cos theta|)^(1/6) Y_l^k, tan13 measure
};

/// Default constant in the max(l, 1)^(1/6) sup-norm bound and weights of the
/// preconditioned spherical system. The largest ratio of sup norm to
/// max(l, 1)^(1/6) over l <= 50 is about 1.9794 (at l = 4).
inline constexpr double kSphericalPreconditionedC = 2.0;

/// Immutable descriptor of a basis family. `dim` > 1 tensorizes the three
/// polynomial families.
struct OrthonormalSystem {
  Family family = Family::chebyshev;
  int dim = 1;
  double spherical_c = kSphericalPreconditionedC;

  static OrthonormalSystem tensor(Family family, int dim);

  /// Orthogonalization measure nu.
  SamplingMeasure measure() const;
  /// Index base a set for this system is normally built in.
  IndexBase natural_base() const;
  int point_dim() const;
  bool spherical() const;
  std::string describe() const;
  void validate() const;
};

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// psi_k(t). Members of `base` position sets map to degree j - 1 for the
/// polynomial families; degree sets map to position k + 1 for the
/// trigonometric family. Throws DomainError outside the domain.
double evaluate(const OrthonormalSystem& system, const MultiIndex& k, std::span<const double> t,
                IndexBase base);
double evaluate(const OrthonormalSystem& system, const MultiIndex& k, std::span<const double> t);

/// Analytic upper bound on sup |psi_k|.
double sup_norm_bound(const OrthonormalSystem& system, const MultiIndex& k, IndexBase base);
double sup_norm_bound(const OrthonormalSystem& system, const MultiIndex& k);

/// True when psi_k(-t) = -psi_k(t). Always false on the sphere.
bool is_odd(const OrthonormalSystem& system, const MultiIndex& k, IndexBase base);

/// Row of psi_j(point) over all members of `set`; entry j equals
/// evaluate(system, set[j], point, set.base()) bit for bit.
void evaluate_row(const OrthonormalSystem& system, const IndexSet& set, std::span<const double> point,
                  std::span<double> out);

/// A_{l,j} = psi_j(t_l) for the rows of `points`, divided by sqrt(m) when
/// `normalized`. Domain errors carry the offending row.
Eigen::MatrixXd sampling_matrix(const OrthonormalSystem& system, const IndexSet& set,
                                const Eigen::MatrixXd& points, bool normalized);

struct GaussQuadrature {
  int n = 64;
};
struct MonteCarloQuadrature {
  std::size_t n = 100000;
  std::uint64_t seed = 0;
};
using GramQuadrature = std::variant<GaussQuadrature, MonteCarloQuadrature>;

/// Gram matrix int psi_j psi_k dnu under the given rule.
Eigen::MatrixXd gram_matrix(const OrthonormalSystem& system, const IndexSet& set,
                            const GramQuadrature& quadrature);

/// max_{j,k} |G_jk - delta_jk|.
double gram_check(const OrthonormalSystem& system, const IndexSet& set, const GramQuadrature& quadrature);

/// Default weight scheme with omega_j >= sup |psi_j| for the system.
WeightScheme dominating_weights(const OrthonormalSystem& system);

}  // namespace wl1
