#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace wl1 {

using MultiIndex = std::vector<int>;

inline constexpr std::size_t kDefaultEnumerationBudget = 10'000'000;

/// How the members of an index set are to be read.
///  - degree:    members are multi-indices in N_0^d (polynomial degrees).
///  - position:  d = 1, members are 1-based positions j = 1, 2, ...
///  - spherical: members are pairs (l, k) with |k| <= l; k >= 0 is the
///               cosine-type harmonic, k < 0 the sine-type one.
enum class IndexBase { degree, position, spherical };

/// Ordered, duplicate-free collection of basis indices.
///
/// Canonical order: for degree/position sets, nondecreasing prod(k_l + 1)
/// with ties broken colexicographically (last coordinate compared first), so
/// (1,0) precedes (0,1). Spherical sets order by l, then |k|, cosine before sine.
class IndexSet {
 public:
  IndexSet() = default;
  /// Sorts `members` into canonical order; throws UsageError on duplicates,
  /// arity mismatch or negative entries.
  IndexSet(int dim, std::vector<MultiIndex> members, IndexBase base = IndexBase::degree);

  int dim() const noexcept { return dim_; }
  IndexBase base() const noexcept { return base_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const MultiIndex& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<MultiIndex>& members() const noexcept { return members_; }

  std::optional<std::size_t> find(const MultiIndex& k) const;
  bool contains(const MultiIndex& k) const { return find(k).has_value(); }

  /// 1-based intrinsic position of a 1-D member (degree k maps to k + 1).
  int position(std::size_t i) const;

  /// Members selected by canonical positions (kept in canonical order).
  IndexSet subset(std::span<const std::size_t> positions) const;

  /// The first `n` members in canonical order.
  IndexSet prefix(std::size_t n) const;

  bool operator==(const IndexSet& other) const {
    return dim_ == other.dim_ && base_ == other.base_ && members_ == other.members_;
  }

 private:
  int dim_ = 1;
  IndexBase base_ = IndexBase::degree;
  std::vector<MultiIndex> members_;
  std::map<MultiIndex, std::size_t> lookup_;
};

/// Strict weak order implementing the canonical ordering for `base`.
bool canonical_less(const MultiIndex& a, const MultiIndex& b, IndexBase base);

struct Range1d {
  int n = 1;
};
struct TensorBox {
  int dim = 1;
  int n_per_axis = 1;  // k_l in {0, ..., n_per_axis - 1}
};
struct HyperbolicCross {
  int dim = 1;
  double s = 1.0;  // {k : prod(k_l + 1) <= s}
};
struct SphericalBand {
  int l_max = 0;  // {(l, k) : |k| <= l <= l_max}
};
using IndexSetSpec = std::variant<Range1d, TensorBox, HyperbolicCross, SphericalBand>;

IndexSet build_index_set(const IndexSetSpec& spec,
                         std::size_t budget = kDefaultEnumerationBudget);

/// Rule omega_j >= 1 attached to indices. Evaluation is pure; results are
/// clamped below at 1.
class WeightScheme {
 public:
  enum class Kind {
    constant,             // c
    power,                // j^(alpha/2), 1-D position j
    linear,               // j
    sqrt,                 // j^(1/2)
    sobolev,              // (1 + ||k||_2)^r
    mixed,                // prod (1 + |k_l|)^r
    hyperbolic,           // prod (k_l + 1)^(1/2)
    legendre_dominating,  // prod (2 k_l + 1)^(1/2)
    spherical,            // C * max(l, 1)^(1/6)
    table,                // explicit lookup
    derived               // factor * base^exponent
  };

  WeightScheme() = default;

  static WeightScheme constant(double c = 1.0);
  static WeightScheme power(double alpha);
  static WeightScheme linear();
  static WeightScheme sqrt();
  static WeightScheme sobolev(double r);
  static WeightScheme mixed(double r);
  static WeightScheme hyperbolic();
  static WeightScheme legendre_dominating();
  static WeightScheme spherical(double c = 1.0);
  static WeightScheme table(std::map<MultiIndex, double> values);
  /// factor * omega_base^exponent, e.g. v_j = 2 omega_j^2.
  static WeightScheme derived(const WeightScheme& base, double factor, double exponent);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return param_; }
  const WeightScheme* base_scheme() const noexcept { return base_.get(); }
  double exponent() const noexcept { return exponent_; }

  /// True for schemes whose formula uses a 1-D position j.
  bool positional() const noexcept;
  /// omega_j -> infinity along every unbounded direction of the index family.
  bool coercive() const noexcept;

  /// Unclamped formula value.
  double raw(const MultiIndex& k, IndexBase base) const;

  std::string describe() const;

 private:
  static WeightScheme of(Kind kind, double param);

  Kind kind_ = Kind::constant;
  double param_ = 1.0;
  double exponent_ = 1.0;
  std::shared_ptr<const WeightScheme> base_;
  std::shared_ptr<const std::map<MultiIndex, double>> table_;
};

/// omega for one index, clamped below at 1. Throws UsageError when a
/// positional scheme is applied to a multi-index.
double weight_of(const WeightScheme& scheme, const MultiIndex& k,
                 IndexBase base = IndexBase::degree);

/// Weights of every member of `set`, in canonical order.
Eigen::VectorXd weight_vector(const WeightScheme& scheme, const IndexSet& set);

/// omega(S) = sum of squared weights over the given positions of `set`.
double weighted_cardinality(std::span<const std::size_t> positions, const Eigen::VectorXd& weights);
double weighted_cardinality(const IndexSet& subset, const WeightScheme& scheme);

struct HalfBudget {};
/// Lambda_0^(s,p) = {j : omega_j v_j^(1-2/p) >= s^(1/2-1/p)}.
struct DominatingTruncation {
  double p = 1.0;
  WeightScheme v;
};
using TruncationRule = std::variant<HalfBudget, DominatingTruncation>;

/// Countable index family enumerated on demand by truncation_set.
struct IndexFamily {
  int dim = 1;
  IndexBase base = IndexBase::degree;
};

/// Truncation of a finite universe. Empty results are returned as empty sets.
IndexSet truncation_set(const IndexSet& universe, const WeightScheme& scheme, double s,
                        const TruncationRule& rule);

/// Truncation of a countable family; requires a coercive, coordinatewise
/// nondecreasing scheme (every built-in non-constant scheme with positive
/// parameter). Throws UsageError("truncation not finite") otherwise.
IndexSet truncation_set(const IndexFamily& family, const WeightScheme& scheme, double s,
                        const TruncationRule& rule,
                        std::size_t budget = kDefaultEnumerationBudget);

/// {"d", "base", "members", "weights"?}
nlohmann::json to_json(const IndexSet& set, const WeightScheme* scheme = nullptr);
IndexSet index_set_from_json(const nlohmann::json& j);

std::string to_string(IndexBase base);
IndexBase index_base_from_string(const std::string& name);

}  // namespace wl1
