#include "wl1/index_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "wl1/errors.hpp"

namespace wl1 {

namespace {

// Relative slack for the threshold predicates; weights such as sqrt(j) do
// not square back to j exactly.
constexpr double kThresholdSlack = 1e-12;

double product_key(const MultiIndex& k) {
  double p = 1.0;
  for (int v : k) p *= static_cast<double>(v) + 1.0;
  return p;
}

// Degrees a weight formula should see for a member of the given base.
MultiIndex degrees_of(const MultiIndex& k, IndexBase base) {
  switch (base) {
    case IndexBase::degree:
      return k;
    case IndexBase::position:
      return {k.at(0) - 1};
    case IndexBase::spherical:
      return {k.at(0)};
  }
  return k;
}

int position_of(const MultiIndex& k, IndexBase base) {
  if (k.size() != 1 || base == IndexBase::spherical)
    throw UsageError("positional weight scheme applied to a multi-index");
  return base == IndexBase::position ? k[0] : k[0] + 1;
}

void validate_member(const MultiIndex& k, int dim, IndexBase base) {
  if (static_cast<int>(k.size()) != dim)
    throw UsageError("index arity " + std::to_string(k.size()) + " does not match dimension " +
                     std::to_string(dim));
  switch (base) {
    case IndexBase::degree:
      for (int v : k)
        if (v < 0) throw UsageError("degree indices must be nonnegative");
      break;
    case IndexBase::position:
      if (k[0] < 1) throw UsageError("positions are 1-based");
      break;
    case IndexBase::spherical:
      if (k[0] < 0 || std::abs(k[1]) > k[0])
        throw UsageError("spherical index requires |k| <= l");
      break;
  }
}

}  // namespace

bool canonical_less(const MultiIndex& a, const MultiIndex& b, IndexBase base) {
  if (base == IndexBase::spherical) {
    if (a[0] != b[0]) return a[0] < b[0];
    const int aa = std::abs(a[1]);
    const int ab = std::abs(b[1]);
    if (aa != ab) return aa < ab;
    return a[1] > b[1];  // cosine (k >= 0) before sine
  }
  const double ka = product_key(a);
  const double kb = product_key(b);
  if (ka != kb) return ka < kb;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

IndexSet::IndexSet(int dim, std::vector<MultiIndex> members, IndexBase base)
    : dim_(dim), base_(base), members_(std::move(members)) {
  if (dim < 1) throw UsageError("index set dimension must be positive");
  if (base == IndexBase::position && dim != 1) throw UsageError("position sets are 1-D");
  if (base == IndexBase::spherical && dim != 2) throw UsageError("spherical sets hold (l, k) pairs");
  for (const auto& k : members_) validate_member(k, dim, base);
  std::sort(members_.begin(), members_.end(),
            [base](const MultiIndex& a, const MultiIndex& b) { return canonical_less(a, b, base); });
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (!lookup_.emplace(members_[i], i).second) throw UsageError("index set members must be distinct");
  }
}

std::optional<std::size_t> IndexSet::find(const MultiIndex& k) const {
  auto it = lookup_.find(k);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

int IndexSet::position(std::size_t i) const { return position_of(members_.at(i), base_); }

IndexSet IndexSet::subset(std::span<const std::size_t> positions) const {
  std::vector<MultiIndex> picked;
  picked.reserve(positions.size());
  for (std::size_t p : positions) picked.push_back(members_.at(p));
  return IndexSet(dim_, std::move(picked), base_);
}

IndexSet IndexSet::prefix(std::size_t n) const {
  n = std::min(n, members_.size());
  return IndexSet(dim_, std::vector<MultiIndex>(members_.begin(), members_.begin() + n), base_);
}

IndexSet build_index_set(const IndexSetSpec& spec, std::size_t budget) {
  return std::visit(
      [budget](const auto& s) -> IndexSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Range1d>) {
          if (s.n < 1) throw UsageError("range_1d requires N >= 1");
          if (static_cast<std::size_t>(s.n) > budget)
            throw BudgetExceeded("range_1d exceeds enumeration budget");
          std::vector<MultiIndex> m;
          m.reserve(s.n);
          for (int j = 1; j <= s.n; ++j) m.push_back({j});
          return IndexSet(1, std::move(m), IndexBase::position);
        } else if constexpr (std::is_same_v<T, TensorBox>) {
          if (s.dim < 1 || s.n_per_axis < 1) throw UsageError("tensor_box requires d >= 1, N >= 1");
          const double count = std::pow(static_cast<double>(s.n_per_axis), s.dim);
          if (count > static_cast<double>(budget))
            throw BudgetExceeded("tensor_box(" + std::to_string(s.dim) + ", " +
                                 std::to_string(s.n_per_axis) + ") exceeds enumeration budget");
          std::vector<MultiIndex> m;
          m.reserve(static_cast<std::size_t>(count));
          MultiIndex k(s.dim, 0);
          while (true) {
            m.push_back(k);
            int axis = 0;
            while (axis < s.dim && ++k[axis] == s.n_per_axis) k[axis++] = 0;
            if (axis == s.dim) break;
          }
          return IndexSet(s.dim, std::move(m));
        } else if constexpr (std::is_same_v<T, HyperbolicCross>) {
          if (s.dim < 1 || s.s < 1.0) throw UsageError("hyperbolic_cross requires d >= 1, s >= 1");
          std::vector<MultiIndex> m;
          MultiIndex k(s.dim, 0);
          std::function<void(int, double)> rec = [&](int axis, double prod) {
            if (axis == s.dim) {
              if (m.size() >= budget) throw BudgetExceeded("hyperbolic_cross exceeds enumeration budget");
              m.push_back(k);
              return;
            }
            for (int v = 0; prod * (v + 1) <= s.s; ++v) {
              k[axis] = v;
              rec(axis + 1, prod * (v + 1));
            }
            k[axis] = 0;
          };
          rec(0, 1.0);
          return IndexSet(s.dim, std::move(m));
        } else {
          if (s.l_max < 0) throw UsageError("spherical band requires l_max >= 0");
          const double count = std::pow(static_cast<double>(s.l_max) + 1.0, 2);
          if (count > static_cast<double>(budget))
            throw BudgetExceeded("spherical band exceeds enumeration budget");
          std::vector<MultiIndex> m;
          for (int l = 0; l <= s.l_max; ++l)
            for (int k = -l; k <= l; ++k) m.push_back({l, k});
          return IndexSet(2, std::move(m), IndexBase::spherical);
        }
      },
      spec);
}

// ---------------------------------------------------------------------------
// Weight schemes

WeightScheme WeightScheme::of(Kind kind, double param) {
  WeightScheme w;
  w.kind_ = kind;
  w.param_ = param;
  return w;
}

WeightScheme WeightScheme::constant(double c) { return of(Kind::constant, c); }
WeightScheme WeightScheme::power(double alpha) { return of(Kind::power, alpha); }
WeightScheme WeightScheme::linear() { return of(Kind::linear, 1.0); }
WeightScheme WeightScheme::sqrt() { return of(Kind::sqrt, 0.5); }
WeightScheme WeightScheme::sobolev(double r) { return of(Kind::sobolev, r); }
WeightScheme WeightScheme::mixed(double r) { return of(Kind::mixed, r); }
WeightScheme WeightScheme::hyperbolic() { return of(Kind::hyperbolic, 0.5); }
WeightScheme WeightScheme::legendre_dominating() { return of(Kind::legendre_dominating, 0.5); }
WeightScheme WeightScheme::spherical(double c) { return of(Kind::spherical, c); }

WeightScheme WeightScheme::table(std::map<MultiIndex, double> values) {
  WeightScheme w;
  w.kind_ = Kind::table;
  w.table_ = std::make_shared<const std::map<MultiIndex, double>>(std::move(values));
  return w;
}

WeightScheme WeightScheme::derived(const WeightScheme& base, double factor, double exponent) {
  if (!(factor > 0.0)) throw UsageError("derived weight factor must be positive");
  WeightScheme w;
  w.kind_ = Kind::derived;
  w.param_ = factor;
  w.exponent_ = exponent;
  w.base_ = std::make_shared<const WeightScheme>(base);
  return w;
}

bool WeightScheme::positional() const noexcept {
  return kind_ == Kind::power || kind_ == Kind::linear || kind_ == Kind::sqrt;
}

bool WeightScheme::coercive() const noexcept {
  switch (kind_) {
    case Kind::constant:
    case Kind::table:
      return false;
    case Kind::power:
    case Kind::sobolev:
    case Kind::mixed:
    case Kind::spherical:
      return param_ > 0.0;
    case Kind::linear:
    case Kind::sqrt:
    case Kind::hyperbolic:
    case Kind::legendre_dominating:
      return true;
    case Kind::derived:
      return base_ && base_->coercive() && exponent_ > 0.0;
  }
  return false;
}

double WeightScheme::raw(const MultiIndex& k, IndexBase base) const {
  switch (kind_) {
    case Kind::constant:
      return param_;
    case Kind::power:
      return std::pow(static_cast<double>(position_of(k, base)), param_ / 2.0);
    case Kind::linear:
      return static_cast<double>(position_of(k, base));
    case Kind::sqrt:
      return std::sqrt(static_cast<double>(position_of(k, base)));
    case Kind::sobolev: {
      double sq = 0.0;
      for (int v : degrees_of(k, base)) sq += static_cast<double>(v) * v;
      return std::pow(1.0 + std::sqrt(sq), param_);
    }
    case Kind::mixed: {
      double p = 1.0;
      for (int v : degrees_of(k, base)) p *= 1.0 + std::abs(v);
      return std::pow(p, param_);
    }
    case Kind::hyperbolic: {
      double p = 1.0;
      for (int v : degrees_of(k, base)) p *= static_cast<double>(v) + 1.0;
      return std::sqrt(p);
    }
    case Kind::legendre_dominating: {
      double p = 1.0;
      for (int v : degrees_of(k, base)) p *= 2.0 * v + 1.0;
      return std::sqrt(p);
    }
    case Kind::spherical:
      if (base != IndexBase::spherical)
        throw UsageError("spherical weight scheme needs (l, k) indices");
      return param_ * std::pow(static_cast<double>(std::max(k[0], 1)), 1.0 / 6.0);
    case Kind::table: {
      auto it = table_->find(k);
      if (it == table_->end()) throw UsageError("index missing from explicit weight table");
      return it->second;
    }
    case Kind::derived:
      return param_ * std::pow(weight_of(*base_, k, base), exponent_);
  }
  return 1.0;
}

std::string WeightScheme::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::constant: os << "constant(" << param_ << ")"; break;
    case Kind::power: os << "power(" << param_ << ")"; break;
    case Kind::linear: os << "linear"; break;
    case Kind::sqrt: os << "sqrt"; break;
    case Kind::sobolev: os << "sobolev(" << param_ << ")"; break;
    case Kind::mixed: os << "mixed(" << param_ << ")"; break;
    case Kind::hyperbolic: os << "hyperbolic"; break;
    case Kind::legendre_dominating: os << "legendre_dominating"; break;
    case Kind::spherical: os << "spherical(" << param_ << ")"; break;
    case Kind::table: os << "table[" << table_->size() << "]"; break;
    case Kind::derived:
      os << param_ << "*" << base_->describe() << "^" << exponent_;
      break;
  }
  return os.str();
}

double weight_of(const WeightScheme& scheme, const MultiIndex& k, IndexBase base) {
  return std::max(1.0, scheme.raw(k, base));
}

Eigen::VectorXd weight_vector(const WeightScheme& scheme, const IndexSet& set) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i)
    w(static_cast<Eigen::Index>(i)) = weight_of(scheme, set[i], set.base());
  return w;
}

double weighted_cardinality(std::span<const std::size_t> positions, const Eigen::VectorXd& weights) {
  double total = 0.0;
  for (std::size_t p : positions) {
    const double w = weights(static_cast<Eigen::Index>(p));
    total += w * w;
  }
  return total;
}

double weighted_cardinality(const IndexSet& subset, const WeightScheme& scheme) {
  double total = 0.0;
  for (const auto& k : subset.members()) {
    const double w = weight_of(scheme, k, subset.base());
    total += w * w;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Truncation

namespace {

void check_domination(const DominatingTruncation& rule, double omega, double v) {
  const double needed = 2.0 * std::pow(omega, 1.0 / (1.0 - rule.p / 2.0));
  if (v < needed * (1.0 - kThresholdSlack))
    throw PreconditionError("v does not dominate omega: need v_j >= 2 omega_j^(1/(1-p/2))");
}

bool keep(const TruncationRule& rule, const WeightScheme& scheme, const MultiIndex& k,
          IndexBase base, double s) {
  const double omega = weight_of(scheme, k, base);
  if (std::holds_alternative<HalfBudget>(rule)) {
    return omega * omega <= (s / 2.0) * (1.0 + kThresholdSlack);
  }
  const auto& dom = std::get<DominatingTruncation>(rule);
  const double v = weight_of(dom.v, k, base);
  check_domination(dom, omega, v);
  const double lhs = omega * std::pow(v, 1.0 - 2.0 / dom.p);
  const double rhs = std::pow(s, 0.5 - 1.0 / dom.p);
  return lhs >= rhs * (1.0 - kThresholdSlack);
}

void check_rule(const TruncationRule& rule, double s) {
  if (!(s > 0.0)) throw UsageError("truncation requires s > 0");
  if (const auto* dom = std::get_if<DominatingTruncation>(&rule)) {
    if (!(dom->p > 0.0 && dom->p <= 1.0)) throw UsageError("dominating truncation requires 0 < p <= 1");
  }
}

}  // namespace

IndexSet truncation_set(const IndexSet& universe, const WeightScheme& scheme, double s,
                        const TruncationRule& rule) {
  check_rule(rule, s);
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < universe.size(); ++i)
    if (keep(rule, scheme, universe[i], universe.base(), s)) picked.push_back(i);
  return universe.subset(picked);
}

IndexSet truncation_set(const IndexFamily& family, const WeightScheme& scheme, double s,
                        const TruncationRule& rule, std::size_t budget) {
  check_rule(rule, s);
  if (!scheme.coercive()) throw UsageError("truncation not finite: weight scheme is not coercive");
  if (const auto* dom = std::get_if<DominatingTruncation>(&rule)) {
    // Every member of Lambda_0^(s,p) has omega^2 <= s/2 when v dominates
    // omega everywhere; for a countable family that can only be verified
    // symbolically, so v must be factor * omega^exponent.
    const auto* vb = dom->v.base_scheme();
    const bool same_base = dom->v.kind() == WeightScheme::Kind::derived && vb != nullptr &&
                           vb->describe() == scheme.describe();
    if (!same_base || dom->v.parameter() < 2.0 ||
        dom->v.exponent() < 1.0 / (1.0 - dom->p / 2.0))
      throw PreconditionError(
          "countable truncation needs v = c * omega^b with c >= 2 and b >= 1/(1-p/2)");
  }
  const double bound = (s / 2.0) * (1.0 + kThresholdSlack);
  auto w2 = [&](const MultiIndex& k) {
    const double w = weight_of(scheme, k, family.base);
    return w * w;
  };

  std::vector<MultiIndex> candidates;
  auto push = [&](MultiIndex k) {
    if (candidates.size() >= budget) throw BudgetExceeded("truncation exceeds enumeration budget");
    candidates.push_back(std::move(k));
  };

  if (family.base == IndexBase::spherical) {
    for (int l = 0; w2({l, 0}) <= bound; ++l)
      for (int k = -l; k <= l; ++k) push({l, k});
  } else if (family.dim == 1) {
    const int start = family.base == IndexBase::position ? 1 : 0;
    for (int j = start; w2({j}) <= bound; ++j) push({j});
  } else {
    MultiIndex k(family.dim, 0);
    std::function<void(int)> rec = [&](int axis) {
      if (axis == family.dim) {
        push(k);
        return;
      }
      for (k[axis] = 0; w2(k) <= bound; ++k[axis]) rec(axis + 1);
      k[axis] = 0;
    };
    rec(0);
  }

  std::vector<MultiIndex> kept;
  for (auto& k : candidates)
    if (keep(rule, scheme, k, family.base, s)) kept.push_back(std::move(k));
  return IndexSet(family.dim, std::move(kept), family.base);
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_string(IndexBase base) {
  switch (base) {
    case IndexBase::degree: return "degree";
    case IndexBase::position: return "position";
    case IndexBase::spherical: return "spherical";
  }
  return "degree";
}

IndexBase index_base_from_string(const std::string& name) {
  if (name == "degree") return IndexBase::degree;
  if (name == "position") return IndexBase::position;
  if (name == "spherical") return IndexBase::spherical;
  throw UsageError("unknown index base '" + name + "'");
}

nlohmann::json to_json(const IndexSet& set, const WeightScheme* scheme) {
  nlohmann::json j;
  j["d"] = set.dim();
  j["base"] = to_string(set.base());
  j["members"] = set.members();
  if (scheme != nullptr) {
    const Eigen::VectorXd w = weight_vector(*scheme, set);
    j["weights"] = std::vector<double>(w.data(), w.data() + w.size());
  }
  return j;
}

IndexSet index_set_from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  const IndexBase base = index_base_from_string(j.value("base", std::string("degree")));
  auto members = j.at("members").get<std::vector<MultiIndex>>();
  IndexSet set(d, std::move(members), base);
  return set;
}

}  // namespace wl1
