#pragma once

// Acceptance / selection probabilities and the expected-profit functionals of
// the probabilistic consumer-choice market. Everything here is a pure function
// of value-semantic inputs, templated on the scalar type.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qdiff/errors.hpp"

namespace qdiff {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Eigen::Index;
using Eigen::VectorXd;

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

template <typename Scalar>
constexpr Scalar sum_tolerance() {
  return Scalar(1e-12);
}

}  // namespace detail

/// Homogeneous sub-population: acceptance parameter alpha, selection
/// parameter sigma, and its share of the buyers.
template <typename Scalar>
class BuyerGroupT {
 public:
  BuyerGroupT(Scalar alpha, Scalar sigma, Scalar proportion = Scalar(1))
      : alpha_(alpha), sigma_(sigma), proportion_(proportion) {
    detail::require(alpha >= 0, "buyer group: alpha must be >= 0");
    detail::require(sigma >= 0, "buyer group: sigma must be >= 0");
    detail::require(proportion >= 0 && proportion <= 1,
                    "buyer group: proportion must lie in [0,1]");
  }

  Scalar alpha() const { return alpha_; }
  Scalar sigma() const { return sigma_; }
  Scalar proportion() const { return proportion_; }

 private:
  Scalar alpha_;
  Scalar sigma_;
  Scalar proportion_;
};

/// Finite mixture of buyer groups. n_buyers only matters for sampling and for
/// converting per-buyer profits back to totals.
template <typename Scalar>
class PopulationT {
 public:
  using Group = BuyerGroupT<Scalar>;

  explicit PopulationT(std::vector<Group> groups, std::int64_t n_buyers = 1)
      : groups_(std::move(groups)), n_buyers_(n_buyers) {
    detail::require(!groups_.empty(), "population: at least one group required");
    detail::require(n_buyers_ >= 1, "population: n_buyers must be positive");
    Scalar total = 0;
    for (const auto& g : groups_) total += g.proportion();
    detail::require(std::abs(total - Scalar(1)) <= detail::sum_tolerance<Scalar>(),
                    "population: proportions must sum to 1");
  }

  static PopulationT homogeneous(Scalar alpha, Scalar sigma = Scalar(0)) {
    return PopulationT({Group(alpha, sigma, Scalar(1))});
  }

  /// Two groups with proportions (1 - c2, c2).
  static PopulationT two_groups(Scalar alpha1, Scalar sigma1, Scalar alpha2,
                                Scalar sigma2, Scalar c2) {
    detail::require(c2 >= 0 && c2 <= 1, "population: c2 must lie in [0,1]");
    return PopulationT({Group(alpha1, sigma1, Scalar(1) - c2), Group(alpha2, sigma2, c2)});
  }

  const std::vector<Group>& groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }
  std::int64_t n_buyers() const { return n_buyers_; }

  Scalar min_alpha() const {
    Scalar m = groups_.front().alpha();
    for (const auto& g : groups_) m = std::min(m, g.alpha());
    return m;
  }

 private:
  std::vector<Group> groups_;
  std::int64_t n_buyers_;
};

/// Price and the two shape exponents shared by every variant of a line:
/// beta bends the acceptance prefactor 1 - (alpha+1)^-beta, gamma the unit
/// cost Q^gamma.
template <typename Scalar>
struct LineShapeT {
  Scalar price = Scalar(1);
  Scalar beta = Scalar(1);
  Scalar gamma = Scalar(1);
};

template <typename Scalar>
class ProductLineT {
 public:
  using Vector = VectorX<Scalar>;
  using Shape = LineShapeT<Scalar>;

  /// Empty weights mean uniform display weights 1/M.
  explicit ProductLineT(Vector qualities, Vector weights = Vector(), Shape shape = {})
      : qualities_(std::move(qualities)), weights_(std::move(weights)), shape_(shape) {
    const Index m = qualities_.size();
    detail::require(m >= 1, "product line: at least one variant required");
    detail::require(shape_.price > 0, "product line: price must be positive");
    detail::require(shape_.beta > 0, "product line: beta must be positive");
    detail::require(shape_.gamma > 0, "product line: gamma must be positive");
    for (Index i = 0; i < m; ++i) {
      detail::require(qualities_[i] >= 0 && qualities_[i] <= shape_.price,
                      "product line: qualities must lie in [0, price]");
    }
    if (weights_.size() == 0) {
      weights_ = Vector::Constant(m, Scalar(1) / Scalar(m));
    }
    detail::require(weights_.size() == m, "product line: one weight per variant required");
    detail::require((weights_.array() >= 0).all(), "product line: weights must be >= 0");
    detail::require(std::abs(weights_.sum() - Scalar(1)) <= detail::sum_tolerance<Scalar>(),
                    "product line: weights must sum to 1");
  }

  const Vector& qualities() const { return qualities_; }
  const Vector& weights() const { return weights_; }
  const Shape& shape() const { return shape_; }
  Scalar price() const { return shape_.price; }
  Scalar beta() const { return shape_.beta; }
  Scalar gamma() const { return shape_.gamma; }
  Index size() const { return qualities_.size(); }

 private:
  Vector qualities_;
  Vector weights_;
  Shape shape_;
};

enum class ProductionMode {
  independent,
  /// One line is produced and part of it degraded: every item costs as much
  /// as the best variant and the fixed cost is paid once.
  damaged_goods,
};

template <typename Scalar>
class CostModelT {
 public:
  explicit CostModelT(Scalar z = Scalar(0), ProductionMode mode = ProductionMode::independent)
      : z_(z), mode_(mode) {
    detail::require(z >= 0, "cost model: z must be >= 0");
  }

  Scalar z() const { return z_; }
  ProductionMode mode() const { return mode_; }

 private:
  Scalar z_;
  ProductionMode mode_;
};

using BuyerGroup = BuyerGroupT<double>;
using Population = PopulationT<double>;
using LineShape = LineShapeT<double>;
using ProductLine = ProductLineT<double>;
using CostModel = CostModelT<double>;

// ---------------------------------------------------------------------------
// Probabilities. 0^0 is taken as 1 everywhere (std::pow already does this).

/// P_A(Q, alpha) = (1 - (alpha+1)^-beta) Q^alpha for Q in [0,1].
template <typename Scalar>
Scalar acceptance_prob(Scalar q, std::type_identity_t<Scalar> alpha,
                       std::type_identity_t<Scalar> beta = Scalar(1)) {
  detail::require(q >= 0 && q <= 1, "acceptance_prob: quality must lie in [0,1]");
  detail::require(alpha >= 0, "acceptance_prob: alpha must be >= 0");
  detail::require(beta > 0, "acceptance_prob: beta must be positive");
  using std::pow;
  return (Scalar(1) - pow(alpha + Scalar(1), -beta)) * pow(q, alpha);
}

/// Price-aware acceptance (1 - p/(alpha+1)) (Q/p)^alpha, valid for Q <= p <= alpha+1.
template <typename Scalar>
Scalar acceptance_prob_priced(Scalar q, std::type_identity_t<Scalar> price,
                              std::type_identity_t<Scalar> alpha) {
  detail::require(alpha >= 0, "acceptance_prob_priced: alpha must be >= 0");
  detail::require(price > 0, "acceptance_prob_priced: price must be positive");
  detail::require(price <= alpha + Scalar(1), "acceptance_prob_priced: price exceeds alpha+1");
  detail::require(q >= 0 && q <= price, "acceptance_prob_priced: quality must lie in [0, price]");
  using std::pow;
  return (Scalar(1) - price / (alpha + Scalar(1))) * pow(q / price, alpha);
}

/// Weighted selection probabilities r_m Q_m^sigma / sum_m' r_m' Q_m'^sigma for
/// all variants at once. If no displayed variant has positive weighted
/// attraction the weights themselves are returned.
template <typename DerivedQ, typename DerivedR>
VectorX<typename DerivedQ::Scalar> selection_probs(
    const Eigen::MatrixBase<DerivedQ>& qualities, const Eigen::MatrixBase<DerivedR>& weights,
    typename DerivedQ::Scalar sigma) {
  using Scalar = typename DerivedQ::Scalar;
  detail::require(sigma >= 0, "selection_prob: sigma must be >= 0");
  detail::require(qualities.size() == weights.size() && qualities.size() > 0,
                  "selection_prob: qualities and weights must have equal, nonzero length");
  const VectorX<Scalar> attraction =
      (weights.array() * qualities.array().pow(sigma)).matrix();
  const Scalar total = attraction.sum();
  if (total == Scalar(0)) return weights;
  return attraction / total;
}

/// Probability that a buyer with selection parameter sigma picks variant m
/// (zero-based).
template <typename DerivedQ, typename DerivedR>
typename DerivedQ::Scalar selection_prob(Index m, const Eigen::MatrixBase<DerivedQ>& qualities,
                                         const Eigen::MatrixBase<DerivedR>& weights,
                                         typename DerivedQ::Scalar sigma) {
  detail::require(m >= 0 && m < qualities.size(), "selection_prob: variant index out of range");
  return selection_probs(qualities, weights, sigma)[m];
}

/// Probability of accepting at least one of several independently judged
/// offers, 1 - prod_a (1 - P_A(Q_a)).
template <typename Derived>
typename Derived::Scalar at_least_one_acceptance(const Eigen::MatrixBase<Derived>& qualities,
                                                 typename Derived::Scalar alpha,
                                                 typename Derived::Scalar beta = 1) {
  using Scalar = typename Derived::Scalar;
  Scalar reject_all = 1;
  for (Index a = 0; a < qualities.size(); ++a) {
    reject_all *= Scalar(1) - acceptance_prob<Scalar>(qualities[a], alpha, beta);
  }
  return Scalar(1) - reject_all;
}

// ---------------------------------------------------------------------------
// Expected profit per buyer.

namespace detail {

template <typename Scalar>
void check_price_bound(Scalar price, const PopulationT<Scalar>& pop) {
  require(price <= pop.min_alpha() + Scalar(1),
          "profit: price exceeds alpha+1 for at least one buyer group");
}

/// Acceptance used by a product line: the unit-price form carries the beta
/// prefactor; any other price switches to the price-aware form.
template <typename Scalar>
Scalar line_acceptance(Scalar q, Scalar alpha, const LineShapeT<Scalar>& shape) {
  if (shape.price == Scalar(1)) return acceptance_prob<Scalar>(q, alpha, shape.beta);
  require(shape.beta == Scalar(1), "profit: beta != 1 is only defined at unit price");
  return acceptance_prob_priced<Scalar>(q, shape.price, alpha);
}

}  // namespace detail

/// Single product of quality q: (1 - q^gamma) sum_i c_i P_A(q, alpha_i) - z.
template <typename Scalar>
Scalar expected_profit_single(Scalar q, const PopulationT<Scalar>& pop,
                              const CostModelT<Scalar>& cost,
                              std::type_identity_t<Scalar> beta = Scalar(1),
                              std::type_identity_t<Scalar> gamma = Scalar(1)) {
  detail::require(cost.mode() == ProductionMode::independent,
                  "profit: damaged-goods mode needs at least two variants");
  detail::require(gamma > 0, "profit: gamma must be positive");
  Scalar demand = 0;
  for (const auto& g : pop.groups()) {
    demand += g.proportion() * acceptance_prob<Scalar>(q, g.alpha(), beta);
  }
  using std::pow;
  return (Scalar(1) - pow(q, gamma)) * demand - cost.z();
}

/// Probability per buyer that the sale goes to variant k, for every k.
template <typename Scalar>
VectorX<Scalar> expected_sales(const ProductLineT<Scalar>& line, const PopulationT<Scalar>& pop) {
  const Index m = line.size();
  const auto& q = line.qualities();
  VectorX<Scalar> sold = VectorX<Scalar>::Zero(m);
  for (const auto& g : pop.groups()) {
    const VectorX<Scalar> ps = selection_probs(q, line.weights(), g.sigma());
    for (Index k = 0; k < m; ++k) {
      sold[k] += g.proportion() * ps[k] * detail::line_acceptance(q[k], g.alpha(), line.shape());
    }
  }
  return sold;
}

/// M displayed variants with (weighted) selection followed by acceptance.
template <typename Scalar>
Scalar expected_profit_multi(const ProductLineT<Scalar>& line, const PopulationT<Scalar>& pop,
                             const CostModelT<Scalar>& cost) {
  using std::pow;
  const Index m = line.size();
  const auto& q = line.qualities();
  const auto& shape = line.shape();
  if (shape.price != Scalar(1)) detail::check_price_bound(shape.price, pop);

  const bool damaged = cost.mode() == ProductionMode::damaged_goods;
  detail::require(!damaged || m >= 2, "profit: damaged-goods mode needs at least two variants");

  VectorX<Scalar> margin(m);
  if (damaged) {
    margin.setConstant(shape.price - pow(q.maxCoeff(), shape.gamma));
  } else {
    for (Index k = 0; k < m; ++k) margin[k] = shape.price - pow(q[k], shape.gamma);
  }

  const Scalar fixed = damaged ? cost.z() : Scalar(m) * cost.z();
  return margin.dot(expected_sales(line, pop)) - fixed;
}

/// Single product with a free price p: (p - q^gamma) sum_i c_i P_A(q, p, alpha_i) - z.
template <typename Scalar>
Scalar expected_profit_priced(Scalar q, std::type_identity_t<Scalar> price,
                              const PopulationT<Scalar>& pop, const CostModelT<Scalar>& cost,
                              std::type_identity_t<Scalar> gamma = Scalar(1)) {
  detail::check_price_bound(price, pop);
  detail::require(cost.mode() == ProductionMode::independent,
                  "profit: damaged-goods mode needs at least two variants");
  detail::require(gamma > 0, "profit: gamma must be positive");
  Scalar demand = 0;
  for (const auto& g : pop.groups()) {
    demand += g.proportion() * acceptance_prob_priced<Scalar>(q, price, g.alpha());
  }
  using std::pow;
  return (price - pow(q, gamma)) * demand - cost.z();
}

}  // namespace qdiff
