#pragma once

#include <cmath>
#include <type_traits>

#include "qdiff/model.hpp"

namespace qdiff {

/// Optimal quality alpha/(alpha+1) for a homogeneous population.
template <typename Scalar>
Scalar optimal_quality_homogeneous(Scalar alpha) {
  detail::require(alpha >= 0, "optimal_quality_homogeneous: alpha must be >= 0");
  return alpha / (alpha + Scalar(1));
}

/// Optimal profit per buyer for a homogeneous population. With beta = 1 this
/// is alpha^(alpha+1) / (alpha+1)^(alpha+2) - z; the prefactor exponent only
/// rescales the profit because it does not depend on quality.
template <typename Scalar>
Scalar optimal_profit_homogeneous(Scalar alpha, std::type_identity_t<Scalar> z,
                                  std::type_identity_t<Scalar> beta = Scalar(1)) {
  detail::require(alpha >= 0, "optimal_profit_homogeneous: alpha must be >= 0");
  detail::require(z >= 0, "optimal_profit_homogeneous: z must be >= 0");
  detail::require(beta > 0, "optimal_profit_homogeneous: beta must be positive");
  using std::pow;
  const Scalar a1 = alpha + Scalar(1);
  if (beta == Scalar(1)) return pow(alpha, a1) / pow(a1, alpha + Scalar(2)) - z;
  return (Scalar(1) - pow(a1, -beta)) * pow(alpha / a1, alpha) / a1 - z;
}

template <typename Scalar>
struct PriceQualityOptimumT {
  Scalar q_star;
  Scalar p_star;
  Scalar x_star;
};
using PriceQualityOptimum = PriceQualityOptimumT<double>;

/// Joint quality/price optimum for identical buyers: Q* = alpha/2,
/// p* = (alpha+1)/2, so the margin p* - Q* is always 1/2.
template <typename Scalar>
PriceQualityOptimumT<Scalar> optimal_price_quality(Scalar alpha,
                                                   std::type_identity_t<Scalar> z = Scalar(0)) {
  detail::require(alpha >= 0, "optimal_price_quality: alpha must be >= 0");
  const Scalar q = alpha / Scalar(2);
  const Scalar p = (alpha + Scalar(1)) / Scalar(2);
  const auto pop = PopulationT<Scalar>::homogeneous(alpha);
  return {q, p, expected_profit_priced<Scalar>(q, p, pop, CostModelT<Scalar>(z))};
}

/// The alpha at which the homogeneous optimal profit peaks; below it buyers
/// and vendor both gain from sharper quality perception, above it the vendor
/// loses. Located numerically on [1e-3, 10] to 1e-6 in alpha.
double cooperative_boundary(double z, double beta = 1.0);

}  // namespace qdiff
