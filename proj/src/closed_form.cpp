#include "qdiff/closed_form.hpp"

#include "qdiff/optimizer.hpp"

namespace qdiff {

double cooperative_boundary(double z, double beta) {
  detail::require(z >= 0, "cooperative_boundary: z must be >= 0");
  detail::require(beta > 0, "cooperative_boundary: beta must be positive");
  const auto r = maximize_1d(
      [&](double alpha) { return optimal_profit_homogeneous(alpha, z, beta); }, 1e-3, 10.0,
      {.grid_points = 1024, .tol = 1e-8});
  return r.global_arg[0];
}

}  // namespace qdiff
