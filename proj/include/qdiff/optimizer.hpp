#pragma once

// Derivative-free maximization of the profit functionals. The functionals are
// cheap, low dimensional and multimodal, so everything here is a dense scan
// followed by golden-section refinement; results are fully deterministic.

#include <functional>
#include <vector>

#include "qdiff/model.hpp"

namespace qdiff {

struct LocalMaximum {
  VectorXd argument;
  double value = 0.0;
};

struct OptimizationResult {
  VectorXd global_arg;
  double global_value = 0.0;
  /// Sorted by descending value; ties go to the (lexicographically) smaller
  /// argument.
  std::vector<LocalMaximum> local_maxima;
  int distinct_qualities = 0;
};

/// Two values closer than this are treated as equal when picking a winner.
inline constexpr double kValueTieTolerance = 1e-10;
/// Quality levels closer than this count as one level.
inline constexpr double kDistinctQualityTolerance = 1e-4;
/// A two-variant optimum only counts as differentiated with a larger gap.
inline constexpr double kDifferentiationGap = 1e-3;

struct ScanOptions {
  int grid_points = 1024;
  double tol = 1e-10;
};

/// Maximizes a scalar function on [lo, hi]. Every grid-local maximum (and
/// each boundary that beats its neighbour) is refined by golden-section
/// search; maxima closer than 10 tol are merged.
OptimizationResult maximize_1d(const std::function<double(double)>& objective, double lo,
                               double hi, const ScanOptions& options = {});

/// Golden-section maximization on [lo, hi]; returns the best of the
/// converged point and the two endpoints.
LocalMaximum golden_section_max(const std::function<double(double)>& objective, double lo,
                                double hi, double tol);

enum class QualityOrder {
  /// Search only Q_1 <= ... <= Q_M. With uniform weights this is the
  /// canonical form; with non-uniform weights it ties weight m to the m-th
  /// lowest quality.
  ascending,
  free,
};

struct QualitySearchOptions {
  int lattice_per_axis = 4;
  int line_grid = 32;
  double line_tol = 1e-10;
  double sweep_tol = 1e-10;
  int max_sweeps = 2000;
  QualityOrder order = QualityOrder::ascending;
  /// Above this many variants the two-level ansatz replaces the full search.
  int full_search_max_m = 4;
  /// Extra starting points for the full search, used after the lattice.
  std::vector<VectorXd> extra_starts;
  /// Skip the lattice (only meaningful with extra_starts).
  bool lattice = true;
};

/// Counts quality levels separated by more than kDistinctQualityTolerance.
int count_distinct_qualities(const VectorXd& qualities);

/// Maximizes expected_profit_multi over the qualities of M variants in
/// [0, price]. Empty weights mean uniform display weights.
OptimizationResult maximize_qualities(int m, const Population& pop, const CostModel& cost,
                                      const VectorXd& weights = VectorXd(),
                                      const LineShape& shape = {},
                                      const QualitySearchOptions& options = {});

/// Unconstrained multi-start coordinate search, whatever the value of M.
OptimizationResult maximize_qualities_full(int m, const Population& pop, const CostModel& cost,
                                           const VectorXd& weights = VectorXd(),
                                           const LineShape& shape = {},
                                           const QualitySearchOptions& options = {});

/// Best display of M - k copies of a low quality and k copies of a high one,
/// over all k. Uniform weights only.
OptimizationResult maximize_qualities_two_level(int m, const Population& pop,
                                                const CostModel& cost,
                                                const LineShape& shape = {},
                                                const QualitySearchOptions& options = {});

/// Profit of the two-level display without materializing the M-vector.
double two_level_profit(double q_low, double q_high, int n_low, int n_high,
                        const Population& pop, const CostModel& cost,
                        const LineShape& shape = {});

/// Joint maximization over 0 <= Q <= p <= alpha+1; homogeneous populations
/// only. global_arg is (Q, p).
OptimizationResult maximize_price_quality(const Population& pop, const CostModel& cost,
                                          double gamma = 1.0, const ScanOptions& options = {});

struct VariantCountRow {
  int m = 0;
  double x_star = 0.0;
  VectorXd qualities;
  int distinct_qualities = 0;
};

struct VariantCountTable {
  std::vector<VariantCountRow> rows;  // rows[i].m == i + 1
  int chosen_m = 0;
};

/// M = 1 has nothing to damage, so comparisons across M evaluate it as an
/// independent single product.
CostModel single_variant_cost(const CostModel& cost);

VariantCountTable best_variant_count(int m_max, const Population& pop, const CostModel& cost,
                                     const LineShape& shape = {},
                                     const QualitySearchOptions& options = {});

struct PhaseDecision {
  /// 0: produce nothing, 1: one variant, 2: two distinct variants.
  int label = 0;
  OptimizationResult single;
  OptimizationResult pair;
};

/// Compares the best one- and two-variant displays. Weights (for the pair)
/// may be empty for uniform display.
PhaseDecision differentiation_decision(const Population& pop, const CostModel& cost,
                                       const VectorXd& weights = VectorXd(),
                                       const LineShape& shape = {},
                                       const QualitySearchOptions& options = {});

}  // namespace qdiff
