#pragma once

// Spam economics: identical buyers shown M identical low-quality offers one
// after another, each judged independently by the acceptance probability.

#include <cstdint>
#include <optional>

namespace qdiff {

class SpamScenario {
 public:
  SpamScenario(double alpha, double z, std::optional<std::int64_t> perception_cap = std::nullopt);

  double alpha() const { return alpha_; }
  double z() const { return z_; }
  const std::optional<std::int64_t>& perception_cap() const { return perception_cap_; }

  /// Number of offers a buyer actually examines when m are displayed.
  std::int64_t perceived(std::int64_t m) const;

 private:
  double alpha_;
  double z_;
  std::optional<std::int64_t> perception_cap_;
};

struct SpamOptimum {
  double q_star = 0.0;
  std::int64_t m_star = 0;
  /// Closed-form optimal count at q_star (diagnostic only).
  double m_star_real = 0.0;
  double x_star = 0.0;
  /// z (1 + 1/alpha).
  double b = 0.0;
  /// Root of the small-z optimality condition (diagnostic only).
  std::optional<double> q_root;
};

/// 1 - (1 - P_A(q, alpha))^m.
double spam_accept_prob(double q, double alpha, std::int64_t m);

/// (1 - q)(1 - [1 - P_A]^m) - m z, with m clamped to the perception cap.
double spam_profit(double q, std::int64_t m, const SpamScenario& scenario);

/// Same with (1 - P_A)^m replaced by exp(-m P_A).
double spam_profit_exponential(double q, double m, const SpamScenario& scenario);

/// Closed-form optimal count (alpha+1)/(alpha q^alpha) ln[alpha(1-q)q^alpha / (z(alpha+1))].
/// Returns 1 when the log argument is <= 1.
double spam_optimal_m(double q, const SpamScenario& scenario);

/// Better of floor/ceil of spam_optimal_m under spam_profit.
std::int64_t spam_rounded_m(double q, const SpamScenario& scenario);

/// Largest count worth considering: min(perception cap, ceil(10/z)).
std::int64_t spam_count_ceiling(const SpamScenario& scenario);

/// Exact integer argmax of spam_profit over m in [1, spam_count_ceiling] at
/// fixed q (smaller m on ties). The profit is concave in m, so the scan stops
/// at the first non-positive forward difference.
std::int64_t spam_best_m(double q, const SpamScenario& scenario);

/// Large root of alpha b ln(q^alpha / b) = q^(alpha+1), the leading-order
/// optimality condition for small z. Empty when the condition has no root.
std::optional<double> spam_quality_root(const SpamScenario& scenario);

/// Optimum over (q, integer m) by dense scan in log q with exact best m at
/// each q. Throws NoProfitableSpam when the best profit is <= 0.
SpamOptimum spam_optimal_quality(const SpamScenario& scenario);

}  // namespace qdiff
