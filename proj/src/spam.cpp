#include "qdiff/spam.hpp"

#include <algorithm>
#include <cmath>

#include "qdiff/errors.hpp"
#include "qdiff/model.hpp"
#include "qdiff/optimizer.hpp"

namespace qdiff {
namespace {

// log(1 - P_A), accurate for tiny P_A.
double log_reject(double q, double alpha) {
  return std::log1p(-acceptance_prob(q, alpha));
}

void check_quality(double q) {
  detail::require(q >= 0 && q <= 1, "spam: quality must lie in [0,1]");
}

}  // namespace

SpamScenario::SpamScenario(double alpha, double z, std::optional<std::int64_t> perception_cap)
    : alpha_(alpha), z_(z), perception_cap_(perception_cap) {
  detail::require(alpha > 0, "spam scenario: alpha must be positive");
  detail::require(z >= 0, "spam scenario: z must be >= 0");
  detail::require(!perception_cap || *perception_cap >= 1,
                  "spam scenario: perception cap must be >= 1");
}

std::int64_t SpamScenario::perceived(std::int64_t m) const {
  return perception_cap_ ? std::min(m, *perception_cap_) : m;
}

double spam_accept_prob(double q, double alpha, std::int64_t m) {
  check_quality(q);
  detail::require(m >= 1, "spam: at least one offer required");
  return -std::expm1(static_cast<double>(m) * std::log1p(-acceptance_prob(q, alpha)));
}

double spam_profit(double q, std::int64_t m, const SpamScenario& scenario) {
  detail::require(m >= 1, "spam: at least one offer required");
  const std::int64_t shown = scenario.perceived(m);
  return (1.0 - q) * spam_accept_prob(q, scenario.alpha(), shown) -
         static_cast<double>(shown) * scenario.z();
}

double spam_profit_exponential(double q, double m, const SpamScenario& scenario) {
  check_quality(q);
  detail::require(m >= 1, "spam: at least one offer required");
  if (scenario.perception_cap()) m = std::min(m, static_cast<double>(*scenario.perception_cap()));
  const double p = acceptance_prob(q, scenario.alpha());
  return (1.0 - q) * -std::expm1(-p * m) - m * scenario.z();
}

double spam_optimal_m(double q, const SpamScenario& scenario) {
  check_quality(q);
  const double a = scenario.alpha();
  const double qa = std::pow(q, a);
  const double arg = a * (1.0 - q) * qa / (scenario.z() * (a + 1.0));
  if (!(arg > 1.0)) return 1.0;
  return (a + 1.0) / (a * qa) * std::log(arg);
}

std::int64_t spam_rounded_m(double q, const SpamScenario& scenario) {
  const double real = std::max(1.0, spam_optimal_m(q, scenario));
  const auto lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(real)));
  const auto hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(real)));
  const std::int64_t a = scenario.perceived(lo);
  const std::int64_t b = scenario.perceived(hi);
  return spam_profit(q, b, scenario) > spam_profit(q, a, scenario) ? b : a;
}

std::int64_t spam_count_ceiling(const SpamScenario& scenario) {
  detail::require(scenario.z() > 0 || scenario.perception_cap(),
                  "spam: z = 0 without a perception cap has no finite optimum");
  std::int64_t ceiling = scenario.z() > 0
                             ? static_cast<std::int64_t>(std::ceil(10.0 / scenario.z()))
                             : *scenario.perception_cap();
  return std::max<std::int64_t>(1, scenario.perceived(ceiling));
}

std::int64_t spam_best_m(double q, const SpamScenario& scenario) {
  check_quality(q);
  const std::int64_t ceiling = spam_count_ceiling(scenario);
  const double margin = 1.0 - q;
  const double p = acceptance_prob(q, scenario.alpha());
  const double lr = log_reject(q, scenario.alpha());
  // Forward difference profit(m+1) - profit(m) = margin p (1-p)^m - z, decreasing in m.
  auto gain = [&](std::int64_t m) {
    return margin * p * std::exp(static_cast<double>(m) * lr) - scenario.z();
  };
  if (gain(1) <= 0.0) return 1;
  if (gain(ceiling) > 0.0) return ceiling;
  std::int64_t lo = 1;  // gain(lo) > 0
  std::int64_t hi = ceiling;  // gain(hi) <= 0
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (gain(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::optional<double> spam_quality_root(const SpamScenario& scenario) {
  const double a = scenario.alpha();
  const double b = scenario.z() * (1.0 + 1.0 / a);
  if (!(b > 0)) return std::nullopt;
  auto h = [&](double q) { return a * b * (a * std::log(q) - std::log(b)) - std::pow(q, a + 1.0); };
  // h rises to a single peak and then falls; the profit maximum is the
  // falling-edge root.
  double lo = std::pow(a * a * b / (a + 1.0), 1.0 / (a + 1.0));
  double hi = 1.0;
  if (!(lo < hi) || h(lo) <= 0.0 || h(hi) >= 0.0) return std::nullopt;
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SpamOptimum spam_optimal_quality(const SpamScenario& scenario) {
  detail::require(scenario.z() > 0, "spam_optimal_quality: z must be positive");
  auto profit_at = [&](double log_q) {
    const double q = std::pow(10.0, log_q);
    return spam_profit(q, spam_best_m(q, scenario), scenario);
  };
  const OptimizationResult r =
      maximize_1d(profit_at, -12.0, 0.0, {.grid_points = 2048, .tol = 1e-10});

  SpamOptimum out;
  out.q_star = std::pow(10.0, r.global_arg[0]);
  out.m_star = spam_best_m(out.q_star, scenario);
  out.x_star = spam_profit(out.q_star, out.m_star, scenario);
  if (!(out.x_star > 0.0)) {
    throw NoProfitableSpam("spam: no quality/count pair yields a positive profit");
  }
  out.m_star_real = spam_optimal_m(out.q_star, scenario);
  out.b = scenario.z() * (1.0 + 1.0 / scenario.alpha());
  out.q_root = spam_quality_root(scenario);
  return out;
}

}  // namespace qdiff
