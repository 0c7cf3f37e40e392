#include <cmath>
#include <string>
#include <utility>

#include "qdiff/errors.hpp"
#include "qdiff/experiments.hpp"
#include "qdiff/montecarlo.hpp"
#include "qdiff/spam.hpp"

namespace qdiff {
namespace {

constexpr double kPassSigmas = 4.0;

class Report {
 public:
  explicit Report(const SimulationReport& sim) : sim_(sim) {
    out_.table.columns = {"quantity",       "analytic",     "sampled",
                          "standard_error", "deviation_se", "pass"};
    out_.table.meta["seed"] = sim.seed;
    out_.table.meta["n_buyers"] = sim.n_buyers;
    out_.table.meta["sales"] = sim.sales;
    out_.table.meta["pass_threshold_se"] = kPassSigmas;
  }

  void add(const std::string& quantity, double analytic, double sampled, double se) {
    const double diff = sampled - analytic;
    // A zero standard error only happens for degenerate markets; then the
    // sample must match exactly.
    const double dev = se > 0 ? diff / se : (diff == 0 ? 0.0 : INFINITY);
    const bool pass = std::abs(dev) < kPassSigmas;
    out_.table.add_row({quantity, analytic, sampled, se, dev, std::int64_t{pass}});
    out_.passed = out_.passed && pass;
  }

  void profit(const std::string& quantity, double analytic) {
    add(quantity, analytic, sim_.sampled_profit_per_buyer, sim_.standard_error);
  }

  /// Fraction of buyers with a given outcome; binomial standard error at the
  /// analytic rate.
  void rate(const std::string& quantity, double analytic, std::int64_t count) {
    const double n = static_cast<double>(sim_.n_buyers);
    add(quantity, analytic, static_cast<double>(count) / n,
        std::sqrt(analytic * (1.0 - analytic) / n));
  }

  ValidationOutcome take() { return std::move(out_); }

 private:
  const SimulationReport& sim_;
  ValidationOutcome out_{.table = {}, .passed = true};
};

}  // namespace

ValidationOutcome run_validate(const ScenarioConfig& cfg, std::int64_t n_buyers,
                               std::uint64_t seed, int threads) {
  if (n_buyers < 2) throw ConfigError("validate: need at least 2 buyers");
  if (cfg.spam) {
    const auto scenario = cfg.spam->build();
    double q = 0.0;
    std::int64_t m = 0;
    if (cfg.spam->quality) {
      q = *cfg.spam->quality;
      m = cfg.spam->count ? *cfg.spam->count : spam_best_m(q, scenario);
    } else {
      const auto opt = spam_optimal_quality(scenario);
      q = opt.q_star;
      m = cfg.spam->count ? *cfg.spam->count : opt.m_star;
    }
    const auto sim = simulate_spam(scenario, q, m, n_buyers, seed, threads);
    Report report(sim);
    report.profit("spam_profit", spam_profit(q, m, scenario));
    std::int64_t bought = 0;
    for (auto s : sim.sales) bought += s;
    report.rate("purchase_rate", spam_accept_prob(q, scenario.alpha(), scenario.perceived(m)),
                bought);
    return report.take();
  }
  if (!cfg.population || !cfg.product) {
    throw ConfigError("validate: needs either a spam section or population and product");
  }
  if (cfg.product->qualities.empty()) {
    throw ConfigError("validate: product.qualities must be given");
  }
  const auto pop = cfg.population->build();
  const auto line = cfg.product->build_line();
  const auto cost = cfg.cost ? cfg.cost->build() : CostModel(0.0);
  const auto sim = simulate_market(line, pop, cost, n_buyers, seed, threads);
  Report report(sim);
  report.profit("expected_profit", expected_profit_multi(line, pop, cost));
  const VectorXd sold = expected_sales(line, pop);
  for (Index k = 0; k < sold.size(); ++k) {
    report.rate("sales_rate_" + std::to_string(k + 1), sold[k], sim.sales[k]);
  }
  return report.take();
}

}  // namespace qdiff
