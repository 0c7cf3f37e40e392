#include "qdiff/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdiff/closed_form.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/optimizer.hpp"
#include "qdiff/parallel.hpp"

namespace qdiff {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename T>
const T& need(const std::optional<T>& section, const char* name, const std::string& report) {
  if (!section) {
    throw ConfigError("report '" + report + "' needs a '" + name + "' section");
  }
  return *section;
}

CostModel cost_of(const ScenarioConfig& cfg) {
  return cfg.cost ? cfg.cost->build() : CostModel();
}

ProductSpec product_of(const ScenarioConfig& cfg) {
  return cfg.product ? *cfg.product : ProductSpec{};
}

int group_index(const std::string& variable, std::size_t prefix, const ScenarioConfig& cfg) {
  const std::string digits = variable.substr(prefix);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) return -1;
  const int k = std::stoi(digits);
  if (!cfg.population || k < 1 || k > static_cast<int>(cfg.population->groups.size())) {
    throw ConfigError("sweep axis '" + variable + "': no such buyer group");
  }
  return k - 1;
}

}  // namespace

const std::vector<std::string>& report_kinds() {
  static const std::vector<std::string> kinds = {"eval",     "single", "optimize", "phase",
                                                 "variants", "price",  "spam"};
  return kinds;
}

std::vector<std::string> report_columns(const std::string& report, const ScenarioConfig& cfg) {
  if (report == "eval") return {"x"};
  if (report == "single") return {"q_star", "x_star"};
  if (report == "optimize") {
    std::vector<std::string> cols = {"x_star", "distinct_qualities"};
    for (int k = 1; k <= product_of(cfg).variants; ++k) cols.push_back("q" + std::to_string(k));
    return cols;
  }
  if (report == "phase") return {"x1", "x2", "q_single", "q_low", "q_high", "phase"};
  if (report == "variants") return {"chosen_m", "x_star", "distinct_qualities", "q_min", "q_max"};
  if (report == "price") return {"q_star", "p_star", "x_star"};
  if (report == "spam") {
    return {"profitable", "q_star", "m_star", "m_star_real", "x_star", "q_root", "b"};
  }
  throw ConfigError("unknown report '" + report + "'");
}

std::vector<Cell> report_row(const std::string& report, const ScenarioConfig& cfg) {
  if (report == "spam") {
    const SpamScenario scenario = need(cfg.spam, "spam", report).build();
    try {
      const SpamOptimum o = spam_optimal_quality(scenario);
      return {std::int64_t{1}, o.q_star,  o.m_star,        o.m_star_real,
              o.x_star,        o.q_root.value_or(kNaN), o.b};
    } catch (const NoProfitableSpam&) {
      return {std::int64_t{0}, kNaN, std::int64_t{0}, kNaN, kNaN, kNaN,
              scenario.z() * (1.0 + 1.0 / scenario.alpha())};
    }
  }

  const Population pop = need(cfg.population, "population", report).build();
  const CostModel cost = cost_of(cfg);
  const ProductSpec product = product_of(cfg);

  if (report == "eval") {
    need(cfg.product, "product", report);
    return {expected_profit_multi(product.build_line(), pop, cost)};
  }
  if (report == "single") {
    const auto r = maximize_qualities(1, pop, cost, VectorXd(), product.shape());
    return {r.global_arg[0], r.global_value};
  }
  if (report == "optimize") {
    const auto r = maximize_qualities(product.variants, pop, cost, product.weight_vector(),
                                      product.shape());
    std::vector<Cell> row = {r.global_value, std::int64_t{r.distinct_qualities}};
    for (Index k = 0; k < r.global_arg.size(); ++k) row.emplace_back(r.global_arg[k]);
    return row;
  }
  if (report == "phase") {
    const auto d = differentiation_decision(pop, cost, product.variants == 2
                                                           ? product.weight_vector()
                                                           : VectorXd(),
                                            product.shape());
    return {d.single.global_value, d.pair.global_value, d.single.global_arg[0],
            d.pair.global_arg.minCoeff(), d.pair.global_arg.maxCoeff(), std::int64_t{d.label}};
  }
  if (report == "variants") {
    const auto t = best_variant_count(product.max_variants, pop, cost, product.shape());
    const auto& best = t.rows[t.chosen_m - 1];
    return {std::int64_t{t.chosen_m}, best.x_star, std::int64_t{best.distinct_qualities},
            best.qualities.minCoeff(), best.qualities.maxCoeff()};
  }
  if (report == "price") {
    const auto r = maximize_price_quality(pop, cost, product.gamma);
    return {r.global_arg[0], r.global_arg[1], r.global_value};
  }
  throw ConfigError("unknown report '" + report + "'");
}

void apply_axis(ScenarioConfig& cfg, const std::string& variable, double value,
                const std::string& report) {
  const bool spam = report == "spam";
  if (spam && (variable == "alpha" || variable == "z")) {
    if (!cfg.spam) throw ConfigError("sweep axis '" + variable + "': no spam section");
    (variable == "alpha" ? cfg.spam->alpha : cfg.spam->z) = value;
    return;
  }
  if (variable == "z") {
    if (!cfg.cost) cfg.cost = CostSpec{};
    cfg.cost->z = value;
    return;
  }
  if (variable == "c2") {
    if (!cfg.population || cfg.population->groups.size() != 2) {
      throw ConfigError("sweep axis 'c2' needs exactly two buyer groups");
    }
    cfg.population->groups[0].proportion = 1.0 - value;
    cfg.population->groups[1].proportion = value;
    return;
  }
  if (variable == "r2") {
    if (!cfg.product) cfg.product = ProductSpec{};
    if (cfg.product->variants != 2) throw ConfigError("sweep axis 'r2' needs two variants");
    cfg.product->weights = {1.0 - value, value};
    return;
  }
  if (variable == "price") {
    if (!cfg.product) cfg.product = ProductSpec{};
    cfg.product->price = value;
    return;
  }
  if (variable.rfind("alpha", 0) == 0) {
    const int g = group_index(variable, 5, cfg);
    if (g >= 0) {
      cfg.population->groups[g].alpha = value;
      return;
    }
  }
  if (variable.rfind("sigma", 0) == 0) {
    const int g = group_index(variable, 5, cfg);
    if (g >= 0) {
      cfg.population->groups[g].sigma = value;
      return;
    }
  }
  throw ConfigError("invalid sweep axis '" + variable + "'");
}

Table run_report(const std::string& report, const ScenarioConfig& cfg) {
  Table t;
  t.columns = report_columns(report, cfg);
  t.add_row(report_row(report, cfg));
  t.meta["report"] = report;
  t.meta["parameters"] = cfg.source;
  return t;
}

Table run_variant_table(const ScenarioConfig& cfg) {
  const Population pop = need(cfg.population, "population", "variants").build();
  const ProductSpec product = product_of(cfg);
  const auto table = best_variant_count(product.max_variants, pop, cost_of(cfg), product.shape());
  Table t;
  t.columns = {"m", "x_star", "distinct_qualities", "q_min", "q_max", "chosen"};
  for (const auto& row : table.rows) {
    t.add_row({std::int64_t{row.m}, row.x_star, std::int64_t{row.distinct_qualities},
               row.qualities.minCoeff(), row.qualities.maxCoeff(),
               std::int64_t{row.m == table.chosen_m}});
  }
  t.meta["report"] = "variants";
  t.meta["chosen_m"] = table.chosen_m;
  t.meta["parameters"] = cfg.source;
  return t;
}

Table run_sweep(const ScenarioConfig& cfg, int threads) {
  const SweepSpec& sweep = need(cfg.sweep, "sweep", "sweep");
  std::vector<std::vector<double>> axes;
  for (const auto& a : sweep.axes) axes.push_back(a.points());

  std::vector<std::vector<double>> coords;
  if (axes.size() == 1) {
    for (double x : axes[0]) coords.push_back({x});
  } else {
    for (double x : axes[0]) {
      for (double y : axes[1]) coords.push_back({x, y});
    }
  }

  // Fail on bad axis names or reports before spending time on the grid.
  {
    ScenarioConfig probe = cfg;
    for (std::size_t k = 0; k < sweep.axes.size(); ++k) {
      apply_axis(probe, sweep.axes[k].variable, coords.front()[k], sweep.report);
    }
    (void)report_columns(sweep.report, probe);
  }

  std::vector<std::vector<Cell>> rows(coords.size());
  parallel_for(coords.size(), threads, [&](std::size_t i) {
    ScenarioConfig point = cfg;
    std::vector<Cell> row;
    for (std::size_t k = 0; k < sweep.axes.size(); ++k) {
      apply_axis(point, sweep.axes[k].variable, coords[i][k], sweep.report);
      row.emplace_back(coords[i][k]);
    }
    for (auto& c : report_row(sweep.report, point)) row.push_back(std::move(c));
    rows[i] = std::move(row);
  });

  Table t;
  for (const auto& a : sweep.axes) t.columns.push_back(a.variable);
  for (auto& c : report_columns(sweep.report, cfg)) t.columns.push_back(std::move(c));
  for (auto& r : rows) t.add_row(std::move(r));
  t.meta["report"] = sweep.report;
  t.meta["parameters"] = cfg.source;
  return t;
}

}  // namespace qdiff
