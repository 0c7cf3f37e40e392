#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "qdiff/closed_form.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/experiments.hpp"
#include "qdiff/optimizer.hpp"
#include "qdiff/parallel.hpp"
#include "qdiff/spam.hpp"

namespace qdiff {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> range(double from, double to, double step) {
  return SweepAxis{"", from, to, step}.points();
}

/// Rows computed in parallel, appended in index order.
Table tabulate(std::vector<std::string> columns, std::size_t n, int threads,
               const std::function<std::vector<Cell>(std::size_t)>& row) {
  std::vector<std::vector<Cell>> rows(n);
  parallel_for(n, threads, [&](std::size_t i) { rows[i] = row(i); });
  Table t;
  t.columns = std::move(columns);
  for (auto& r : rows) t.add_row(std::move(r));
  return t;
}

// Two groups with acceptance only (selection is irrelevant for one product).
Population acceptance_pair(double alpha1, double alpha2, double c2) {
  return Population::two_groups(alpha1, 0.0, alpha2, 0.0, c2);
}

// Ignorant/informed groups used for the differentiation figures.
Population differentiation_pair(double c2) {
  return Population::two_groups(0.2, 0.5, 3.0, 3.0, c2);
}

Population biased_selection_pair() {
  return Population::two_groups(0.2, 0.2, 3.0, 2.0, 0.5);
}

int high_count(const VectorXd& q) {
  int n = 0;
  for (Index k = 0; k < q.size(); ++k) n += q[k] > q.minCoeff() + kDistinctQualityTolerance;
  return n;
}

Table fig_homogeneous_profit(int threads) {
  const auto alphas = range(0.005, 5.0, 0.005);
  const CostModel cost(0.05);
  Table t = tabulate({"alpha", "x_star"}, alphas.size(), threads, [&](std::size_t i) {
    const auto pop = Population::homogeneous(alphas[i]);
    const auto r = maximize_1d([&](double q) { return expected_profit_single(q, pop, cost); },
                               0.0, 1.0);
    return std::vector<Cell>{alphas[i], r.global_value};
  });
  t.meta["parameters"] = {{"z", 0.05}};
  return t;
}

Table fig_heterogeneous_single(int threads) {
  const std::vector<double> alpha2s = {0.5, 1.0, 3.0};
  const auto c2s = range(0.0, 1.0, 0.01);
  const CostModel cost(0.01);
  Table t = tabulate({"alpha2", "c2", "q_star", "x_star"}, alpha2s.size() * c2s.size(), threads,
                     [&](std::size_t i) {
                       const double a2 = alpha2s[i / c2s.size()];
                       const double c2 = c2s[i % c2s.size()];
                       const auto pop = acceptance_pair(0.1, a2, c2);
                       const auto r = maximize_1d(
                           [&](double q) { return expected_profit_single(q, pop, cost); }, 0.0,
                           1.0);
                       return std::vector<Cell>{a2, c2, r.global_arg[0], r.global_value};
                     });
  t.meta["parameters"] = {{"alpha1", 0.1}, {"alpha2", alpha2s}, {"z", 0.01}};
  return t;
}

Table fig_two_peaks(int threads) {
  const auto c2s = range(0.0, 1.0, 0.01);
  const CostModel cost(0.01);
  // Peaks left of the midpoint between the two homogeneous optima belong to
  // the ignorant group, the others to the informed group.
  const double split =
      0.5 * (optimal_quality_homogeneous(0.1) + optimal_quality_homogeneous(3.0));
  Table t = tabulate({"c2", "Q_low_peak", "Q_high_peak", "x_low", "x_high"}, c2s.size(), threads,
                     [&](std::size_t i) {
                       const auto pop = acceptance_pair(0.1, 3.0, c2s[i]);
                       const auto r = maximize_1d(
                           [&](double q) { return expected_profit_single(q, pop, cost); }, 0.0,
                           1.0);
                       double ql = kNaN, qh = kNaN, xl = kNaN, xh = kNaN;
                       for (const auto& m : r.local_maxima) {  // best first
                         const double q = m.argument[0];
                         if (q < split && std::isnan(ql)) {
                           ql = q;
                           xl = m.value;
                         } else if (q >= split && std::isnan(qh)) {
                           qh = q;
                           xh = m.value;
                         }
                       }
                       return std::vector<Cell>{c2s[i], ql, qh, xl, xh};
                     });
  t.meta["parameters"] = {{"alpha1", 0.1}, {"alpha2", 3.0}, {"z", 0.01}, {"split", split}};
  return t;
}

std::vector<Cell> phase_cells(const PhaseDecision& d) {
  return {d.single.global_value, d.pair.global_value, d.single.global_arg[0],
          d.pair.global_arg.minCoeff(), d.pair.global_arg.maxCoeff(), std::int64_t{d.label}};
}

Table fig_differentiation(int threads) {
  const std::vector<double> zs = {0.002, 0.005};
  const auto c2s = range(0.0, 1.0, 0.01);
  Table t = tabulate({"z", "c2", "x1", "x2", "q_single", "q_low", "q_high", "phase"},
                     zs.size() * c2s.size(), threads, [&](std::size_t i) {
                       const double z = zs[i / c2s.size()];
                       const double c2 = c2s[i % c2s.size()];
                       std::vector<Cell> row = {z, c2};
                       for (auto& c : phase_cells(differentiation_decision(
                                differentiation_pair(c2), CostModel(z))))
                         row.push_back(std::move(c));
                       return row;
                     });
  t.meta["parameters"] = {{"alpha1", 0.2}, {"sigma1", 0.5}, {"alpha2", 3.0},
                          {"sigma2", 3.0}, {"z", zs}};
  return t;
}

Table fig_phase_two(int threads) {
  const auto c2s = range(0.0, 1.0, 0.02);
  const auto zs = range(0.0, 0.02, 0.001);
  Table t = tabulate({"c2", "z", "x1", "x2", "phase"}, c2s.size() * zs.size(), threads,
                     [&](std::size_t i) {
                       const double c2 = c2s[i / zs.size()];
                       const double z = zs[i % zs.size()];
                       const auto d = differentiation_decision(differentiation_pair(c2),
                                                               CostModel(z));
                       return std::vector<Cell>{c2, z, d.single.global_value,
                                                d.pair.global_value, std::int64_t{d.label}};
                     });
  t.meta["parameters"] = {{"alpha1", 0.2}, {"sigma1", 0.5}, {"alpha2", 3.0}, {"sigma2", 3.0}};
  return t;
}

Table fig_phase_free(int threads) {
  const auto c2s = range(0.0, 1.0, 0.05);
  const auto zs = range(0.001, 0.02, 0.001);
  constexpr int kMaxVariants = 8;
  Table t = tabulate({"c2", "z", "chosen_m", "distinct_qualities", "x_star", "label"},
                     c2s.size() * zs.size(), threads, [&](std::size_t i) {
                       const double c2 = c2s[i / zs.size()];
                       const double z = zs[i % zs.size()];
                       const auto table = best_variant_count(
                           kMaxVariants, differentiation_pair(c2), CostModel(z));
                       const auto& best = table.rows[table.chosen_m - 1];
                       const std::int64_t label = best.x_star > 0 ? table.chosen_m : 0;
                       return std::vector<Cell>{c2, z, std::int64_t{table.chosen_m},
                                                std::int64_t{best.distinct_qualities},
                                                best.x_star, label};
                     });
  t.meta["parameters"] = {{"alpha1", 0.2}, {"sigma1", 0.5},          {"alpha2", 3.0},
                          {"sigma2", 3.0}, {"max_variants", kMaxVariants}};
  return t;
}

Table fig_variant_count(double z, int m_max) {
  const auto table = best_variant_count(m_max, differentiation_pair(0.5), CostModel(z));
  Table t;
  t.columns = {"m", "x_star", "distinct_qualities", "q_min", "q_max", "n_high"};
  for (const auto& row : table.rows) {
    t.add_row({std::int64_t{row.m}, row.x_star, std::int64_t{row.distinct_qualities},
               row.qualities.minCoeff(), row.qualities.maxCoeff(),
               std::int64_t{high_count(row.qualities)}});
  }
  t.meta["parameters"] = {{"alpha1", 0.2}, {"sigma1", 0.5}, {"alpha2", 3.0}, {"sigma2", 3.0},
                          {"c2", 0.5},     {"z", z},        {"max_variants", m_max}};
  t.meta["chosen_m"] = table.chosen_m;
  return t;
}

Table fig_biased_selection(int threads) {
  const auto r2s = range(0.005, 0.995, 0.005);
  const auto pop = biased_selection_pair();
  const CostModel cost(0.01);
  Table t = tabulate({"r2", "Q1", "Q2", "x_star", "x1", "x2", "phase"}, r2s.size(), threads,
                     [&](std::size_t i) {
                       const VectorXd w{{1.0 - r2s[i], r2s[i]}};
                       const auto d = differentiation_decision(pop, cost, w);
                       const double x1 = d.single.global_value;
                       const double x2 = d.pair.global_value;
                       return std::vector<Cell>{r2s[i],         d.pair.global_arg[0],
                                                d.pair.global_arg[1], std::max(x1, x2),
                                                x1,             x2,
                                                std::int64_t{d.label}};
                     });
  t.meta["parameters"] = {{"alpha1", 0.2}, {"sigma1", 0.2}, {"alpha2", 3.0}, {"sigma2", 2.0},
                          {"c2", 0.5},     {"z", 0.01},     {"m", 2}};
  return t;
}

Table fig_price(int threads) {
  const auto alphas = range(0.01, 5.0, 0.01);
  const CostModel cost(0.0);
  Table t = tabulate({"alpha", "q_fixed", "x_fixed", "q_star", "p_star", "x_variable"},
                     alphas.size(), threads, [&](std::size_t i) {
                       const auto pop = Population::homogeneous(alphas[i]);
                       const auto fixed = maximize_1d(
                           [&](double q) { return expected_profit_single(q, pop, cost); }, 0.0,
                           1.0);
                       const auto var =
                           maximize_price_quality(pop, cost, 1.0, {.grid_points = 128, .tol = 1e-10});
                       return std::vector<Cell>{alphas[i], fixed.global_arg[0],
                                                fixed.global_value, var.global_arg[0],
                                                var.global_arg[1], var.global_value};
                     });
  t.meta["parameters"] = {{"z", 0.0}};
  return t;
}

Table fig_spam(int threads) {
  const std::vector<double> zs = {1e-4, 1e-3, 1e-2};
  constexpr int kAlphas = 41;
  Table t = tabulate({"z", "alpha", "profitable", "q_star", "m_star", "x_star", "q_root"},
                     zs.size() * kAlphas, threads, [&](std::size_t i) {
                       const double z = zs[i / kAlphas];
                       const double alpha = std::pow(10.0, -3.0 + 4.0 * (i % kAlphas) / (kAlphas - 1));
                       const SpamScenario s(alpha, z);
                       try {
                         const auto o = spam_optimal_quality(s);
                         return std::vector<Cell>{z,        alpha,  std::int64_t{1},
                                                  o.q_star, o.m_star, o.x_star,
                                                  o.q_root.value_or(kNaN)};
                       } catch (const NoProfitableSpam&) {
                         return std::vector<Cell>{z,    alpha, std::int64_t{0}, kNaN,
                                                  std::int64_t{0}, kNaN, kNaN};
                       }
                     });
  t.meta["parameters"] = {{"z", zs}, {"alpha", "10^[-3, 1], 41 log-spaced points"}};
  return t;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"f2",  "f3",  "f4",  "f6",  "f7a", "f7b",
                                               "f8a", "f8b", "f10", "f11", "f13"};
  return ids;
}

Table run_figure(const std::string& id, int threads) {
  static const std::map<std::string, std::function<Table(int)>> figures = {
      {"f2", fig_homogeneous_profit},
      {"f3", fig_heterogeneous_single},
      {"f4", fig_two_peaks},
      {"f6", fig_differentiation},
      {"f7a", fig_phase_two},
      {"f7b", fig_phase_free},
      {"f8a", [](int) { return fig_variant_count(0.002, 10); }},
      {"f8b", [](int) { return fig_variant_count(0.0, 60); }},
      {"f10", fig_biased_selection},
      {"f11", fig_price},
      {"f13", fig_spam},
  };
  const auto it = figures.find(id);
  if (it == figures.end()) throw ConfigError("unknown figure id '" + id + "'");
  Table t = it->second(threads);
  t.meta["figure"] = id;
  return t;
}

}  // namespace qdiff
