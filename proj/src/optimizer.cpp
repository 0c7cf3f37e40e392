#include "qdiff/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace qdiff {
namespace {

constexpr double kInvPhi = 0.6180339887498948482;

// a is preferred over b: higher value, or an equal value at a smaller argument.
bool better(double va, const VectorXd& a, double vb, const VectorXd& b, double tie) {
  if (va > vb + tie) return true;
  if (vb > va + tie) return false;
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

void sort_maxima(std::vector<LocalMaximum>& maxima) {
  std::stable_sort(maxima.begin(), maxima.end(), [](const LocalMaximum& a, const LocalMaximum& b) {
    return better(a.value, a.argument, b.value, b.argument, kValueTieTolerance);
  });
}

OptimizationResult finish(std::vector<LocalMaximum> maxima) {
  sort_maxima(maxima);
  OptimizationResult out;
  out.global_arg = maxima.front().argument;
  out.global_value = maxima.front().value;
  out.distinct_qualities = count_distinct_qualities(out.global_arg);
  out.local_maxima = std::move(maxima);
  return out;
}

bool uniform(const VectorXd& w) {
  return w.size() == 0 || (w.array() == w[0]).all();
}

/// Feasible region for a quality vector, written as linear constraints
/// a . x + b >= 0.
struct Constraint {
  VectorXd a;
  double b;
};

std::vector<Constraint> quality_constraints(int m, double price, QualityOrder order) {
  std::vector<Constraint> out;
  auto unit = [m](int i) {
    VectorXd e = VectorXd::Zero(m);
    e[i] = 1.0;
    return e;
  };
  if (order == QualityOrder::ascending) {
    out.push_back({unit(0), 0.0});
    out.push_back({-unit(m - 1), price});
    for (int i = 0; i + 1 < m; ++i) out.push_back({unit(i + 1) - unit(i), 0.0});
  } else {
    for (int i = 0; i < m; ++i) {
      out.push_back({unit(i), 0.0});
      out.push_back({-unit(i), price});
    }
  }
  return out;
}

std::vector<VectorXd> search_directions(int m) {
  std::vector<VectorXd> dirs;
  for (int i = 0; i < m; ++i) dirs.push_back(VectorXd::Unit(m, i));
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      dirs.push_back(VectorXd::Unit(m, i) + VectorXd::Unit(m, j));
      dirs.push_back(VectorXd::Unit(m, i) - VectorXd::Unit(m, j));
    }
  }
  return dirs;
}

using VectorObjective = std::function<double(const VectorXd&)>;

/// Global line search along d inside the constraint set: scan, then golden
/// refinement around the best scan point. Moves x only on strict improvement.
double line_search(const VectorObjective& f, VectorXd& x, double& fx, const VectorXd& d,
                   const std::vector<Constraint>& cons, double price, int grid, double tol) {
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  for (const auto& c : cons) {
    const double value = std::max(0.0, c.a.dot(x) + c.b);
    const double slope = c.a.dot(d);
    if (slope > 0) tmin = std::max(tmin, -value / slope);
    if (slope < 0) tmax = std::min(tmax, -value / slope);
  }
  if (!(tmax - tmin > 1e-14)) return 0.0;

  auto at = [&](double t) {
    return VectorXd((x + t * d).cwiseMax(0.0).cwiseMin(price));
  };
  auto ft = [&](double t) { return f(at(t)); };

  const double step = (tmax - tmin) / (grid - 1);
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid; ++j) {
    const double v = ft(tmin + j * step);
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  const double lo = tmin + std::max(best - 1, 0) * step;
  const double hi = best + 1 < grid ? tmin + (best + 1) * step : tmax;
  LocalMaximum refined = golden_section_max(ft, lo, hi, tol);
  double t = refined.argument[0];
  double v = refined.value;
  if (best_value > v) {
    t = tmin + best * step;
    v = best_value;
  }
  if (v <= fx) return 0.0;
  const double gain = v - fx;
  x = at(t);
  fx = v;
  return gain;
}

LocalMaximum ascend(const VectorObjective& f, VectorXd x, const std::vector<Constraint>& cons,
                    const std::vector<VectorXd>& dirs, double price,
                    const QualitySearchOptions& opt) {
  double fx = f(x);
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    double gain = 0.0;
    for (const auto& d : dirs) {
      gain += line_search(f, x, fx, d, cons, price, opt.line_grid, opt.line_tol);
    }
    if (gain < opt.sweep_tol) break;
  }
  return {x, fx};
}

void add_unique(std::vector<LocalMaximum>& found, LocalMaximum candidate) {
  for (auto& f : found) {
    if ((f.argument - candidate.argument).cwiseAbs().maxCoeff() < kDistinctQualityTolerance) {
      if (better(candidate.value, candidate.argument, f.value, f.argument, 0.0)) {
        f = std::move(candidate);
      }
      return;
    }
  }
  found.push_back(std::move(candidate));
}

void lattice_starts(int m, int per_axis, double price, bool ascending, int pos, VectorXd& cur,
                    int min_index, std::vector<VectorXd>& out) {
  if (pos == m) {
    out.push_back(cur);
    return;
  }
  for (int k = ascending ? min_index : 0; k < per_axis; ++k) {
    cur[pos] = price * k / (per_axis - 1);
    lattice_starts(m, per_axis, price, ascending, pos + 1, cur, k, out);
  }
}

}  // namespace

int count_distinct_qualities(const VectorXd& qualities) {
  if (qualities.size() == 0) return 0;
  std::vector<double> q(qualities.data(), qualities.data() + qualities.size());
  std::sort(q.begin(), q.end());
  int levels = 1;
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] - q[i - 1] > kDistinctQualityTolerance) ++levels;
  }
  return levels;
}

LocalMaximum golden_section_max(const std::function<double(double)>& objective, double lo,
                                double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int iter = 0; iter < 300 && b - a > tol; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const std::pair<double, double> candidates[] = {
      {lo, objective(lo)}, {c, fc}, {mid, objective(mid)}, {d, fd}, {hi, objective(hi)}};
  std::pair<double, double> best = candidates[0];
  for (const auto& cand : candidates) {
    if (cand.second > best.second || (cand.second == best.second && cand.first < best.first)) {
      best = cand;
    }
  }
  return {VectorXd::Constant(1, best.first), best.second};
}

OptimizationResult maximize_1d(const std::function<double(double)>& objective, double lo,
                               double hi, const ScanOptions& options) {
  detail::require(lo < hi, "maximize_1d: empty interval");
  detail::require(options.grid_points >= 64, "maximize_1d: at least 64 grid points required");
  detail::require(options.tol > 0, "maximize_1d: tolerance must be positive");

  const int n = options.grid_points;
  const double h = (hi - lo) / (n - 1);
  std::vector<double> xs(n), fs(n);
  for (int j = 0; j < n; ++j) {
    xs[j] = j == n - 1 ? hi : lo + j * h;
    fs[j] = objective(xs[j]);
  }

  std::vector<LocalMaximum> found;
  for (int a = 0; a < n;) {
    // Plateaus of equal grid values count as a single candidate.
    int b = a;
    while (b + 1 < n && fs[b + 1] == fs[a]) ++b;
    const bool left_ok = a == 0 || fs[a - 1] < fs[a];
    const bool right_ok = b == n - 1 || fs[b + 1] < fs[a];
    if (left_ok && right_ok) {
      const double blo = xs[std::max(a - 1, 0)];
      const double bhi = xs[std::min(b + 1, n - 1)];
      LocalMaximum m = golden_section_max(objective, blo, bhi, options.tol);
      if (fs[a] > m.value || (fs[a] == m.value && xs[a] < m.argument[0])) {
        m = {VectorXd::Constant(1, xs[a]), fs[a]};
      }
      found.push_back(std::move(m));
    }
    a = b + 1;
  }

  std::sort(found.begin(), found.end(), [](const LocalMaximum& x, const LocalMaximum& y) {
    return x.argument[0] < y.argument[0];
  });
  std::vector<LocalMaximum> merged;
  for (auto& m : found) {
    if (!merged.empty() &&
        std::abs(m.argument[0] - merged.back().argument[0]) < 10.0 * options.tol) {
      if (m.value > merged.back().value) merged.back() = std::move(m);
      continue;
    }
    merged.push_back(std::move(m));
  }
  return finish(std::move(merged));
}

OptimizationResult maximize_qualities_full(int m, const Population& pop, const CostModel& cost,
                                           const VectorXd& weights, const LineShape& shape,
                                           const QualitySearchOptions& options) {
  detail::require(m >= 1, "maximize_qualities: at least one variant required");
  detail::require(weights.size() == 0 || weights.size() == m,
                  "maximize_qualities: weights do not match the variant count");
  detail::require(options.lattice_per_axis >= 2, "maximize_qualities: lattice too coarse");
  detail::require(options.line_grid >= 3, "maximize_qualities: line grid too coarse");

  const VectorXd w = weights.size() == 0 ? VectorXd::Constant(m, 1.0 / m) : weights;
  const double price = shape.price;
  VectorObjective f = [&](const VectorXd& q) {
    return expected_profit_multi(ProductLine(q, w, shape), pop, cost);
  };
  if (m == 1) {
    return maximize_1d([&](double q) { return f(VectorXd::Constant(1, q)); }, 0.0, price);
  }

  const bool ascending = options.order == QualityOrder::ascending;
  std::vector<VectorXd> starts;
  VectorXd cur(m);
  if (options.lattice) {
    lattice_starts(m, options.lattice_per_axis, price, ascending, 0, cur, 0, starts);
  }
  for (const auto& s : options.extra_starts) {
    detail::require(s.size() == m, "maximize_qualities: start point has the wrong dimension");
    VectorXd x = s.cwiseMax(0.0).cwiseMin(price);
    if (ascending) std::sort(x.data(), x.data() + m);
    starts.push_back(x);
  }
  detail::require(!starts.empty(), "maximize_qualities: no starting points");

  const auto cons = quality_constraints(m, price, options.order);
  const auto dirs = search_directions(m);
  std::vector<LocalMaximum> found;
  for (const auto& s : starts) add_unique(found, ascend(f, s, cons, dirs, price, options));
  return finish(std::move(found));
}

double two_level_profit(double q_low, double q_high, int n_low, int n_high,
                        const Population& pop, const CostModel& cost, const LineShape& shape) {
  detail::require(n_low >= 0 && n_high >= 0 && n_low + n_high >= 1,
                  "two_level_profit: invalid multiplicities");
  detail::require(q_low >= 0 && q_low <= shape.price && q_high >= 0 && q_high <= shape.price,
                  "two_level_profit: qualities must lie in [0, price]");
  const int m = n_low + n_high;
  const bool damaged = cost.mode() == ProductionMode::damaged_goods;
  detail::require(!damaged || m >= 2, "profit: damaged-goods mode needs at least two variants");
  if (shape.price != 1.0) detail::check_price_bound(shape.price, pop);

  double margin_low = shape.price - std::pow(q_low, shape.gamma);
  double margin_high = shape.price - std::pow(q_high, shape.gamma);
  if (damaged) {
    const double top = n_low == 0 ? q_high : n_high == 0 ? q_low : std::max(q_low, q_high);
    margin_low = margin_high = shape.price - std::pow(top, shape.gamma);
  }

  double gross = 0.0;
  for (const auto& g : pop.groups()) {
    const double wl = std::pow(q_low, g.sigma());
    const double wh = std::pow(q_high, g.sigma());
    const double total = n_low * wl + n_high * wh;
    const double pl = total == 0.0 ? 1.0 / m : wl / total;
    const double ph = total == 0.0 ? 1.0 / m : wh / total;
    double sold = 0.0;
    if (n_low > 0) sold += n_low * pl * margin_low * detail::line_acceptance(q_low, g.alpha(), shape);
    if (n_high > 0) {
      sold += n_high * ph * margin_high * detail::line_acceptance(q_high, g.alpha(), shape);
    }
    gross += g.proportion() * sold;
  }
  return gross - (damaged ? cost.z() : m * cost.z());
}

OptimizationResult maximize_qualities_two_level(int m, const Population& pop,
                                                const CostModel& cost, const LineShape& shape,
                                                const QualitySearchOptions& options) {
  detail::require(m >= 1, "maximize_qualities: at least one variant required");
  const double price = shape.price;
  const auto cons = quality_constraints(2, price, QualityOrder::ascending);
  const auto dirs = search_directions(2);
  constexpr int kCoarse = 33;

  std::vector<LocalMaximum> best_per_split;
  for (int n_high = 1; n_high <= m; ++n_high) {
    const int n_low = m - n_high;
    VectorObjective f = [&](const VectorXd& q) {
      return two_level_profit(q[0], q[1], n_low, n_high, pop, cost, shape);
    };

    // Coarse scan of the sorted triangle; its grid-local maxima seed the ascent.
    Eigen::MatrixXd grid = Eigen::MatrixXd::Constant(
        kCoarse, kCoarse, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < kCoarse; ++i) {
      for (int j = i; j < kCoarse; ++j) {
        grid(i, j) = f(VectorXd{{price * i / (kCoarse - 1), price * j / (kCoarse - 1)}});
      }
    }
    std::vector<LocalMaximum> seeds;
    for (int i = 0; i < kCoarse; ++i) {
      for (int j = i; j < kCoarse; ++j) {
        bool peak = true;
        for (int di = -1; di <= 1 && peak; ++di) {
          for (int dj = -1; dj <= 1; ++dj) {
            const int a = i + di, b = j + dj;
            if ((di || dj) && a >= 0 && b >= 0 && a < kCoarse && b < kCoarse &&
                grid(a, b) > grid(i, j)) {
              peak = false;
              break;
            }
          }
        }
        if (peak) {
          seeds.push_back(
              {VectorXd{{price * i / (kCoarse - 1), price * j / (kCoarse - 1)}}, grid(i, j)});
        }
      }
    }
    sort_maxima(seeds);
    if (seeds.size() > 3) seeds.resize(3);

    std::vector<LocalMaximum> found;
    for (const auto& s : seeds) add_unique(found, ascend(f, s.argument, cons, dirs, price, options));
    sort_maxima(found);

    const LocalMaximum& top = found.front();
    VectorXd full(m);
    full.head(n_low).setConstant(top.argument[0]);
    full.tail(n_high).setConstant(top.argument[1]);
    best_per_split.push_back({full, top.value});
  }
  OptimizationResult out = finish(best_per_split);
  out.local_maxima.resize(1);
  return out;
}

OptimizationResult maximize_qualities(int m, const Population& pop, const CostModel& cost,
                                      const VectorXd& weights, const LineShape& shape,
                                      const QualitySearchOptions& options) {
  detail::require(m >= 1, "maximize_qualities: at least one variant required");
  detail::require(weights.size() == 0 || weights.size() == m,
                  "maximize_qualities: weights do not match the variant count");
  if (m <= options.full_search_max_m) {
    return maximize_qualities_full(m, pop, cost, weights, shape, options);
  }
  if (!uniform(weights)) {
    throw UnsupportedConfiguration(
        "maximize_qualities: more than " + std::to_string(options.full_search_max_m) +
        " variants are only supported with uniform weights");
  }
  return maximize_qualities_two_level(m, pop, cost, shape, options);
}

OptimizationResult maximize_price_quality(const Population& pop, const CostModel& cost,
                                          double gamma, const ScanOptions& options) {
  if (pop.size() != 1) {
    throw UnsupportedConfiguration(
        "maximize_price_quality: joint price optimization needs a homogeneous population");
  }
  const double p_max = pop.groups().front().alpha() + 1.0;
  const double p_min = 1e-9 * p_max;

  auto best_quality = [&](double p) {
    return maximize_1d(
        [&](double q) { return expected_profit_priced(q, p, pop, cost, gamma); }, 0.0, p,
        options);
  };
  const OptimizationResult outer =
      maximize_1d([&](double p) { return best_quality(p).global_value; }, p_min, p_max, options);

  const double p_star = outer.global_arg[0];
  const OptimizationResult inner = best_quality(p_star);
  OptimizationResult out;
  out.global_arg = VectorXd{{inner.global_arg[0], p_star}};
  out.global_value = inner.global_value;
  out.local_maxima.push_back({out.global_arg, out.global_value});
  out.distinct_qualities = 1;
  return out;
}

CostModel single_variant_cost(const CostModel& cost) {
  return CostModel(cost.z(), ProductionMode::independent);
}

VariantCountTable best_variant_count(int m_max, const Population& pop, const CostModel& cost,
                                     const LineShape& shape,
                                     const QualitySearchOptions& options) {
  detail::require(m_max >= 1, "best_variant_count: m_max must be >= 1");
  VariantCountTable table;
  for (int m = 1; m <= m_max; ++m) {
    const OptimizationResult r = maximize_qualities(
        m, pop, m == 1 ? single_variant_cost(cost) : cost, VectorXd(), shape, options);
    table.rows.push_back({m, r.global_value, r.global_arg, r.distinct_qualities});
  }
  table.chosen_m = 1;
  double best = table.rows.front().x_star;
  for (const auto& row : table.rows) {
    if (row.x_star > best + kValueTieTolerance) {
      best = row.x_star;
      table.chosen_m = row.m;
    }
  }
  return table;
}

PhaseDecision differentiation_decision(const Population& pop, const CostModel& cost,
                                       const VectorXd& weights, const LineShape& shape,
                                       const QualitySearchOptions& options) {
  detail::require(weights.size() == 0 || weights.size() == 2,
                  "differentiation_decision: weights must describe two variants");
  PhaseDecision out;
  out.single = maximize_qualities(1, pop, single_variant_cost(cost), VectorXd(), shape, options);
  out.pair = maximize_qualities(2, pop, cost, weights, shape, options);
  const double x1 = out.single.global_value;
  const double x2 = out.pair.global_value;
  if (std::max(x1, x2) <= 0.0) {
    out.label = 0;
  } else if (x1 >= x2) {
    out.label = 1;
  } else {
    const VectorXd& q = out.pair.global_arg;
    out.label = std::abs(q[1] - q[0]) > kDifferentiationGap ? 2 : 1;
  }
  return out;
}

}  // namespace qdiff
