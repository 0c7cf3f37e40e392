#include "qdiff/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qdiff/parallel.hpp"

namespace qdiff {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Tally {
  std::vector<std::int64_t> sales;
  std::vector<std::int64_t> group_buyers;
  std::vector<std::int64_t> group_purchases;
  std::vector<std::vector<std::int64_t>> group_sales;

  Tally(std::size_t variants, std::size_t groups)
      : sales(variants, 0),
        group_buyers(groups, 0),
        group_purchases(groups, 0),
        group_sales(groups, std::vector<std::int64_t>(variants, 0)) {}

  void sell(std::size_t g, std::size_t k) {
    ++sales[k];
    ++group_purchases[g];
    ++group_sales[g][k];
  }

  void add(const Tally& o) {
    for (std::size_t i = 0; i < sales.size(); ++i) sales[i] += o.sales[i];
    for (std::size_t i = 0; i < group_buyers.size(); ++i) {
      group_buyers[i] += o.group_buyers[i];
      group_purchases[i] += o.group_purchases[i];
      for (std::size_t k = 0; k < sales.size(); ++k) group_sales[i][k] += o.group_sales[i][k];
    }
  }
};

std::size_t draw_index(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
}

template <typename PerBuyer>
Tally run_buyers(std::int64_t n_buyers, int threads, std::size_t variants, std::size_t groups,
                 const PerBuyer& per_buyer) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n_buyers)));
  std::vector<Tally> partial(workers, Tally(variants, groups));
  parallel_for(workers, workers, [&](std::size_t w) {
    const std::int64_t begin = n_buyers * static_cast<std::int64_t>(w) / workers;
    const std::int64_t end = n_buyers * static_cast<std::int64_t>(w + 1) / workers;
    for (std::int64_t i = begin; i < end; ++i) per_buyer(i, partial[w]);
  });
  Tally total(variants, groups);
  for (const auto& t : partial) total.add(t);  // integer sums: order does not matter
  return total;
}

SimulationReport summarize(Tally&& tally, const std::vector<double>& margin, double fixed_cost,
                           std::int64_t n_buyers, std::uint64_t seed) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < margin.size(); ++k) {
    sum += static_cast<double>(tally.sales[k]) * margin[k];
    sum_sq += static_cast<double>(tally.sales[k]) * margin[k] * margin[k];
  }
  const double n = static_cast<double>(n_buyers);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;

  SimulationReport r;
  r.sampled_profit_per_buyer = mean - fixed_cost;
  r.standard_error = std::sqrt(var / n);
  r.sales = std::move(tally.sales);
  r.group_buyers = std::move(tally.group_buyers);
  r.group_purchases = std::move(tally.group_purchases);
  r.group_sales = std::move(tally.group_sales);
  r.seed = seed;
  r.n_buyers = n_buyers;
  return r;
}

}  // namespace

BuyerStream::BuyerStream(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ULL)) {}

std::uint64_t BuyerStream::next() {
  state_ += kGolden;
  return mix64(state_);
}

double BuyerStream::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SimulationReport simulate_market(const ProductLine& line, const Population& pop,
                                 const CostModel& cost, std::int64_t n_buyers,
                                 std::uint64_t seed, int threads) {
  detail::require(n_buyers >= 1, "simulate_market: n_buyers must be >= 1");
  // Evaluating the analytic profit validates every cross-type constraint.
  (void)expected_profit_multi(line, pop, cost);

  const Index m = line.size();
  const auto& q = line.qualities();
  const bool damaged = cost.mode() == ProductionMode::damaged_goods;

  std::vector<double> margin(m);
  for (Index k = 0; k < m; ++k) {
    margin[k] = line.price() - std::pow(damaged ? q.maxCoeff() : q[k], line.gamma());
  }

  const std::size_t groups = pop.size();
  std::vector<double> group_cdf(groups);
  std::vector<std::vector<double>> select_cdf(groups, std::vector<double>(m));
  std::vector<std::vector<double>> accept(groups, std::vector<double>(m));
  double acc = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    const auto& grp = pop.groups()[g];
    acc += grp.proportion();
    group_cdf[g] = acc;
    const VectorXd ps = selection_probs(q, line.weights(), grp.sigma());
    double c = 0.0;
    for (Index k = 0; k < m; ++k) {
      c += ps[k];
      select_cdf[g][k] = c;
      accept[g][k] = detail::line_acceptance(q[k], grp.alpha(), line.shape());
    }
  }

  Tally tally = run_buyers(n_buyers, threads, m, groups, [&](std::int64_t i, Tally& t) {
    BuyerStream rng(seed, static_cast<std::uint64_t>(i));
    const std::size_t g = draw_index(group_cdf, rng.uniform());
    const std::size_t k = draw_index(select_cdf[g], rng.uniform());
    ++t.group_buyers[g];
    if (rng.uniform() < accept[g][k]) t.sell(g, k);
  });
  const double fixed = damaged ? cost.z() : static_cast<double>(m) * cost.z();
  return summarize(std::move(tally), margin, fixed, n_buyers, seed);
}

SimulationReport simulate_spam(const SpamScenario& scenario, double q, std::int64_t m,
                               std::int64_t n_buyers, std::uint64_t seed, int threads) {
  detail::require(n_buyers >= 1, "simulate_spam: n_buyers must be >= 1");
  detail::require(m >= 1, "simulate_spam: at least one offer required");
  const std::int64_t shown = scenario.perceived(m);
  const double p = acceptance_prob(q, scenario.alpha());

  Tally tally = run_buyers(n_buyers, threads, static_cast<std::size_t>(shown), 1,
                           [&](std::int64_t i, Tally& t) {
                             BuyerStream rng(seed, static_cast<std::uint64_t>(i));
                             ++t.group_buyers[0];
                             for (std::int64_t k = 0; k < shown; ++k) {
                               if (rng.uniform() < p) {
                                 t.sell(0, static_cast<std::size_t>(k));
                                 break;
                               }
                             }
                           });
  const std::vector<double> margin(shown, 1.0 - q);
  return summarize(std::move(tally), margin, static_cast<double>(shown) * scenario.z(), n_buyers,
                   seed);
}

}  // namespace qdiff
