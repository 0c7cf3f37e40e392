#pragma once

// Agent-level sampling of the two-step purchase process. Each buyer draws from
// its own counter-based random stream keyed by (seed, buyer index), so a run is
// bit-identical for any number of worker threads.

#include <cstdint>
#include <vector>

#include "qdiff/model.hpp"
#include "qdiff/spam.hpp"

namespace qdiff {

/// SplitMix64 stream started at a hash of (seed, stream index).
class BuyerStream {
 public:
  BuyerStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t state_;
};

struct SimulationReport {
  double sampled_profit_per_buyer = 0.0;
  /// Sample standard deviation of per-buyer profit contributions / sqrt(n).
  double standard_error = 0.0;
  /// Items sold per variant (spam: per display position).
  std::vector<std::int64_t> sales;
  std::vector<std::int64_t> group_buyers;
  std::vector<std::int64_t> group_purchases;
  /// group_sales[g][k]: items of variant k bought by members of group g.
  std::vector<std::vector<std::int64_t>> group_sales;
  std::uint64_t seed = 0;
  std::int64_t n_buyers = 0;
};

SimulationReport simulate_market(const ProductLine& line, const Population& pop,
                                 const CostModel& cost, std::int64_t n_buyers,
                                 std::uint64_t seed, int threads = 1);

/// Buyers examine up to M (or the perception cap) identical offers in turn and
/// stop at the first acceptance.
SimulationReport simulate_spam(const SpamScenario& scenario, double q, std::int64_t m,
                               std::int64_t n_buyers, std::uint64_t seed, int threads = 1);

}  // namespace qdiff
