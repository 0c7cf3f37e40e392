#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>

#include "qdiff/errors.hpp"
#include "qdiff/model.hpp"

using namespace qdiff;
using doctest::Approx;

TEST_CASE("acceptance probability") {
  CHECK(acceptance_prob(1.0, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(acceptance_prob(0.0, 2.0) == 0.0);
  CHECK(acceptance_prob(0.5, 2.0) == Approx(1.0 / 6.0).epsilon(1e-15));
  // 0^0 = 1, but the prefactor vanishes at alpha = 0.
  CHECK(acceptance_prob(0.0, 0.0) == 0.0);
  CHECK(acceptance_prob(0.3, 0.0, 0.5) == Approx(1.0 - std::pow(1.0, -0.5)));
  CHECK(acceptance_prob(0.5, 1.0, 2.0) == Approx(0.75 * 0.5));

  CHECK_THROWS_AS(acceptance_prob(1.01, 1.0), DomainError);
  CHECK_THROWS_AS(acceptance_prob(-0.1, 1.0), DomainError);
  CHECK_THROWS_AS(acceptance_prob(0.5, -1.0), DomainError);
  CHECK_THROWS_AS(acceptance_prob(0.5, 1.0, 0.0), DomainError);
}

TEST_CASE("acceptance is nondecreasing in quality") {
  for (double alpha : {0.0, 0.01, 0.3, 1.0, 3.0, 10.0}) {
    double prev = acceptance_prob(0.0, alpha);
    for (int k = 1; k <= 1000; ++k) {
      const double p = acceptance_prob(k / 1000.0, alpha);
      REQUIRE(p >= prev);
      REQUIRE(p < 1.0);
      prev = p;
    }
  }
}

TEST_CASE("priced acceptance") {
  CHECK(acceptance_prob_priced(0.5, 1.0, 1.0) == Approx(0.25).epsilon(1e-15));
  CHECK(acceptance_prob_priced(0.5, 0.5, 2.0) == Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(acceptance_prob_priced(0.0, 0.5, 0.0) == Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(acceptance_prob_priced(0.5, 2.5, 1.0), DomainError);  // p > alpha+1
  CHECK_THROWS_AS(acceptance_prob_priced(0.8, 0.5, 1.0), DomainError);  // Q > p
  CHECK_THROWS_AS(acceptance_prob_priced(0.0, 0.0, 1.0), DomainError);

  SUBCASE("unit price reduces to the plain form") {
    for (double alpha : {0.0, 0.2, 1.0, 4.0}) {
      for (int k = 0; k <= 100; ++k) {
        const double q = k / 100.0;
        REQUIRE(acceptance_prob_priced(q, 1.0, alpha) ==
                Approx(acceptance_prob(q, alpha)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("selection probability") {
  const VectorXd uniform3 = VectorXd::Constant(3, 1.0 / 3.0);
  CHECK(selection_prob(0, VectorXd{{0.3, 0.6, 0.9}}, uniform3, 0.0) == Approx(1.0 / 3.0));
  CHECK(selection_prob(1, VectorXd{{0.8, 0.2}}, VectorXd{{0.5, 0.5}}, 1.0) == Approx(0.2));
  CHECK(selection_prob(0, VectorXd{{0.5, 0.5}}, VectorXd{{0.1, 0.9}}, 3.0) == Approx(0.1));

  SUBCASE("all-zero qualities fall back to the weights") {
    const auto ps = selection_probs(VectorXd::Zero(2), VectorXd{{0.3, 0.7}}, 2.0);
    CHECK(ps[0] == Approx(0.3));
    CHECK(ps[1] == Approx(0.7));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(selection_probs(VectorXd{{0.5}}, VectorXd{{1.0}}, -1.0), DomainError);
    CHECK_THROWS_AS(selection_probs(VectorXd{{0.5, 0.2}}, VectorXd{{1.0}}, 1.0), DomainError);
    CHECK_THROWS_AS(selection_prob(2, VectorXd{{0.5, 0.2}}, VectorXd{{0.5, 0.5}}, 1.0),
                    DomainError);
  }
}

TEST_CASE("selection probabilities sum to one") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + trial % 6;
    VectorXd q(m), r(m);
    for (int k = 0; k < m; ++k) {
      q[k] = u(rng);
      r[k] = u(rng);
    }
    r /= r.sum();
    const double sigma = 5.0 * u(rng);
    REQUIRE(std::abs(selection_probs(q, r, sigma).sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("sharp selection concentrates on the best variant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    VectorXd q(3);
    for (int k = 0; k < 3; ++k) q[k] = u(rng);
    Index best = 0;
    const double top = q.maxCoeff(&best);
    // Distinct on the scale where sigma = 200 can resolve them.
    bool distinct = true;
    for (int k = 0; k < 3; ++k) distinct &= (k == best) || q[k] < 0.97 * top;
    if (!distinct) continue;
    REQUIRE(selection_prob(best, q, VectorXd::Constant(3, 1.0 / 3.0), 200.0) > 0.99);
  }
}

TEST_CASE("uniform weights recover the unweighted selection rule") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 4;
    VectorXd q(m);
    for (int k = 0; k < m; ++k) q[k] = u(rng);
    const double sigma = 4.0 * u(rng);
    const VectorXd powered = q.array().pow(sigma);
    const VectorXd ps = selection_probs(q, VectorXd::Constant(m, 1.0 / m), sigma);
    for (int k = 0; k < m; ++k) REQUIRE(std::abs(ps[k] - powered[k] / powered.sum()) <= 1e-15);
  }
}

TEST_CASE("value types validate eagerly") {
  CHECK_THROWS_AS(BuyerGroup(-0.1, 0.0), DomainError);
  CHECK_THROWS_AS(BuyerGroup(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(BuyerGroup(1.0, 0.0, 1.5), DomainError);
  CHECK_THROWS_AS(Population({}), DomainError);
  CHECK_THROWS_AS(Population({BuyerGroup(1, 0, 0.5), BuyerGroup(2, 0, 0.4)}), DomainError);
  CHECK_THROWS_AS(Population({BuyerGroup(1, 0, 1.0)}, 0), DomainError);
  CHECK_THROWS_AS(Population::two_groups(0.1, 0, 3, 0, 1.2), DomainError);
  CHECK_NOTHROW(Population({BuyerGroup(1, 0, 0.3), BuyerGroup(2, 0, 0.7)}));

  CHECK_THROWS_AS(ProductLine{VectorXd()}, DomainError);
  CHECK_THROWS_AS(ProductLine(VectorXd{{1.2}}), DomainError);
  CHECK_THROWS_AS(ProductLine(VectorXd{{0.2, 0.3}}, VectorXd{{0.5, 0.6}}), DomainError);
  CHECK_THROWS_AS(ProductLine(VectorXd{{0.2, 0.3}}, VectorXd{{1.0}}), DomainError);
  CHECK_THROWS_AS(ProductLine(VectorXd{{0.2}}, VectorXd(), {.price = 0.0}), DomainError);
  CHECK_THROWS_AS(CostModel(-0.01), DomainError);

  const ProductLine line(VectorXd{{0.2, 0.4, 0.6, 0.8}});
  CHECK(line.weights().isApprox(VectorXd::Constant(4, 0.25)));
}

TEST_CASE("single-product profit") {
  CHECK(expected_profit_single(0.0, Population::homogeneous(0.7), CostModel(0.05)) ==
        Approx(-0.05));
  CHECK(expected_profit_single(0.5, Population::homogeneous(1.0), CostModel(0.0)) ==
        Approx(0.125).epsilon(1e-15));
  const auto pop = Population::two_groups(0.1, 0.0, 3.0, 0.0, 0.5);
  const double hand =
      0.5 * (0.5 * (1.0 - 1.0 / 1.1) * std::pow(0.5, 0.1) + 0.5 * 0.75 * std::pow(0.5, 3.0));
  CHECK(expected_profit_single(0.5, pop, CostModel(0.0)) == Approx(hand).epsilon(1e-14));
  // gamma bends only the unit cost.
  CHECK(expected_profit_single(0.5, Population::homogeneous(1.0), CostModel(0.0), 1.0, 2.0) ==
        Approx(0.75 * 0.25));
  CHECK_THROWS_AS(expected_profit_single(1.5, pop, CostModel(0.0)), DomainError);
  CHECK_THROWS_AS(
      expected_profit_single(0.5, pop, CostModel(0.0, ProductionMode::damaged_goods)),
      DomainError);
}

TEST_CASE("multi-variant profit") {
  const auto hom = Population::homogeneous(1.0, 1.0);
  SUBCASE("one variant is the single product") {
    const auto pop = Population::two_groups(0.2, 0.5, 3.0, 3.0, 0.4);
    for (int k = 0; k <= 20; ++k) {
      const double q = k / 20.0;
      REQUIRE(expected_profit_multi(ProductLine(VectorXd{{q}}), pop, CostModel(0.01)) ==
              Approx(expected_profit_single(q, pop, CostModel(0.01))).epsilon(1e-15));
    }
  }
  SUBCASE("hand-evaluated two-variant display") {
    const double hand =
        0.8 * (0.2 / 0.95) * 0.5 * 0.2 + 0.25 * (0.75 / 0.95) * 0.5 * 0.75;
    CHECK(expected_profit_multi(ProductLine(VectorXd{{0.2, 0.75}}), hom, CostModel(0.0)) ==
          Approx(hand).epsilon(1e-14));
  }
  SUBCASE("identical variants cost one extra z each") {
    const auto pop = Population::two_groups(0.2, 0.5, 3.0, 3.0, 0.6);
    const CostModel cost(0.003);
    for (int m = 1; m <= 6; ++m) {
      for (double q : {0.0, 0.1, 0.4, 0.75, 1.0}) {
        const double multi = expected_profit_multi(ProductLine(VectorXd::Constant(m, q)), pop, cost);
        const double single = expected_profit_single(q, pop, cost) - (m - 1) * cost.z();
        REQUIRE(std::abs(multi - single) <= 4 * std::numeric_limits<double>::epsilon());
      }
    }
  }
  SUBCASE("damaged goods charge the top margin and one fixed cost") {
    const ProductLine line(VectorXd{{0.2, 0.6}});
    const CostModel damaged(0.01, ProductionMode::damaged_goods);
    const auto ps = selection_probs(line.qualities(), line.weights(), 1.0);
    const double sold = ps[0] * acceptance_prob(0.2, 1.0) + ps[1] * acceptance_prob(0.6, 1.0);
    CHECK(expected_profit_multi(line, hom, damaged) == Approx(0.4 * sold - 0.01));
    CHECK_THROWS_AS(expected_profit_multi(ProductLine(VectorXd{{0.4}}), hom, damaged),
                    DomainError);
  }
  SUBCASE("price and prefactor exponent") {
    const auto pop = Population::homogeneous(2.0, 1.0);
    const ProductLine priced(VectorXd{{0.5}}, VectorXd(), {.price = 1.5});
    CHECK(expected_profit_multi(priced, pop, CostModel(0.0)) ==
          Approx(expected_profit_priced(0.5, 1.5, pop, CostModel(0.0))));
    CHECK_THROWS_AS(expected_profit_multi(ProductLine(VectorXd{{0.5}}, VectorXd(),
                                                      {.price = 1.5, .beta = 2.0}),
                                          pop, CostModel(0.0)),
                    DomainError);
    // Price above alpha+1 of the least discerning group.
    CHECK_THROWS_AS(expected_profit_multi(ProductLine(VectorXd{{0.5}}, VectorXd(), {.price = 1.5}),
                                          Population::homogeneous(0.3), CostModel(0.0)),
                    DomainError);
  }
}

TEST_CASE("expected sales per variant") {
  const auto hom = Population::homogeneous(1.0, 1.0);
  // Same hand evaluation as the two-variant profit, without the margins.
  const VectorXd sold = expected_sales(ProductLine(VectorXd{{0.2, 0.75}}), hom);
  CHECK(sold[0] == Approx((0.2 / 0.95) * 0.5 * 0.2).epsilon(1e-14));
  CHECK(sold[1] == Approx((0.75 / 0.95) * 0.5 * 0.75).epsilon(1e-14));

  const auto pop = Population::two_groups(0.2, 0.5, 3.0, 3.0, 0.4);
  const ProductLine line(VectorXd{{0.1, 0.3, 0.8}}, VectorXd{{0.5, 0.3, 0.2}});
  const VectorXd s = expected_sales(line, pop);
  const VectorXd margin = VectorXd::Ones(3) - line.qualities();
  CHECK(margin.dot(s) - 3 * 0.01 ==
        Approx(expected_profit_multi(line, pop, CostModel(0.01))).epsilon(1e-14));
  CHECK((s.array() >= 0).all());
  CHECK(s.sum() <= 1.0);
}

TEST_CASE("priced profit") {
  const auto pop = Population::homogeneous(1.0);
  // At alpha = 1 the joint optimum (alpha/2, (alpha+1)/2) sits at unit price.
  CHECK(expected_profit_priced(0.5, 1.0, pop, CostModel(0.0)) ==
        Approx(0.5 * 0.5 * 0.5).epsilon(1e-15));
  const auto pop2 = Population::homogeneous(2.0);
  CHECK(expected_profit_priced(1.0, 1.5, pop2, CostModel(0.0)) ==
        Approx(0.5 * 0.5 * std::pow(1.0 / 1.5, 2.0)).epsilon(1e-15));
  CHECK(expected_profit_priced(1.0, 1.0, pop, CostModel(0.0)) == 0.0);
  CHECK_THROWS_AS(expected_profit_priced(0.5, 2.5, pop, CostModel(0.0)), DomainError);
}

TEST_CASE("evaluation is pure") {
  const auto pop = Population::two_groups(0.2, 0.5, 3.0, 3.0, 0.5);
  const ProductLine line(VectorXd{{0.17, 0.7}}, VectorXd{{0.4, 0.6}});
  const double a = expected_profit_multi(line, pop, CostModel(0.002));
  const double b = expected_profit_multi(line, pop, CostModel(0.002));
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("scalar type is a template parameter") {
  const auto pop = PopulationT<long double>::homogeneous(1.0L);
  const long double x = expected_profit_single<long double>(0.5L, pop, CostModelT<long double>(0));
  CHECK(static_cast<double>(x) == Approx(0.125));
  CHECK(acceptance_prob<float>(1.0f, 1.0f) == Approx(0.5f));
}
