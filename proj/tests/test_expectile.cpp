#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "corpus.hpp"
#include "expins/errors.hpp"
#include "expins/expectile.hpp"
#include "oracles.hpp"

using namespace expins;

TEST_SUITE("expectile") {
  TEST_CASE("fixed-point residual and golden-section agreement on a sample of the corpus") {
    // The full 20 x 19 sweep runs in the acceptance binary.
    const auto laws = corpus::laws();
    for (std::size_t i = 0; i < laws.size(); i += 3) {
      const auto& [name, d] = laws[i];
      const auto q = oracle::make_law(d);
      for (double g : {0.1, 0.5, 0.85}) {
        CAPTURE(name);
        CAPTURE(g);
        const double x = expectile(d, g);
        CHECK(std::abs(implied_level(d, x) - g) <= 1e-8);
        const double ref = oracle::golden_section([&](double c, double e) { return q.loss_diff(c, e, g); },
                                                  quantile(d, 1e-9), quantile(d, 1.0 - 1e-9), 1e-12);
        CHECK(std::abs(x - ref) <= 1e-6);
      }
    }
  }

  TEST_CASE("level one half gives the mean") {
    for (const auto& [name, d] : corpus::laws()) {
      CAPTURE(name);
      CHECK(std::abs(expectile(d, 0.5) - mean(d)) <= 1e-10);
    }
  }

  TEST_CASE("translation equivariance and positive homogeneity") {
    for (const auto& [name, d] : corpus::laws()) {
      CAPTURE(name);
      for (double g : {0.1, 0.4, 0.9}) {
        const double e = expectile(d, g);
        CHECK(std::abs(expectile(d.affine(2.5, 1.0), g) - (e + 2.5)) <= 1e-9);
        for (double lambda : {0.1, 2.0, 7.0}) {
          CAPTURE(lambda);
          CHECK(std::abs(expectile(d.affine(0.0, lambda), g) - lambda * e) <= 1e-9 * std::max(1.0, lambda * std::abs(e)));
        }
      }
    }
  }

  TEST_CASE("strictly increasing in the level") {
    for (const auto& [name, d] : corpus::laws()) {
      CAPTURE(name);
      double prev = -std::numeric_limits<double>::infinity();
      for (double g : corpus::gamma_grid()) {
        const double e = expectile(d, g);
        CHECK(e > prev);
        prev = e;
      }
    }
  }

  TEST_CASE("empirical expectile is subadditive above one half and monotone under dominance") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> x(300), y(300), sum(300), upper(300);
      for (int i = 0; i < 300; ++i) {
        x[i] = rng.normal() * 2.0 + (rep % 3);
        y[i] = std::exp(rng.normal());
        sum[i] = x[i] + y[i];
        upper[i] = x[i] + std::abs(rng.normal());
      }
      for (double g : {0.5, 0.6, 0.75, 0.9, 0.99}) {
        CHECK(empirical_expectile(sum, g) <= empirical_expectile(x, g) + empirical_expectile(y, g) + 1e-9);
      }
      for (double g : {0.05, 0.3, 0.5, 0.8}) CHECK(empirical_expectile(x, g) <= empirical_expectile(upper, g));
    }
  }

  TEST_CASE("empirical expectile minimizes the sample asymmetric loss") {
    Rng rng(5);
    std::vector<double> x(101);
    for (auto& v : x) v = std::exp(rng.normal());
    for (double g : {0.1, 0.5, 0.9}) {
      const double e = empirical_expectile(x, g);
      const double ref = oracle::golden_section(
          [&](double c, double d) { return asymmetric_loss(x, c, g) - asymmetric_loss(x, d, g); },
          *std::min_element(x.begin(), x.end()), *std::max_element(x.begin(), x.end()), 1e-13);
      CHECK(e == doctest::Approx(ref).epsilon(1e-7));
      CHECK(expectile(Distribution::empirical(x), g) == doctest::Approx(e).epsilon(1e-12));
    }
  }

  TEST_CASE("derivative identity for the standard normal") {
    const auto d = Distribution::normal(0.0, 1.0);
    for (double g : {0.6, 0.75, 0.9}) {
      const double h = 1e-5;
      const double x = expectile(d, g);
      const double de = (expectile(d, g + h) - expectile(d, g - h)) / (2.0 * h);
      const double f = -(x - 0.0 + g * (1.0 - 2.0 * g) * de) / ((1.0 - 2.0 * g) * (1.0 - 2.0 * g) * de);
      CAPTURE(g);
      CHECK(std::abs(cdf(d, x) - f) <= 1e-4);
    }
  }

  TEST_CASE("stop-loss ordering around the common mean implies expectile dominance") {
    // A right-skewed gamma sample and its reflection about the sample mean:
    // same mean and mean absolute deviation, opposite skew. The ordering of
    // the stop-loss transforms is read off the quadrature oracle, then
    // expectile dominance is checked on the grid.
    Rng rng(41);
    const auto draws = sample(Distribution::gamma(2.0, 1.0), rng, 2000);
    double mu = 0.0;
    for (double x : draws) mu += x;
    mu /= static_cast<double>(draws.size());
    std::vector<double> mirrored;
    for (double x : draws) mirrored.push_back(2.0 * mu - x);
    const auto right = Distribution::empirical(draws);
    const auto left = Distribution::empirical(mirrored);
    REQUIRE(mean(left) == doctest::Approx(mean(right)).epsilon(1e-12));
    const auto ql = oracle::make_law(left);
    const auto qr = oracle::make_law(right);
    const double m = std::min(support(left).lo, support(right).lo);
    const double big_m = std::max(support(left).hi, support(right).hi);
    bool left_below = true;  // pi_left >= pi_right below mu, <= above mu
    for (int i = 1; i < 200; ++i) {
      const double s_low = m + (mu - m) * i / 200.0;
      const double s_high = mu + (big_m - mu) * i / 200.0;
      left_below = left_below && ql.stop_loss(s_low) >= qr.stop_loss(s_low) - 1e-12;
      left_below = left_below && ql.stop_loss(s_high) <= qr.stop_loss(s_high) + 1e-12;
      CHECK(stop_loss_transform(left, s_low) == doctest::Approx(ql.stop_loss(s_low)).epsilon(1e-10));
      CHECK(stop_loss_transform(right, s_high) == doctest::Approx(qr.stop_loss(s_high)).epsilon(1e-10));
    }
    REQUIRE(left_below);
    for (double g : corpus::gamma_grid()) {
      CAPTURE(g);
      CHECK(expectile(left, g) <= expectile(right, g) + 1e-12 * mu);
    }
  }

  TEST_CASE("alpha and gamma maps") {
    CHECK(std::abs(gamma_from_alpha(0.75).value() - 0.9) <= 1e-12);
    CHECK(gamma_from_alpha(0.5).value() == 0.5);
    for (double a : {0.1, 0.3, 0.5, 0.62, 0.9}) CHECK(alpha_from_gamma(gamma_from_alpha(a)) == doctest::Approx(a));
    CHECK(BasisRiskWeights{0.75}.gamma().value() == doctest::Approx(0.9));
    CHECK_THROWS_AS(ExpectileLevel(0.0), ValidationError);
    CHECK_THROWS_AS(ExpectileLevel(1.0), ValidationError);
    CHECK_THROWS_AS(gamma_from_alpha(1.0), ValidationError);
  }
}
