#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "expins/als_regression.hpp"
#include "expins/errors.hpp"
#include "expins/expectile.hpp"
#include "expins/json_io.hpp"
#include "expins/rng.hpp"

using namespace expins;

namespace {

std::vector<double> skewed_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y(n);
  for (auto& v : y) v = std::exp(0.8 * rng.normal()) + 0.3 * rng.normal();
  return y;
}

}  // namespace

TEST_SUITE("als_regression") {
  TEST_CASE("intercept-only fit equals the empirical expectile") {
    const auto y = skewed_sample(5000, 3);
    const auto design = design_intercept(y);
    double prev = -1e300;
    for (double g : {0.1, 0.4, 0.5, 0.6, 0.9}) {
      CAPTURE(g);
      const auto f = fit(design, g);
      CHECK(f.converged);
      CHECK(std::abs(f.coefficients(0) - empirical_expectile(y, g)) <= 1e-9);
      CHECK(f.coefficients(0) >= prev);
      prev = f.coefficients(0);
    }
  }

  TEST_CASE("objective trace never increases") {
    Rng rng(9);
    std::vector<double> theta(2000), s(2000);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] = rng.uniform() * 10.0;
      s[i] = 1.0 + 0.5 * theta[i] + std::exp(rng.normal());
    }
    for (double g : {0.05, 0.3, 0.9, 0.99}) {
      const auto f = fit(design_linear(theta, Eigen::MatrixXd(), s), g);
      CAPTURE(g);
      CHECK(f.converged);
      REQUIRE(!f.objective_trace.empty());
      for (std::size_t i = 1; i < f.objective_trace.size(); ++i)
        CHECK(f.objective_trace[i] <= f.objective_trace[i - 1] + 1e-12 * std::abs(f.objective_trace[i - 1]));
    }
  }

  TEST_CASE("level one half reproduces least squares from the fixture") {
    const auto table = read_csv(EXPINS_FIXTURE_DIR "/linear_small.csv");
    const auto ref = read_json_file(EXPINS_FIXTURE_DIR "/linear_small_ols.json");
    const auto s = table.values("s");
    const auto theta = table.values("theta");
    const auto f = fit(design_linear(theta, Eigen::MatrixXd(), s), 0.5);
    CHECK(f.iterations <= 2);
    CHECK(f.coefficients(0) == doctest::Approx(ref["ols_coefficients"][0].get<double>()).epsilon(1e-10));
    CHECK(f.coefficients(1) == doctest::Approx(ref["ols_coefficients"][1].get<double>()).epsilon(1e-10));
  }

  TEST_CASE("scaling the response scales the coefficients") {
    const auto table = read_csv(EXPINS_FIXTURE_DIR "/linear_small.csv");
    const auto s = table.values("s");
    const auto theta = table.values("theta");
    for (double lambda : {0.25, 3.0}) {
      std::vector<double> scaled(s);
      for (auto& v : scaled) v *= lambda;
      for (double g : {0.2, 0.8}) {
        const auto a = fit(design_linear(theta, Eigen::MatrixXd(), s), g);
        const auto b = fit(design_linear(theta, Eigen::MatrixXd(), scaled), g);
        for (Eigen::Index j = 0; j < a.coefficients.size(); ++j)
          CHECK(std::abs(b.coefficients(j) - lambda * a.coefficients(j)) <= 1e-9 * std::max(1.0, std::abs(b.coefficients(j))));
      }
    }
  }

  TEST_CASE("pure parametric fit separates triggered and untriggered groups") {
    Rng rng(21);
    std::vector<double> theta(3000), s(3000), on, off;
    const auto trig = TriggerArea::above(5.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] = rng.uniform() * 10.0;
      s[i] = (trig.contains(theta[i]) ? 4.0 : 1.0) * std::exp(0.5 * rng.normal());
      (trig.contains(theta[i]) ? on : off).push_back(s[i]);
    }
    const auto f = fit(design_pure_parametric(theta, trig, Eigen::MatrixXd(), s), 0.7);
    REQUIRE(f.columns == std::vector<std::string>{"intercept", "indicator"});
    CHECK(f.coefficients(0) == doctest::Approx(empirical_expectile(off, 0.7)).epsilon(1e-9));
    CHECK(f.coefficients(0) + f.coefficients(1) == doctest::Approx(empirical_expectile(on, 0.7)).epsilon(1e-9));
    const auto scheme = scheme_from_fit(f, DesignKind::kPureParametric, trig);
    CHECK(scheme.payout(2.0) == 0.0);
    CHECK(scheme.payout(7.0) == doctest::Approx(empirical_expectile(on, 0.7)).epsilon(1e-9));
  }

  TEST_CASE("step design with covariates names its columns and predicts per bin") {
    Rng rng(4);
    const std::vector<Interval> bins{{2.0, 5.0, true, false}, {5.0, 10.0, true, true}};
    std::vector<double> theta(4000), s(4000);
    Eigen::MatrixXd x(4000, 2);
    for (Eigen::Index i = 0; i < 4000; ++i) {
      theta[i] = rng.uniform() * 10.0;
      x(i, 0) = 1.0;
      x(i, 1) = rng.uniform() < 0.5 ? 1.0 : 2.0;
      s[i] = x(i, 1) * (1.0 + (theta[i] >= 2.0) + 2.0 * (theta[i] >= 5.0)) + 0.1 * rng.normal();
    }
    const auto d = design_step(theta, bins, x, s);
    CHECK(d.columns == std::vector<std::string>{"intercept:x1", "intercept:x2", "bin1:x1", "bin1:x2", "bin2:x1", "bin2:x2"});
    const auto f = fit(d, 0.5);
    CHECK_FALSE(f.rank_deficient);
    const std::vector<double> row{1.0, 2.0};
    const auto scheme = scheme_from_fit(f, DesignKind::kStep, TriggerArea::above(-1e300), row, bins);
    CHECK(scheme.payout(1.0) == doctest::Approx(2.0).epsilon(0.02));
    CHECK(scheme.payout(3.0) == doctest::Approx(4.0).epsilon(0.02));
    CHECK(scheme.payout(8.0) == doctest::Approx(8.0).epsilon(0.02));
  }

  TEST_CASE("rank deficiency is flagged and overlapping bins are rejected") {
    std::vector<double> theta{1, 2, 3, 4, 5, 6}, s{1, 2, 2, 3, 5, 4};
    // The two bins cover every observation, so they sum to the intercept.
    const std::vector<Interval> cover{{0.0, 3.5, true, false}, {3.5, 10.0, true, true}};
    const auto f = fit(design_step(theta, cover, Eigen::MatrixXd(), s), 0.5);
    CHECK(f.rank_deficient);
    const auto pred = predict(f, design_step(theta, cover, Eigen::MatrixXd(), s).x);
    CHECK(pred(0) == doctest::Approx(5.0 / 3.0).epsilon(1e-6));
    CHECK(pred(5) == doctest::Approx(4.0).epsilon(1e-6));
    const std::vector<Interval> overlap{{0.0, 3.0, true, true}, {3.0, 6.0, true, true}};
    CHECK_THROWS_AS(design_step(theta, overlap, Eigen::MatrixXd(), s), ValidationError);
    CHECK_THROWS_AS(design_intercept(std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(design_linear(theta, Eigen::MatrixXd(), std::vector<double>{1.0}), ValidationError);
  }
}
