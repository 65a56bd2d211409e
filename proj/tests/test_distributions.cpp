#include <doctest.h>

#include <cmath>
#include <limits>

#include "corpus.hpp"
#include "expins/cyber_sim.hpp"
#include "expins/distributions.hpp"
#include "expins/errors.hpp"
#include "oracles.hpp"

using namespace expins;

namespace {

bool is_analytic(Family f) {
  return f == Family::kNormal || f == Family::kLogNormal || f == Family::kGamma || f == Family::kTruncatedLogNormal ||
         f == Family::kTruncatedGamma;
}

bool heavy_tailed(const Distribution& d) {
  if (const auto* l = std::get_if<LogNormalLaw>(&d.law())) return l->sigma >= 1.0;
  if (const auto* t = std::get_if<TruncatedLogNormalLaw>(&d.law())) return t->base.sigma >= 1.0;
  return false;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-6); }

}  // namespace

TEST_SUITE("distributions") {
  TEST_CASE("mean and lower partial moment match quadrature at five probes") {
    for (const auto& [name, d] : corpus::laws()) {
      if (!is_analytic(d.family())) continue;
      CAPTURE(name);
      const auto q = oracle::make_law(d);
      const double e_ref = q.mean();
      for (double level : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double x = quantile(d, level);
        const auto pm = mean_and_partial_moment(d, x);
        CAPTURE(level);
        CHECK(rel_err(pm.mean, e_ref) <= 1e-8);
        CHECK(rel_err(pm.lower, q.lower_moment(x)) <= 1e-8);
      }
    }
  }

  TEST_CASE("crop loss partial moments include both atoms") {
    const auto d = Distribution::crop_loss(38.0, 6.0, 40.0, 10.0);
    const auto q = oracle::make_law(d);
    for (double s : {0.0, 5.0, 15.0, 25.0, 30.0}) {
      CAPTURE(s);
      CHECK(mean_and_partial_moment(d, s).lower == doctest::Approx(q.lower_moment(s)).epsilon(1e-9));
    }
    CHECK(atom_mass(d, 0.0) == doctest::Approx(oracle::normal_sf(2.0 / 6.0)).epsilon(1e-12));
    CHECK(atom_mass(d, 30.0) == doctest::Approx(oracle::normal_sf(28.0 / 6.0)).epsilon(1e-12));
    const double m = q.mean();
    CHECK(variance(d) == doctest::Approx(q.full([m](double t) { return (t - m) * (t - m); })).epsilon(1e-9));
  }

  TEST_CASE("lower partial moment is nondecreasing and bounded by the mean for nonnegative laws") {
    for (const auto& [name, d] : corpus::laws()) {
      if (support(d).lo < 0.0) continue;
      CAPTURE(name);
      const double e = mean(d);
      double prev = 0.0;
      for (int i = 1; i < 100; ++i) {
        const double g = mean_and_partial_moment(d, quantile(d, i / 100.0)).lower;
        CHECK(g >= prev - 1e-12 * e);
        CHECK(g <= e * (1.0 + 1e-12));
        prev = g;
      }
    }
  }

  TEST_CASE("gamma duration law matches the log-normal mean and variance in every year") {
    DurationModel ln;
    DurationModel ga;
    ga.family = DurationFamily::kGamma;
    for (int year = 0; year < 10; ++year) {
      CAPTURE(year);
      const auto a = ln.law(year);
      const auto b = ga.law(year);
      CHECK(std::abs(mean(b) / mean(a) - 1.0) <= 1e-12);
      CHECK(std::abs(variance(b) / variance(a) - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("truncated cdf is the renormalized base cdf above the threshold") {
    const auto base_ln = Distribution::lognormal(0.3, 0.9);
    const auto base_g = Distribution::gamma(1.7, 2.0);
    for (double p : {0.05, 0.3, 0.5, 0.9}) {
      const auto tl = Distribution::truncated_lognormal_at_level(0.3, 0.9, p);
      const auto tg = Distribution::truncated_gamma_at_level(1.7, 2.0, p);
      const double th_l = quantile(base_ln, p), th_g = quantile(base_g, p);
      CHECK(support(tl).lo == doctest::Approx(th_l).epsilon(1e-12));
      for (double k : {1.0, 1.1, 1.5, 3.0, 10.0}) {
        CAPTURE(p);
        CAPTURE(k);
        CHECK(std::abs(cdf(tl, k * th_l) - (cdf(base_ln, k * th_l) - p) / (1.0 - p)) <= 1e-12);
        CHECK(std::abs(cdf(tg, k * th_g) - (cdf(base_g, k * th_g) - p) / (1.0 - p)) <= 1e-12);
      }
      CHECK(cdf(tl, 0.5 * th_l) == 0.0);
    }
  }

  TEST_CASE("quantile inverts cdf") {
    for (const auto& [name, d] : corpus::laws()) {
      if (!d.is_continuous()) continue;
      CAPTURE(name);
      for (double q : {1e-6, 0.01, 0.25, 0.5, 0.75, 0.99, 1.0 - 1e-6}) {
        CAPTURE(q);
        CHECK(cdf(d, quantile(d, q)) == doctest::Approx(q).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("quantile is the left-continuous inverse for atomic laws") {
    const auto d = Distribution::discrete({{3.0, 0.3}, {-1.0, 0.2}, {0.0, 0.5}});
    CHECK(quantile(d, 0.1) == -1.0);
    CHECK(quantile(d, 0.2) == -1.0);
    CHECK(quantile(d, 0.2000001) == 0.0);
    CHECK(quantile(d, 0.95) == 3.0);
    CHECK(cdf(d, -0.5) == doctest::Approx(0.2));
    CHECK(mean_and_partial_moment(d, 0.0).lower == doctest::Approx(-0.2));
  }

  TEST_CASE("sample means agree with closed-form means") {
    Rng rng(7);
    for (const auto& [name, d] : corpus::laws()) {
      CAPTURE(name);
      const auto xs = sample(d, rng, 200000);
      RunningStats st;
      for (double x : xs) st.add(x);
      CHECK(std::abs(st.mean - mean(d)) <= 4.0 * st.std_error() + 1e-12);
      // Sample variances of the heavy log-normal tails converge too slowly to check.
      if (heavy_tailed(d)) continue;
      CHECK(st.variance() == doctest::Approx(variance(d)).epsilon(0.05));
    }
  }

  TEST_CASE("affine laws transform moments and quantiles") {
    const auto base = Distribution::gamma(2.0, 1.5);
    const auto d = base.affine(3.0, 2.0);
    CHECK(mean(d) == doctest::Approx(3.0 + 2.0 * mean(base)));
    CHECK(variance(d) == doctest::Approx(4.0 * variance(base)));
    CHECK(quantile(d, 0.3) == doctest::Approx(3.0 + 2.0 * quantile(base, 0.3)));
    CHECK(support(d).lo == doctest::Approx(3.0));
    const auto twice = d.affine(-1.0, 0.5);
    CHECK(mean(twice) == doctest::Approx(-1.0 + 0.5 * mean(d)));
  }

  TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(Distribution::normal(0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(Distribution::lognormal(0.0, -1.0), ValidationError);
    CHECK_THROWS_AS(Distribution::gamma(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(Distribution::truncated_gamma_at_level(1.0, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(Distribution::crop_loss(50.0, 5.0, 10.0, 40.0), ValidationError);
    CHECK_THROWS_AS(Distribution::empirical({}), ValidationError);
    CHECK_THROWS_AS(Distribution::discrete({{1.0, 0.5}}), ValidationError);
    CHECK_THROWS_AS(Distribution::normal(0.0, 1.0).affine(0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(quantile(Distribution::normal(0.0, 1.0), 1.0), ValidationError);
    CHECK_THROWS_AS(Distribution::normal(std::numeric_limits<double>::quiet_NaN(), 1.0), ValidationError);
  }
}
