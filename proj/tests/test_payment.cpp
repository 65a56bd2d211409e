#include <doctest.h>

#include <cmath>
#include <vector>

#include "corpus.hpp"
#include "expins/crop_case.hpp"
#include "expins/cyber_sim.hpp"
#include "expins/errors.hpp"
#include "expins/expectile.hpp"
#include "expins/payment_design.hpp"
#include "oracles.hpp"

using namespace expins;

namespace {

const std::vector<double> kAlphas{0.3, 0.4, 0.5, 0.6, 0.7};

}  // namespace

TEST_SUITE("payment_design") {
  TEST_CASE("basis risk weights under- and over-compensation") {
    CHECK(basis_risk(10.0, 4.0, 0.75) == doctest::Approx(0.5625 * 36.0));
    CHECK(basis_risk(4.0, 10.0, 0.75) == doctest::Approx(0.0625 * 36.0));
    CHECK(basis_risk(3.0, 3.0, 0.2) == 0.0);
    CHECK_THROWS_AS(basis_risk(-1.0, 0.0, 0.5), ValidationError);
    CHECK_THROWS_AS(basis_risk(1.0, 0.0, 1.0), ValidationError);
  }

  TEST_CASE("optimal fixed payment is strictly increasing in alpha") {
    for (const auto& law : {Distribution::lognormal(1.0, 0.7), Distribution::crop_loss(45.0, 5.0, 40.0, 10.0),
                            Distribution::truncated_gamma_at_level(2.0, 3.0, 0.4)}) {
      double prev = -1.0;
      for (double a : kAlphas) {
        const double y = optimal_pure_payment(law, a);
        CHECK(y > prev);
        prev = y;
      }
    }
  }

  TEST_CASE("shifted law gets a larger payment") {
    const auto base = Distribution::gamma(2.0, 1.5);
    for (double a : kAlphas) CHECK(optimal_pure_payment(base.affine(0.5, 1.0), a) > optimal_pure_payment(base, a));
  }

  TEST_CASE("mean-preserving spread never lowers the payment for alpha at least one half") {
    // Equal-mean log-normals with larger sigma dominate in convex order.
    const double m = 3.0;
    const auto tight = Distribution::lognormal(std::log(m) - 0.5 * 0.3 * 0.3, 0.3);
    const auto wide = Distribution::lognormal(std::log(m) - 0.5 * 0.9 * 0.9, 0.9);
    REQUIRE(mean(tight) == doctest::Approx(mean(wide)));
    for (double a : {0.5, 0.6, 0.75}) CHECK(optimal_pure_payment(wide, a) >= optimal_pure_payment(tight, a) - 1e-12);
  }

  TEST_CASE("grid search agrees with the expectile payment within one grid step") {
    const auto law = Distribution::lognormal(0.5, 0.6);
    Rng rng(8);
    const auto s = sample(law, rng, 100000);
    const std::vector<unsigned char> paid(s.size(), 1);
    for (double a : {0.3, 0.5, 0.75}) {
      const auto gs = grid_search_payment(s, paid, a, quantile(law, 0.999));
      CAPTURE(a);
      CHECK(std::abs(gs.argmin - optimal_pure_payment(law, a)) <= gs.step);
    }
  }

  TEST_CASE("missed incidents leave the optimal payment at the loss expectile") {
    const auto law = Distribution::gamma(3.0, 2.0);
    for (double p_miss : {0.0, 0.2, 0.6}) {
      const auto r = optimal_payment_without_incident(law, 0.7, p_miss, 60000, 17);
      CAPTURE(p_miss);
      CHECK(r.payment == doctest::Approx(expectile(law, gamma_from_alpha(0.7))));
      CHECK(std::abs(r.check.argmin - r.payment) <= 2.0 * r.check.step);
    }
    CHECK_THROWS_AS(optimal_payment_without_incident(law, 0.7, 1.0, 1000, 1), ValidationError);
  }

  TEST_CASE("payouts are exactly zero off the trigger") {
    const auto portfolio = generate_portfolio(corpus::crop_toy());
    const CropIncidentModel model(portfolio, 0);
    const auto scheme = optimal_index_payment(
        std::vector<double>{150.0, 200.0, 240.0}, [&](double t) { return conditional_loss_law(portfolio, 0, t); },
        0.6, model.trigger());
    Rng rng(2);
    int off = 0;
    for (int i = 0; i < 20000; ++i) {
      const auto inc = model.draw(rng);
      if (!model.trigger().contains(inc.index)) {
        ++off;
        CHECK(scheme.payout(inc.index) == 0.0);
      } else {
        CHECK(scheme.payout(inc.index) >= 0.0);
      }
    }
    CHECK(off > 0);
  }

  TEST_CASE("tabulated curves interpolate and stay flat past the ends") {
    const TabulatedCurve c{{0.0, 1.0, 3.0}, {2.0, 4.0, 0.0}};
    CHECK(c.at(-5.0) == 2.0);
    CHECK(c.at(0.5) == doctest::Approx(3.0));
    CHECK(c.at(2.0) == doctest::Approx(2.0));
    CHECK(c.at(9.0) == 0.0);
    const PaymentScheme s{LinearPayment{-1.0, 1.0}, TriggerArea::above(0.0)};
    CHECK(s.payout(0.5) == 0.0);  // clamped
    CHECK(s.payout(3.0) == doctest::Approx(2.0));
    CHECK(s.payout(-3.0) == 0.0);
    CHECK_THROWS_AS(optimal_index_payment(std::vector<double>{1.0, 1.0}, [](double) { return Distribution::normal(0, 1); },
                                          0.5, TriggerArea::above(0.0)),
                    ValidationError);
  }

  TEST_CASE("decomposition identity on the crop toy") {
    const auto portfolio = generate_portfolio(corpus::crop_toy());
    for (int farm : {central_farm(portfolio), peripheral_farm(portfolio)}) {
      const CropIncidentModel model(portfolio, farm);
      const auto d = min_basis_risk_decomposition(model, model.trigger(), 100000, 99);
      CAPTURE(farm);
      CHECK(d.trigger_probability > 0.05);
      CHECK(std::abs(d.lhs.estimate - d.rhs.estimate) <= 3.0 * d.combined_std_error());
    }
  }

  TEST_CASE("decomposition identity on the one-policyholder cyber toy") {
    for (auto family : {DurationFamily::kLogNormal, DurationFamily::kGamma}) {
      DurationModel dm;
      dm.family = family;
      const SingleOutageModel model(dm, CostModel{}, corpus::cyber_toy_holder());
      const auto d = min_basis_risk_decomposition(model, model.trigger(), 100000, 5);
      CHECK(d.trigger_probability == doctest::Approx(0.7).epsilon(0.02));
      CHECK(std::abs(d.lhs.estimate - d.rhs.estimate) <= 3.0 * d.combined_std_error());
    }
  }

  TEST_CASE("models without conditional moments refuse the decomposition") {
    struct Bare : IncidentModel {
      Incident draw(Rng& rng) const override { return {{rng.uniform()}, 0.0, rng.uniform()}; }
    };
    CHECK_THROWS_AS(min_basis_risk_decomposition(Bare{}, TriggerArea::above(0.5), 1000, 1), ValidationError);
    CHECK_THROWS_AS(min_basis_risk_decomposition(Bare{}, TriggerArea::above(2.0), 1000, 1), ValidationError);
  }
}
