#include <doctest.h>

#include <cmath>
#include <vector>

#include "corpus.hpp"
#include "expins/crop_case.hpp"
#include "expins/errors.hpp"
#include "expins/expectile.hpp"
#include "oracles.hpp"

using namespace expins;

TEST_SUITE("crop_case") {
  TEST_CASE("default portfolio has fifty farms inside the disk and a clean Cholesky factor") {
    const CropConfig cfg;
    const auto p = generate_portfolio(cfg);
    CHECK(p.locations.size() == 50);
    for (const auto& l : p.locations) CHECK(std::hypot(l.x, l.y) <= cfg.radius);
    CHECK(p.cholesky_jitter <= 1e-10 * cfg.sigma * cfg.sigma);
    const Eigen::MatrixXd rebuilt = p.cholesky * p.cholesky.transpose();
    CHECK((rebuilt - p.covariance).cwiseAbs().maxCoeff() <= 1e-9);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.covariance);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    CHECK(p.index_variance == doctest::Approx(p.covariance.sum()));
  }

  TEST_CASE("same seed gives the same layout") {
    const auto a = generate_portfolio(CropConfig{});
    const auto b = generate_portfolio(CropConfig{});
    CropConfig other;
    other.seed = 2;
    const auto c = generate_portfolio(other);
    CHECK(a.locations[7].x == b.locations[7].x);
    CHECK(a.locations[7].x != c.locations[7].x);
  }

  TEST_CASE("conditioning on the index shrinks every farm's spread") {
    const auto p = generate_portfolio(CropConfig{});
    for (int k = 0; k < p.config.farms; ++k) CHECK(conditional_yield_params(p, k, 2500.0).sigma < p.config.sigma);
  }

  TEST_CASE("conditional loss moments match quadrature with atom bookkeeping") {
    const auto p = generate_portfolio(CropConfig{});
    for (int k : {central_farm(p), peripheral_farm(p)}) {
      for (double theta : {1500.0, 2400.0, 3000.0}) {
        const auto law = conditional_loss_law(p, k, theta);
        const auto q = oracle::make_law(law);
        for (double s : {5.0, 15.0, 25.0}) {
          CAPTURE(k);
          CAPTURE(theta);
          CAPTURE(s);
          const double ref = q.lower_moment(s);
          CHECK(std::abs(mean_and_partial_moment(law, s).lower - ref) <= 1e-8 * std::max(1.0, std::abs(ref)));
        }
      }
    }
  }

  TEST_CASE("yield draws reproduce the configured covariance") {
    const auto p = generate_portfolio(corpus::crop_toy());
    Rng rng(12);
    const int n = 200000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(5, 5);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(5);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd c = sample_yields(p, rng);
      sum += c;
      acc += (c.array() - 50.0).matrix() * (c.array() - 50.0).matrix().transpose();
    }
    acc /= n;
    CHECK((sum / n).array().abs().maxCoeff() == doctest::Approx(50.0).epsilon(0.01));
    CHECK((acc - p.covariance).cwiseAbs().maxCoeff() <= 0.3);
  }

  TEST_CASE("level one half curve equals the conditional means") {
    const auto p = generate_portfolio(CropConfig{});
    const auto grid = default_theta_grid();
    const int k = central_farm(p);
    const auto curve = payment_curve(p, k, 0.5, grid);
    for (std::size_t i = 0; i < grid.size(); i += 10)
      CHECK(curve.payment[i] == doctest::Approx(mean(conditional_loss_law(p, k, grid[i]))).epsilon(1e-10));
  }

  TEST_CASE("curves rise with alpha, fall with the index, and favour the central farm") {
    const auto r = run_crop_case(CropConfig{}, {0.3, 0.4, 0.5, 0.6, 0.7}, default_theta_grid());
    for (std::size_t a = 1; a < r.alphas.size(); ++a)
      for (std::size_t i = 0; i < r.theta_grid.size(); ++i) {
        CHECK(r.central_curves[a][i] >= r.central_curves[a - 1][i]);
        CHECK(r.peripheral_curves[a][i] >= r.peripheral_curves[a - 1][i]);
      }
    for (std::size_t a = 0; a < r.alphas.size(); ++a)
      for (std::size_t i = 1; i < r.theta_grid.size(); ++i) {
        CHECK(r.central_curves[a][i] <= r.central_curves[a][i - 1]);
        CHECK(r.peripheral_curves[a][i] <= r.peripheral_curves[a][i - 1]);
      }
    REQUIRE(r.theta_grid.front() == 500.0);
    for (std::size_t a = 0; a < r.alphas.size(); ++a) CHECK(r.central_curves[a][0] > r.peripheral_curves[a][0]);
  }

  TEST_CASE("invalid inputs") {
    const auto p = generate_portfolio(CropConfig{});
    CHECK_THROWS_AS(payment_curve(p, 0, 0.5, std::vector<double>{2000.0, 3100.0}), ValidationError);
    CHECK_THROWS_AS(conditional_yield_params(p, 50, 2000.0), ValidationError);
    CropConfig bad;
    bad.c_min = 45.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    // Near-perfect correlation: the index pins down each farm's yield.
    CropConfig rigid;
    rigid.farms = 2;
    rigid.threshold = 120.0;
    rigid.corr_length_factor = 1e12;
    const auto single = generate_portfolio(rigid);
    CHECK_THROWS_AS(conditional_yield_params(single, 0, 50.0), NumericalError);
  }
}
