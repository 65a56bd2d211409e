#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "expins/distributions.hpp"
#include "expins/parallel.hpp"
#include "expins/payment_design.hpp"
#include "expins/rng.hpp"

namespace expins {

/// Area-yield portfolio: K farms uniform on a disk of radius r, normal yields
/// with exponential spatial correlation, index = summed yield, payment
/// triggered when the index is at or below `threshold`.
struct CropConfig {
  int farms = 50;
  double radius = 5.0;
  double mu = 50.0;
  double sigma = 5.0;
  double c_crit = 40.0;
  double c_min = 10.0;
  double threshold = 3000.0;
  double corr_length_factor = 0.868;  // Corr = exp(-d / (factor * r))
  std::uint64_t seed = 1;

  void validate() const;
  double s_max() const { return c_crit - c_min; }
};

struct Location {
  double x;
  double y;
};

struct CropPortfolio {
  CropConfig config;
  std::vector<Location> locations;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd cholesky;    // lower factor of the covariance
  Eigen::VectorXd index_cov;   // 1' Sigma e_k per farm
  double index_variance = 0.0; // 1' Sigma 1
  double cholesky_jitter = 0.0;
};

/// Locations drawn with the polar method (radius r sqrt(U)) from the config seed.
CropPortfolio generate_portfolio(const CropConfig& cfg);

/// Portfolio at given locations; used by generate_portfolio and for
/// hand-built layouts.
CropPortfolio build_portfolio(const CropConfig& cfg, std::vector<Location> locations);

struct ConditionalYield {
  double mu;
  double sigma;
};

/// Law of farm k's yield given the index value theta (k is zero-based).
/// Throws NumericalError when the conditional variance is numerically zero.
ConditionalYield conditional_yield_params(const CropPortfolio& p, int k, double theta);

Distribution conditional_loss_law(const CropPortfolio& p, int k, double theta);

/// Optimal payment per theta node: expectile of the conditional loss at gamma(alpha).
TabulatedCurve payment_curve(const CropPortfolio& p, int k, double alpha, std::span<const double> theta_grid,
                             const ExecConfig& exec = {});

/// Farms with the largest and smallest covariance with the index.
int central_farm(const CropPortfolio& p);
int peripheral_farm(const CropPortfolio& p);

/// Default grid: 101 points on [500, 3000].
std::vector<double> default_theta_grid();

Eigen::VectorXd sample_yields(const CropPortfolio& p, Rng& rng);

/// Incidents for one farm: index = summed yield, loss = clamp(c_crit - C_k, 0, s_max).
/// Conditional moments are given the index value.
class CropIncidentModel : public IncidentModel {
 public:
  CropIncidentModel(const CropPortfolio& portfolio, int farm);
  Incident draw(Rng& rng) const override;
  Moments conditional_moments(const Incident& incident) const override;
  TriggerArea trigger() const;

 private:
  const CropPortfolio& portfolio_;
  int farm_;
};

struct CropCaseResult {
  CropPortfolio portfolio;
  int central = 0;
  int peripheral = 0;
  std::vector<double> theta_grid;
  std::vector<double> alphas;
  std::vector<std::vector<double>> central_curves;     // [alpha][node]
  std::vector<std::vector<double>> peripheral_curves;  // [alpha][node]
};

CropCaseResult run_crop_case(const CropConfig& cfg, const std::vector<double>& alphas,
                             const std::vector<double>& theta_grid, const ExecConfig& exec = {});

}  // namespace expins
