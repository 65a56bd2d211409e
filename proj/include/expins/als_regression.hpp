#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "expins/expectile.hpp"
#include "expins/trigger.hpp"

namespace expins {

/// Regressors and response for an expectile regression. Columns are grouped
/// in coefficient blocks: block i holds beta_i(x) = sum_j beta_ij x_j, so
/// each block has one column per covariate.
struct DesignMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> columns;
};

/// Covariates are an M x l matrix, a single shared 1 x l row, or empty
/// (meaning x = 1). Covariates are used as given; no centering or scaling.
DesignMatrix design_pure_parametric(std::span<const double> theta, const TriggerArea& trigger,
                                    const Eigen::MatrixXd& covariates, std::span<const double> response);

DesignMatrix design_linear(std::span<const double> theta, const Eigen::MatrixXd& covariates,
                           std::span<const double> response);

/// Intercept block plus one indicator block per bin. Bins must be pairwise
/// disjoint.
DesignMatrix design_step(std::span<const double> theta, const std::vector<Interval>& bins,
                         const Eigen::MatrixXd& covariates, std::span<const double> response);

/// Intercept-only design.
DesignMatrix design_intercept(std::span<const double> response);

struct FitOptions {
  int max_iter = 200;
  double tol = 1e-10;
};

struct FitResult {
  Eigen::VectorXd coefficients;
  std::vector<std::string> columns;
  bool converged = false;
  bool rank_deficient = false;
  int iterations = 0;
  double objective = 0.0;
  std::vector<double> objective_trace;
};

/// Asymmetric least squares by iteratively reweighted least squares:
/// minimizes sum_m w_m (y_m - x_m b)^2 with w_m = gamma for nonnegative
/// residuals and 1 - gamma otherwise. A backtracking step keeps the
/// objective nonincreasing. Rank-deficient designs get a 1e-10 ridge term
/// and are flagged.
FitResult fit(const DesignMatrix& design, ExpectileLevel gamma, const FitOptions& options = {});

double predict(const FitResult& fit, std::span<const double> row);
Eigen::VectorXd predict(const FitResult& fit, const Eigen::MatrixXd& x);

/// Value of the fitted objective for given coefficients.
double als_objective(const DesignMatrix& design, const Eigen::VectorXd& beta, ExpectileLevel gamma);

}  // namespace expins
