#include "expins/als_regression.hpp"

#include <cmath>
#include <functional>

#include "expins/errors.hpp"

namespace expins {

namespace {

struct Block {
  std::string name;
  std::function<double(std::size_t)> feature;
};

DesignMatrix build(std::size_t m, const Eigen::MatrixXd& covariates, std::span<const double> response,
                   const std::vector<Block>& blocks) {
  if (m == 0) throw ValidationError("design needs at least one observation");
  if (response.size() != m) throw ValidationError("response length does not match the observation count");
  const bool shared = covariates.rows() == 1;
  const bool none = covariates.size() == 0;
  if (!none && !shared && static_cast<std::size_t>(covariates.rows()) != m)
    throw ValidationError("covariate rows must equal the observation count or be a single shared row");
  const Eigen::Index l = none ? 1 : covariates.cols();

  DesignMatrix d;
  d.x.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(blocks.size()) * l);
  d.y.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(response[i])) throw ValidationError("response contains a non-finite value");
    d.y(static_cast<Eigen::Index>(i)) = response[i];
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (Eigen::Index j = 0; j < l; ++j) {
      d.columns.push_back(none ? blocks[b].name : blocks[b].name + ":x" + std::to_string(j + 1));
      const Eigen::Index col = static_cast<Eigen::Index>(b) * l + j;
      for (std::size_t i = 0; i < m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double xv = none ? 1.0 : covariates(shared ? 0 : r, j);
        d.x(r, col) = blocks[b].feature(i) * xv;
      }
    }
  }
  if (!d.x.allFinite()) throw ValidationError("design contains a non-finite entry");
  return d;
}

double weight(double residual, double g) { return residual >= 0.0 ? g : 1.0 - g; }

}  // namespace

DesignMatrix design_pure_parametric(std::span<const double> theta, const TriggerArea& trigger,
                                    const Eigen::MatrixXd& covariates, std::span<const double> response) {
  return build(theta.size(), covariates, response,
               {{"intercept", [](std::size_t) { return 1.0; }},
                {"indicator", [&](std::size_t i) { return trigger.contains(theta[i]) ? 1.0 : 0.0; }}});
}

DesignMatrix design_linear(std::span<const double> theta, const Eigen::MatrixXd& covariates,
                           std::span<const double> response) {
  return build(theta.size(), covariates, response,
               {{"intercept", [](std::size_t) { return 1.0; }}, {"theta", [&](std::size_t i) { return theta[i]; }}});
}

DesignMatrix design_step(std::span<const double> theta, const std::vector<Interval>& bins,
                         const Eigen::MatrixXd& covariates, std::span<const double> response) {
  if (bins.empty()) throw ValidationError("step design needs at least one bin");
  for (std::size_t a = 0; a < bins.size(); ++a)
    for (std::size_t b = a + 1; b < bins.size(); ++b)
      if (overlaps(bins[a], bins[b]))
        throw ValidationError("step bins " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " overlap");
  std::vector<Block> blocks{{"intercept", [](std::size_t) { return 1.0; }}};
  for (std::size_t q = 0; q < bins.size(); ++q) {
    blocks.push_back({"bin" + std::to_string(q + 1),
                      [&, q](std::size_t i) { return bins[q].contains(theta[i]) ? 1.0 : 0.0; }});
  }
  return build(theta.size(), covariates, response, blocks);
}

DesignMatrix design_intercept(std::span<const double> response) {
  return build(response.size(), Eigen::MatrixXd(), response, {{"intercept", [](std::size_t) { return 1.0; }}});
}

double als_objective(const DesignMatrix& design, const Eigen::VectorXd& beta, ExpectileLevel gamma) {
  const Eigen::VectorXd r = design.y - design.x * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += weight(r(i), gamma.value()) * r(i) * r(i);
  return s;
}

FitResult fit(const DesignMatrix& design, ExpectileLevel gamma, const FitOptions& options) {
  const Eigen::Index m = design.x.rows();
  const Eigen::Index p = design.x.cols();
  if (p < 1) throw ValidationError("design needs at least one column");
  if (m < 1 || design.y.size() != m) throw ValidationError("design rows must align with the response");
  if (options.max_iter < 1) throw ValidationError("max_iter must be >= 1");
  if (!(options.tol > 0.0)) throw ValidationError("tol must be > 0");
  const double g = gamma.value();

  FitResult out;
  out.columns = design.columns;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_qr(design.x);
  out.rank_deficient = rank_qr.rank() < p;

  auto solve = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    const Eigen::VectorXd sw = w.array().sqrt();
    const Eigen::MatrixXd xw = sw.asDiagonal() * design.x;
    const Eigen::VectorXd yw = sw.cwiseProduct(design.y);
    if (!out.rank_deficient) return xw.householderQr().solve(yw);
    Eigen::MatrixXd normal = xw.transpose() * xw;
    normal.diagonal().array() += 1e-10;
    return normal.ldlt().solve(xw.transpose() * yw);
  };

  // Start from the symmetric (least-squares) solution.
  Eigen::VectorXd beta = solve(Eigen::VectorXd::Constant(m, 0.5));
  double obj = als_objective(design, beta, gamma);
  out.objective_trace.push_back(obj);

  Eigen::VectorXd w(m);
  for (int it = 1; it <= options.max_iter; ++it) {
    const Eigen::VectorXd r = design.y - design.x * beta;
    for (Eigen::Index i = 0; i < m; ++i) w(i) = weight(r(i), g);
    const Eigen::VectorXd target = solve(w);
    Eigen::VectorXd step = target - beta;
    Eigen::VectorXd next = target;
    double next_obj = als_objective(design, next, gamma);
    // The reweighted solution minimizes a quadratic majorant only while the
    // residual signs are unchanged; halve the step until the true objective
    // does not increase.
    for (int h = 0; h < 60 && next_obj > obj; ++h) {
      step *= 0.5;
      next = beta + step;
      next_obj = als_objective(design, next, gamma);
    }
    out.iterations = it;
    if (next_obj > obj) {
      out.converged = true;  // no descent direction left at machine precision
      break;
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    obj = next_obj;
    out.objective_trace.push_back(obj);
    if (change < options.tol) {
      out.converged = true;
      break;
    }
  }
  out.coefficients = beta;
  out.objective = obj;
  return out;
}

double predict(const FitResult& fit, std::span<const double> row) {
  if (static_cast<Eigen::Index>(row.size()) != fit.coefficients.size())
    throw ValidationError("row width does not match the coefficient count");
  double s = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * fit.coefficients(static_cast<Eigen::Index>(i));
  return s;
}

Eigen::VectorXd predict(const FitResult& fit, const Eigen::MatrixXd& x) {
  if (x.cols() != fit.coefficients.size()) throw ValidationError("design width does not match the coefficient count");
  return x * fit.coefficients;
}

}  // namespace expins
