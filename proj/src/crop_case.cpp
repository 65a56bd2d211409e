#include "expins/crop_case.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "expins/errors.hpp"

namespace expins {

void CropConfig::validate() const {
  if (farms < 2) throw ValidationError("crop portfolio needs K >= 2 farms");
  if (!(radius > 0.0)) throw ValidationError("disk radius r must be > 0");
  if (!(sigma > 0.0)) throw ValidationError("yield sigma must be > 0");
  if (!std::isfinite(mu)) throw ValidationError("yield mu must be finite");
  if (!(c_min < c_crit)) throw ValidationError("c_min must be < c_crit");
  if (!(corr_length_factor > 0.0)) throw ValidationError("correlation length factor must be > 0");
  if (!std::isfinite(threshold)) throw ValidationError("index threshold must be finite");
}

CropPortfolio build_portfolio(const CropConfig& cfg, std::vector<Location> locations) {
  cfg.validate();
  if (locations.size() != static_cast<std::size_t>(cfg.farms))
    throw ValidationError("location count must equal K");
  const auto k = static_cast<Eigen::Index>(cfg.farms);
  CropPortfolio p;
  p.config = cfg;
  p.locations = std::move(locations);
  p.covariance.resize(k, k);
  const double ell = cfg.corr_length_factor * cfg.radius;
  const double var = cfg.sigma * cfg.sigma;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto& a = p.locations[static_cast<std::size_t>(i)];
      const auto& b = p.locations[static_cast<std::size_t>(j)];
      const double d = std::hypot(a.x - b.x, a.y - b.y);
      p.covariance(i, j) = i == j ? var : var * std::exp(-d / ell);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(p.covariance);
  if (llt.info() != Eigen::Success) {
    p.cholesky_jitter = 1e-10 * var;
    Eigen::MatrixXd jittered = p.covariance;
    jittered.diagonal().array() += p.cholesky_jitter;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) throw NumericalError("yield covariance is not positive semi-definite");
  }
  p.cholesky = llt.matrixL();
  p.index_cov = p.covariance.rowwise().sum();
  p.index_variance = p.index_cov.sum();
  return p;
}

CropPortfolio generate_portfolio(const CropConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<Location> loc(static_cast<std::size_t>(cfg.farms));
  for (auto& l : loc) {
    const double rad = cfg.radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    l = {rad * std::cos(phi), rad * std::sin(phi)};
  }
  return build_portfolio(cfg, std::move(loc));
}

ConditionalYield conditional_yield_params(const CropPortfolio& p, int k, double theta) {
  if (k < 0 || k >= p.config.farms) throw ValidationError("farm index out of range");
  const double c = p.index_cov(k);
  const double mu = p.config.mu + c / p.index_variance * (theta - p.config.farms * p.config.mu);
  const double var = p.config.sigma * p.config.sigma - c * c / p.index_variance;
  if (!(var > 1e-12 * p.config.sigma * p.config.sigma)) {
    std::ostringstream os;
    os << "conditional yield variance of farm " << k << " is numerically zero (" << var << ")";
    throw NumericalError(os.str());
  }
  return {mu, std::sqrt(var)};
}

Distribution conditional_loss_law(const CropPortfolio& p, int k, double theta) {
  const auto c = conditional_yield_params(p, k, theta);
  return Distribution::crop_loss(c.mu, c.sigma, p.config.c_crit, p.config.c_min);
}

TabulatedCurve payment_curve(const CropPortfolio& p, int k, double alpha, std::span<const double> theta_grid,
                             const ExecConfig& exec) {
  for (double t : theta_grid)
    if (t > p.config.threshold) throw ValidationError("payment grid must lie at or below the index threshold");
  const auto scheme = optimal_index_payment(
      theta_grid, [&](double t) { return conditional_loss_law(p, k, t); }, alpha,
      TriggerArea::interval(Interval{-std::numeric_limits<double>::infinity(), p.config.threshold, false, true}), exec);
  return std::get<TabulatedCurve>(scheme.rule);
}

int central_farm(const CropPortfolio& p) {
  Eigen::Index i = 0;
  p.index_cov.maxCoeff(&i);
  return static_cast<int>(i);
}

int peripheral_farm(const CropPortfolio& p) {
  Eigen::Index i = 0;
  p.index_cov.minCoeff(&i);
  return static_cast<int>(i);
}

std::vector<double> default_theta_grid() {
  std::vector<double> g(101);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 500.0 + 25.0 * static_cast<double>(i);
  return g;
}

Eigen::VectorXd sample_yields(const CropPortfolio& p, Rng& rng) {
  const auto k = static_cast<Eigen::Index>(p.config.farms);
  Eigen::VectorXd z(k);
  for (Eigen::Index i = 0; i < k; ++i) z(i) = rng.normal();
  return Eigen::VectorXd::Constant(k, p.config.mu) + p.cholesky * z;
}

CropIncidentModel::CropIncidentModel(const CropPortfolio& portfolio, int farm) : portfolio_(portfolio), farm_(farm) {
  if (farm < 0 || farm >= portfolio.config.farms) throw ValidationError("farm index out of range");
}

Incident CropIncidentModel::draw(Rng& rng) const {
  const Eigen::VectorXd c = sample_yields(portfolio_, rng);
  const auto& cfg = portfolio_.config;
  Incident inc;
  inc.index = {c.sum()};
  inc.loss = std::clamp(cfg.c_crit - c(farm_), 0.0, cfg.s_max());
  return inc;
}

Moments CropIncidentModel::conditional_moments(const Incident& incident) const {
  const auto law = conditional_loss_law(portfolio_, farm_, incident.index.at(0));
  return {mean(law), variance(law)};
}

TriggerArea CropIncidentModel::trigger() const {
  return TriggerArea::interval(
      Interval{-std::numeric_limits<double>::infinity(), portfolio_.config.threshold, false, true});
}

CropCaseResult run_crop_case(const CropConfig& cfg, const std::vector<double>& alphas,
                             const std::vector<double>& theta_grid, const ExecConfig& exec) {
  if (alphas.empty()) throw ValidationError("crop case needs at least one alpha");
  if (theta_grid.empty()) throw ValidationError("crop case needs a nonempty theta grid");
  CropCaseResult r;
  r.portfolio = generate_portfolio(cfg);
  r.central = central_farm(r.portfolio);
  r.peripheral = peripheral_farm(r.portfolio);
  r.theta_grid = theta_grid;
  r.alphas = alphas;
  for (double a : alphas) {
    r.central_curves.push_back(payment_curve(r.portfolio, r.central, a, theta_grid, exec).payment);
    r.peripheral_curves.push_back(payment_curve(r.portfolio, r.peripheral, a, theta_grid, exec).payment);
  }
  return r;
}

}  // namespace expins
