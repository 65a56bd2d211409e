#include "expins/payment_design.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expins/errors.hpp"

namespace expins {

double basis_risk(double s, double y, double alpha) {
  if (!(s >= 0.0) || !(y >= 0.0)) throw ValidationError("basis risk needs nonnegative loss and payout");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("basis-risk weight alpha must lie in (0, 1)");
  const double d = s - y;
  const double w = d > 0.0 ? alpha : 1.0 - alpha;
  return w * w * d * d;
}

double TabulatedCurve::at(double x) const {
  if (theta.empty()) throw ValidationError("tabulated curve is empty");
  if (x <= theta.front()) return payment.front();
  if (x >= theta.back()) return payment.back();
  const auto it = std::upper_bound(theta.begin(), theta.end(), x);
  const auto i = static_cast<std::size_t>(it - theta.begin());
  const double t = (x - theta[i - 1]) / (theta[i] - theta[i - 1]);
  return payment[i - 1] + t * (payment[i] - payment[i - 1]);
}

std::string rule_name(const PaymentRule& rule) {
  static const char* names[] = {"fixed", "linear", "step", "tabulated"};
  return names[rule.index()];
}

double PaymentScheme::payout(std::span<const double> theta) const {
  if (!trigger.contains(theta)) return 0.0;
  const double x = theta.empty() ? 0.0 : theta[0];
  const double v = std::visit(
      [&](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, FixedPayment>) {
          return r.amount;
        } else if constexpr (std::is_same_v<R, LinearPayment>) {
          return r.intercept + r.slope * x;
        } else if constexpr (std::is_same_v<R, StepPayment>) {
          for (std::size_t q = 0; q < r.bins.size(); ++q)
            if (r.bins[q].contains(x)) return r.base + r.levels[q];
          return r.base;
        } else {
          return r.at(x);
        }
      },
      rule);
  return std::max(0.0, v);
}

PaymentScheme scheme_from_fit(const FitResult& fit, DesignKind kind, const TriggerArea& trigger,
                              std::span<const double> x, const std::vector<Interval>& bins) {
  const std::size_t l = x.empty() ? 1 : x.size();
  const auto p = static_cast<std::size_t>(fit.coefficients.size());
  if (p == 0 || p % l != 0) throw ValidationError("coefficient count does not match the covariate row");
  const std::size_t blocks = p / l;
  auto beta = [&](std::size_t b) {
    double s = 0.0;
    for (std::size_t j = 0; j < l; ++j)
      s += fit.coefficients(static_cast<Eigen::Index>(b * l + j)) * (x.empty() ? 1.0 : x[j]);
    return s;
  };
  switch (kind) {
    case DesignKind::kPureParametric:
      if (blocks != 2) throw ValidationError("pure parametric fit needs two coefficient blocks");
      return {FixedPayment{beta(0) + beta(1)}, trigger};
    case DesignKind::kLinear:
      if (blocks != 2) throw ValidationError("linear fit needs two coefficient blocks");
      return {LinearPayment{beta(0), beta(1)}, trigger};
    case DesignKind::kStep: {
      if (blocks != bins.size() + 1) throw ValidationError("step fit needs one block per bin plus an intercept");
      StepPayment s{beta(0), bins, {}};
      for (std::size_t q = 0; q < bins.size(); ++q) s.levels.push_back(beta(q + 1));
      return {s, trigger};
    }
  }
  throw ValidationError("unknown design kind");
}

double optimal_pure_payment(const Distribution& loss_given_trigger, double alpha) {
  return expectile(loss_given_trigger, gamma_from_alpha(alpha));
}

PaymentScheme optimal_index_payment(std::span<const double> theta_grid,
                                    const std::function<Distribution(double)>& law_at, double alpha,
                                    const TriggerArea& trigger, const ExecConfig& exec) {
  if (theta_grid.empty()) throw ValidationError("payment grid is empty");
  for (std::size_t i = 1; i < theta_grid.size(); ++i)
    if (!(theta_grid[i] > theta_grid[i - 1])) throw ValidationError("payment grid must be strictly increasing");
  const ExpectileLevel gamma = gamma_from_alpha(alpha);
  auto values = map_indexed(theta_grid.size(), exec,
                            [&](std::size_t i) { return std::max(0.0, expectile(law_at(theta_grid[i]), gamma)); });
  TabulatedCurve curve{std::vector<double>(theta_grid.begin(), theta_grid.end()), std::move(values)};
  return {std::move(curve), trigger};
}

Moments IncidentModel::conditional_moments(const Incident&) const {
  throw ValidationError("this incident model does not provide conditional loss moments");
}

McEstimate expected_basis_risk_mc(const PaymentScheme& scheme, const IncidentModel& model, double alpha,
                                  std::size_t n, std::uint64_t seed, const ExecConfig& exec) {
  if (n < 100) throw ValidationError("Monte-Carlo basis risk needs n >= 100");
  const auto parts = map_indexed(block_count(n), exec, [&](std::size_t b) {
    Rng rng = Rng::stream(seed, b);
    RunningStats s;
    const std::size_t end = std::min(n, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      const Incident inc = model.draw(rng);
      s.add(basis_risk(inc.loss, scheme.payout(inc.index), alpha));
    }
    return s;
  });
  RunningStats total;
  for (const auto& p : parts) total.merge(p);
  return {total.mean, total.std_error(), total.n};
}

double Decomposition::combined_std_error() const {
  return std::sqrt(lhs.std_error * lhs.std_error + rhs.std_error * rhs.std_error);
}

Decomposition min_basis_risk_decomposition(const IncidentModel& model, const TriggerArea& trigger, std::size_t n,
                                           std::uint64_t seed, const ExecConfig& exec) {
  if (n < 100) throw ValidationError("decomposition needs n >= 100");
  struct Part {
    RunningStats lhs, rhs;
    std::size_t triggered = 0;
  };
  const auto parts = map_indexed(block_count(n), exec, [&](std::size_t b) {
    Rng rng = Rng::stream(seed, b);
    Part p;
    const std::size_t end = std::min(n, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      const Incident inc = model.draw(rng);
      if (trigger.contains(inc.index)) {
        const Moments m = model.conditional_moments(inc);
        p.lhs.add(basis_risk(inc.loss, std::max(0.0, m.mean), 0.5));
        p.rhs.add(0.25 * m.variance);
        ++p.triggered;
      } else {
        p.lhs.add(basis_risk(inc.loss, 0.0, 0.5));
        p.rhs.add(0.25 * inc.loss * inc.loss);
      }
    }
    return p;
  });
  Part total;
  for (const auto& p : parts) {
    total.lhs.merge(p.lhs);
    total.rhs.merge(p.rhs);
    total.triggered += p.triggered;
  }
  if (total.triggered == 0) throw ValidationError("trigger probability is zero in the sample; decomposition undefined");
  Decomposition out;
  out.lhs = {total.lhs.mean, total.lhs.std_error(), total.lhs.n};
  out.rhs = {total.rhs.mean, total.rhs.std_error(), total.rhs.n};
  out.trigger_probability = static_cast<double>(total.triggered) / static_cast<double>(n);
  return out;
}

GridSearch grid_search_payment(std::span<const double> losses, std::span<const unsigned char> paid, double alpha,
                               double hi, std::size_t levels, const ExecConfig& exec) {
  if (losses.empty() || losses.size() != paid.size()) throw ValidationError("grid search needs aligned samples");
  if (levels < 2 || !(hi > 0.0)) throw ValidationError("grid search needs >= 2 levels on a positive range");
  const double step = hi / static_cast<double>(levels - 1);
  const auto objective = map_indexed(levels, exec, [&](std::size_t j) {
    const double y = step * static_cast<double>(j);
    double s = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) s += basis_risk(losses[i], paid[i] ? y : 0.0, alpha);
    return s / static_cast<double>(losses.size());
  });
  const auto best = static_cast<std::size_t>(std::min_element(objective.begin(), objective.end()) - objective.begin());
  return {step * static_cast<double>(best), step, objective[best]};
}

PaymentWithoutIncident optimal_payment_without_incident(const Distribution& loss, double alpha, double p_miss,
                                                        std::size_t n, std::uint64_t seed, const ExecConfig& exec) {
  if (!(p_miss >= 0.0 && p_miss < 1.0)) throw ValidationError("p_miss must lie in [0, 1)");
  if (n < 100) throw ValidationError("grid-search check needs n >= 100");
  const auto s = support(loss);
  if (s.lo < 0.0) throw ValidationError("loss law must be nonnegative");

  struct Block {
    std::vector<double> s;
    std::vector<unsigned char> z;
  };
  const auto blocks = map_indexed(block_count(n), exec, [&](std::size_t b) {
    Rng rng = Rng::stream(seed, b);
    Block out;
    const std::size_t end = std::min(n, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      out.s.push_back(draw(loss, rng));
      out.z.push_back(rng.uniform() >= p_miss ? 1 : 0);
    }
    return out;
  });
  std::vector<double> losses;
  std::vector<unsigned char> paid;
  losses.reserve(n);
  paid.reserve(n);
  for (const auto& b : blocks) {
    losses.insert(losses.end(), b.s.begin(), b.s.end());
    paid.insert(paid.end(), b.z.begin(), b.z.end());
  }
  PaymentWithoutIncident out;
  out.payment = optimal_pure_payment(loss, alpha);
  out.check = grid_search_payment(losses, paid, alpha, quantile(loss, 0.999), 200, exec);
  return out;
}

}  // namespace expins
