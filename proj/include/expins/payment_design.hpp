#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "expins/als_regression.hpp"
#include "expins/distributions.hpp"
#include "expins/expectile.hpp"
#include "expins/parallel.hpp"
#include "expins/rng.hpp"
#include "expins/trigger.hpp"

namespace expins {

/// alpha^2 ((s - y)^+)^2 + (1 - alpha)^2 ((s - y)^-)^2 for loss s and payout y.
double basis_risk(double s, double y, double alpha);

struct FixedPayment {
  double amount = 0.0;
};

struct LinearPayment {
  double intercept = 0.0;
  double slope = 0.0;
};

/// base + levels[q] for theta in bins[q]; base alone outside every bin.
struct StepPayment {
  double base = 0.0;
  std::vector<Interval> bins;
  std::vector<double> levels;
};

/// Piecewise linear in theta through the nodes, flat beyond the end nodes.
struct TabulatedCurve {
  std::vector<double> theta;
  std::vector<double> payment;

  double at(double x) const;
};

using PaymentRule = std::variant<FixedPayment, LinearPayment, StepPayment, TabulatedCurve>;

std::string rule_name(const PaymentRule& rule);

/// A payout rule plus its trigger area. Payouts are zero off the trigger and
/// clamped at zero on it. Rules that depend on the index value read its first
/// component.
struct PaymentScheme {
  PaymentRule rule;
  TriggerArea trigger;

  double payout(std::span<const double> theta) const;
  double payout(double theta) const { return payout(std::span<const double>(&theta, 1)); }
};

enum class DesignKind { kPureParametric, kLinear, kStep };

/// Turns fitted coefficients into a scheme for one policyholder with
/// covariate row `x` (empty means x = 1). For kStep, `bins` must be the bins
/// used to build the design.
PaymentScheme scheme_from_fit(const FitResult& fit, DesignKind kind, const TriggerArea& trigger,
                              std::span<const double> x = {}, const std::vector<Interval>& bins = {});

/// Expectile of the loss given the trigger at gamma(alpha).
double optimal_pure_payment(const Distribution& loss_given_trigger, double alpha);

/// Conditional expectile of the loss per theta-grid node, clamped at zero,
/// tabulated as a curve. `law_at(theta)` returns the conditional loss law.
PaymentScheme optimal_index_payment(std::span<const double> theta_grid,
                                    const std::function<Distribution(double)>& law_at, double alpha,
                                    const TriggerArea& trigger, const ExecConfig& exec = {});

/// One sampled incident: observed index (one entry per component), time and
/// the true loss of the insured.
struct Incident {
  std::vector<double> index;
  double time = 0.0;
  double loss = 0.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Joint sampler of (index, time, loss).
class IncidentModel {
 public:
  virtual ~IncidentModel() = default;
  virtual Incident draw(Rng& rng) const = 0;
  /// Mean and variance of the loss given the information a payment may use
  /// (the model decides whether that is the index value or only the trigger
  /// event). Models without closed forms do not override this.
  virtual Moments conditional_moments(const Incident& incident) const;
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Monte-Carlo mean of basis_risk(S, payout) over n incidents. Draws are
/// split into fixed blocks with their own streams, so the result does not
/// depend on the worker count.
McEstimate expected_basis_risk_mc(const PaymentScheme& scheme, const IncidentModel& model, double alpha,
                                  std::size_t n, std::uint64_t seed, const ExecConfig& exec = {});

struct Decomposition {
  McEstimate lhs;  // basis risk of the conditional-mean payment at alpha = 0.5
  McEstimate rhs;  // (P(trig) E[Var(S | obs) | trig] + P(no trig) E[S^2 | no trig]) / 4
  double trigger_probability = 0.0;
  double combined_std_error() const;
};

Decomposition min_basis_risk_decomposition(const IncidentModel& model, const TriggerArea& trigger, std::size_t n,
                                           std::uint64_t seed, const ExecConfig& exec = {});

struct GridSearch {
  double argmin = 0.0;
  double step = 0.0;
  double objective = 0.0;
};

/// Minimizes the sample mean of basis_risk(s_i, paid_i * y) over `levels`
/// payment values spaced uniformly on [0, hi].
GridSearch grid_search_payment(std::span<const double> losses, std::span<const unsigned char> paid, double alpha,
                               double hi, std::size_t levels = 200, const ExecConfig& exec = {});

struct PaymentWithoutIncident {
  double payment = 0.0;  // expectile of the loss law under P(. | Z = 1)
  GridSearch check;      // grid-search minimizer of E[B(S, Z y)]
};

/// Loss can occur without an incident being registered: Z ~ Bernoulli(1 - p_miss)
/// independent of the loss; the payout is Z * y. Returns the optimal y and a
/// Monte-Carlo grid-search confirmation on n draws.
PaymentWithoutIncident optimal_payment_without_incident(const Distribution& loss, double alpha, double p_miss,
                                                        std::size_t n, std::uint64_t seed,
                                                        const ExecConfig& exec = {});

}  // namespace expins
