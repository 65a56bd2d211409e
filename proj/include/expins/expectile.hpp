#pragma once

#include <span>
#include <vector>

#include "expins/distributions.hpp"

namespace expins {

/// Expectile level gamma in the open interval (0, 1). Construction from a
/// double validates the bound, so plain literals can be passed where a level
/// is expected.
class ExpectileLevel {
 public:
  ExpectileLevel(double gamma);  // NOLINT(google-explicit-constructor)
  double value() const { return gamma_; }
  operator double() const { return gamma_; }  // NOLINT(google-explicit-constructor)

 private:
  double gamma_;
};

/// Relative weight alpha of negative basis risk (under-compensation).
struct BasisRiskWeights {
  double alpha;
  ExpectileLevel gamma() const;
};

/// gamma = alpha^2 / ((1 - alpha)^2 + alpha^2).
ExpectileLevel gamma_from_alpha(double alpha);
/// Inverse map: alpha = 1 / (1 + sqrt((1 - gamma) / gamma)).
double alpha_from_gamma(ExpectileLevel gamma);

/// Unique root x of gamma * E[(X - x)^+] = (1 - gamma) * E[(x - X)^+].
/// Bisection with a Newton polish for continuous laws; absolute tolerance
/// 1e-10. Throws NumericalError if no sign change can be bracketed.
double expectile(const Distribution& d, ExpectileLevel gamma);

/// The level whose expectile is x: (G - xF) / (2(G - xF) + x - E).
/// Evaluating it at expectile(d, g) returns g.
double implied_level(const Distribution& d, double x);

/// Exact expectile of the empirical law of `samples` (sort + prefix sums).
double empirical_expectile(std::span<const double> samples, ExpectileLevel gamma);

/// Same, for data that is already sorted ascending with prefix sums
/// prefix[i] = sorted[0] + ... + sorted[i-1].
double empirical_expectile_sorted(std::span<const double> sorted, std::span<const double> prefix,
                                  ExpectileLevel gamma);

/// Mean of gamma * ((s - y)^+)^2 + (1 - gamma) * ((s - y)^-)^2 over samples.
double asymmetric_loss(std::span<const double> samples, double y, ExpectileLevel gamma);

/// E[(X - s)^+].
double stop_loss_transform(const Distribution& d, double s);

}  // namespace expins
