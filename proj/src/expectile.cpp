#include "expins/expectile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expins/errors.hpp"

namespace expins {

namespace {

constexpr double kTolerance = 1e-10;
constexpr int kMaxExpansions = 60;

// Pieces of the first-order condition at x:
//   lower = E[(x - X)^+] = xF - G,  upper = E[(X - x)^+] = (E - x) + lower.
struct Foc {
  double lower;
  double upper;
  double cdf;
};

Foc foc(const Distribution& d, double x) {
  const auto pm = mean_and_partial_moment(d, x);
  const double f = cdf(d, x);
  const double lower = std::max(0.0, x * f - pm.lower);
  const double upper = std::max(0.0, (pm.mean - x) + lower);
  return {lower, upper, f};
}

// Strictly decreasing in x, zero at the expectile.
double psi(const Foc& v, double g) { return g * v.upper - (1.0 - g) * v.lower; }

}  // namespace

ExpectileLevel::ExpectileLevel(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    std::ostringstream os;
    os << "expectile level gamma must lie in (0, 1) (got " << gamma << ")";
    throw ValidationError(os.str());
  }
}

ExpectileLevel BasisRiskWeights::gamma() const { return gamma_from_alpha(alpha); }

ExpectileLevel gamma_from_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "basis-risk weight alpha must lie in (0, 1) (got " << alpha << ")";
    throw ValidationError(os.str());
  }
  const double a2 = alpha * alpha;
  const double b2 = (1.0 - alpha) * (1.0 - alpha);
  return ExpectileLevel(a2 / (b2 + a2));
}

double alpha_from_gamma(ExpectileLevel gamma) {
  const double g = gamma.value();
  return 1.0 / (1.0 + std::sqrt((1.0 - g) / g));
}

double expectile(const Distribution& d, ExpectileLevel gamma) {
  const double g = gamma.value();

  if (d.family() == Family::kEmpirical) {
    const auto& law = std::get<EmpiricalLaw>(d.law());
    return d.shift() + d.scale() * empirical_expectile_sorted(*law.sorted, *law.prefix, gamma);
  }

  double lo = quantile(d, 1e-6);
  double hi = quantile(d, 1.0 - 1e-6);
  Foc flo = foc(d, lo);
  Foc fhi = foc(d, hi);
  double width = std::max(hi - lo, 1e-12 * std::max(1.0, std::abs(lo)));
  int expansions = 0;
  while (psi(flo, g) < 0.0) {
    if (++expansions > kMaxExpansions) throw NumericalError("expectile: no sign change below the bracket");
    lo -= width;
    width *= 2.0;
    flo = foc(d, lo);
  }
  width = std::max(hi - lo, 1e-12 * std::max(1.0, std::abs(hi)));
  expansions = 0;
  while (psi(fhi, g) > 0.0) {
    if (++expansions > kMaxExpansions) throw NumericalError("expectile: no sign change above the bracket");
    hi += width;
    width *= 2.0;
    fhi = foc(d, hi);
  }
  if (psi(flo, g) == 0.0) return lo;
  if (psi(fhi, g) == 0.0) return hi;

  for (int it = 0; it < 2000 && hi - lo > kTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = psi(foc(d, mid), g);
    if (v == 0.0) return mid;
    (v > 0.0 ? lo : hi) = mid;
  }

  // Newton polish; psi'(x) = -(g (1 - F) + (1 - g) F). Kept only if it stays
  // in the bracket and lowers |psi|.
  double x = 0.5 * (lo + hi);
  Foc fx = foc(d, x);
  for (int it = 0; it < 3; ++it) {
    const double slope = g * (1.0 - fx.cdf) + (1.0 - g) * fx.cdf;
    if (!(slope > 0.0)) break;
    const double next = x + psi(fx, g) / slope;
    if (!(next >= lo && next <= hi)) break;
    const Foc fn = foc(d, next);
    if (!(std::abs(psi(fn, g)) < std::abs(psi(fx, g)))) break;
    x = next;
    fx = fn;
  }
  return x;
}

double implied_level(const Distribution& d, double x) {
  const auto pm = mean_and_partial_moment(d, x);
  const double f = cdf(d, x);
  const double a = pm.lower - x * f;
  return a / (2.0 * a + x - pm.mean);
}

double empirical_expectile_sorted(std::span<const double> sorted, std::span<const double> prefix,
                                  ExpectileLevel gamma) {
  const std::size_t n = sorted.size();
  if (n == 0) throw ValidationError("empirical expectile needs a nonempty sample");
  if (prefix.size() != n + 1) throw ValidationError("prefix sums must have length n + 1");
  const double g = gamma.value();
  const double total = prefix[n];
  // On [s_(j), s_(j+1)] with j points at or below x the FOC is linear in x:
  //   g (T - A_j - (n - j) x) = (1 - g)(j x - A_j).
  auto psi_at = [&](std::size_t j, double x) {
    const double a = prefix[j];
    return g * ((total - a) - static_cast<double>(n - j) * x) - (1.0 - g) * (static_cast<double>(j) * x - a);
  };
  // psi evaluated at the order statistics is nonincreasing; find the first
  // index whose value is <= 0, the root sits just below it.
  std::size_t lo = 0;
  std::size_t hi = n;  // first k with psi(s_k) <= 0, using j = k + 1 points
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (psi_at(mid + 1, sorted[mid]) <= 0.0)
      hi = mid;
    else
      lo = mid + 1;
  }
  if (lo == n) return sorted[n - 1];
  const std::size_t j = lo;  // points strictly below the segment's right end
  if (j == 0) return sorted[0];
  const double a = prefix[j];
  const double num = g * (total - a) + (1.0 - g) * a;
  const double den = (1.0 - g) * static_cast<double>(j) + g * static_cast<double>(n - j);
  return std::clamp(num / den, sorted[j - 1], sorted[j]);
}

double empirical_expectile(std::span<const double> samples, ExpectileLevel gamma) {
  if (samples.empty()) throw ValidationError("empirical expectile needs a nonempty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> prefix(sorted.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i];
  return empirical_expectile_sorted(sorted, prefix, gamma);
}

double asymmetric_loss(std::span<const double> samples, double y, ExpectileLevel gamma) {
  if (samples.empty()) throw ValidationError("asymmetric loss needs a nonempty sample");
  const double g = gamma.value();
  double s = 0.0;
  for (double v : samples) {
    const double r = v - y;
    s += (r > 0.0 ? g : 1.0 - g) * r * r;
  }
  return s / static_cast<double>(samples.size());
}

double stop_loss_transform(const Distribution& d, double s) {
  const auto pm = mean_and_partial_moment(d, s);
  return std::max(0.0, pm.mean - s + (s * cdf(d, s) - pm.lower));
}

}  // namespace expins
