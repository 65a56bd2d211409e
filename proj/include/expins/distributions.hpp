#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "expins/rng.hpp"

namespace expins {

struct NormalLaw {
  double mu;
  double sigma;
};

/// log X ~ Normal(mu, sigma).
struct LogNormalLaw {
  double mu;
  double sigma;
};

/// Shape/scale parameterization: mean shape*scale, variance shape*scale^2.
struct GammaLaw {
  double shape;
  double scale;
};

/// Base law conditioned on X > threshold; p is the base cdf at the threshold.
template <class Base>
struct Truncated {
  Base base;
  double threshold;
  double p;
};
using TruncatedLogNormalLaw = Truncated<LogNormalLaw>;
using TruncatedGammaLaw = Truncated<GammaLaw>;

/// Law of clamp(c_crit - C, 0, c_crit - c_min) with C ~ Normal(mu, sigma).
/// Mixed law: atoms at 0 and at s_max = c_crit - c_min.
struct CropLossLaw {
  double mu;
  double sigma;
  double c_crit;
  double c_min;
  double s_max() const { return c_crit - c_min; }
};

struct EmpiricalLaw {
  std::shared_ptr<const std::vector<double>> sorted;
  std::shared_ptr<const std::vector<double>> prefix;  // prefix[i] = sum of sorted[0..i)
};

struct Atom {
  double value;
  double probability;
};

struct DiscreteLaw {
  std::vector<Atom> atoms;         // sorted by value, distinct values
  std::vector<double> cumulative;  // cumulative[i] = P(X <= atoms[i].value)
};

enum class Family {
  kNormal,
  kLogNormal,
  kGamma,
  kTruncatedLogNormal,
  kTruncatedGamma,
  kCropLoss,
  kEmpirical,
  kDiscrete,
};

std::string family_name(Family f);

/// An immutable probability law on the real line. Every instance is the law
/// of shift + scale * X where X follows one of the base families; the affine
/// part (scale > 0) exists so translated and rescaled laws need no new family.
class Distribution {
 public:
  using Law = std::variant<NormalLaw, LogNormalLaw, GammaLaw, TruncatedLogNormalLaw,
                           TruncatedGammaLaw, CropLossLaw, EmpiricalLaw, DiscreteLaw>;

  static Distribution normal(double mu, double sigma);
  static Distribution lognormal(double mu, double sigma);
  static Distribution gamma(double shape, double scale);

  /// Left truncation at `threshold`; p is computed from the base law.
  static Distribution truncated_lognormal(double mu, double sigma, double threshold);
  /// Left truncation at the base law's p-quantile.
  static Distribution truncated_lognormal_at_level(double mu, double sigma, double p);
  static Distribution truncated_gamma(double shape, double scale, double threshold);
  static Distribution truncated_gamma_at_level(double shape, double scale, double p);

  static Distribution crop_loss(double mu, double sigma, double c_crit, double c_min);
  static Distribution empirical(std::vector<double> samples);
  static Distribution discrete(std::vector<Atom> atoms);

  /// Law of shift + scale * X. Requires scale > 0.
  Distribution affine(double shift, double scale) const;

  Family family() const;
  const Law& law() const { return law_; }
  double shift() const { return shift_; }
  double scale() const { return scale_; }

  /// True when the law has no atoms.
  bool is_continuous() const;

 private:
  explicit Distribution(Law law) : law_(std::move(law)) {}

  Law law_;
  double shift_ = 0.0;
  double scale_ = 1.0;
};

struct PartialMoments {
  double mean;   // E = integral of t dF(t)
  double lower;  // G(x) = integral over (-inf, x] of t dF(t)
};

struct Support {
  double lo;
  double hi;
};

double cdf(const Distribution& d, double x);

/// Mean and lower partial moment at x. An atom located exactly at x is
/// included in G(x).
PartialMoments mean_and_partial_moment(const Distribution& d, double x);

double mean(const Distribution& d);
double variance(const Distribution& d);

/// inf{x : F(x) >= q} for q in (0, 1).
double quantile(const Distribution& d, double q);

/// Density of the absolutely continuous part (0 for purely atomic laws).
double density(const Distribution& d, double x);

/// P(X = x).
double atom_mass(const Distribution& d, double x);

/// Essential infimum and supremum (possibly infinite).
Support support(const Distribution& d);

double draw(const Distribution& d, Rng& rng);
std::vector<double> sample(const Distribution& d, Rng& rng, std::size_t n);

/// Standard normal cdf and quantile, shared by the analytic families.
double std_normal_cdf(double z);
double std_normal_quantile(double q);

}  // namespace expins
