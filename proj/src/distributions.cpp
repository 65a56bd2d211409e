#include "expins/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "expins/errors.hpp"

namespace expins {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) { throw ValidationError(what); }

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) invalid(std::string(name) + " must be finite");
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (!(v > 0.0)) {
    std::ostringstream os;
    os << name << " must be > 0 (got " << v << ")";
    invalid(os.str());
  }
}

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// ---- lognormal ----

double ln_cdf(const LogNormalLaw& l, double x) {
  if (x <= 0.0) return 0.0;
  return std_normal_cdf((std::log(x) - l.mu) / l.sigma);
}
double ln_sf(const LogNormalLaw& l, double x) {
  if (x <= 0.0) return 1.0;
  return std_normal_cdf(-(std::log(x) - l.mu) / l.sigma);
}
double ln_mean(const LogNormalLaw& l) { return std::exp(l.mu + 0.5 * l.sigma * l.sigma); }
// Psi(x) = Phi((log x - mu - sigma^2) / sigma); G(x) = mean * Psi(x).
double ln_psi(const LogNormalLaw& l, double x) {
  if (x <= 0.0) return 0.0;
  return std_normal_cdf((std::log(x) - l.mu - l.sigma * l.sigma) / l.sigma);
}
double ln_psi_upper(const LogNormalLaw& l, double x) {
  if (x <= 0.0) return 1.0;
  return std_normal_cdf(-(std::log(x) - l.mu - l.sigma * l.sigma) / l.sigma);
}
double ln_quantile(const LogNormalLaw& l, double q) { return std::exp(l.mu + l.sigma * std_normal_quantile(q)); }
double ln_upper_quantile(const LogNormalLaw& l, double tail) {
  return std::exp(l.mu - l.sigma * std_normal_quantile(tail));
}
double ln_density(const LogNormalLaw& l, double x) {
  if (x <= 0.0) return 0.0;
  const double z = (std::log(x) - l.mu) / l.sigma;
  return std_normal_pdf(z) / (x * l.sigma);
}

// ---- gamma ----

double g_cdf(const GammaLaw& g, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(g.shape, x / g.scale);
}
double g_sf(const GammaLaw& g, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(g.shape, x / g.scale);
}
double g_mean(const GammaLaw& g) { return g.shape * g.scale; }
double g_quantile(const GammaLaw& g, double q) { return g.scale * boost::math::gamma_p_inv(g.shape, q); }
double g_upper_quantile(const GammaLaw& g, double tail) {
  return g.scale * boost::math::gamma_q_inv(g.shape, tail);
}
double g_density(const GammaLaw& g, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p_derivative(g.shape, x / g.scale) / g.scale;
}
// Marsaglia-Tsang; shapes below one use the boost X * U^(1/shape).
double g_draw(const GammaLaw& g, Rng& rng) {
  const double a = g.shape < 1.0 ? g.shape + 1.0 : g.shape;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double x = 0.0;
  for (;;) {
    const double z = rng.normal();
    const double t = 1.0 + c * z;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
      x = d * v;
      break;
    }
  }
  if (g.shape < 1.0) return g.scale * std::exp(std::log(x) + std::log(rng.uniform()) / g.shape);
  return g.scale * x;
}

// ---- truncated laws: shared logic over the base-law helpers ----

struct LnOps {
  static double cdf(const LogNormalLaw& l, double x) { return ln_cdf(l, x); }
  static double sf(const LogNormalLaw& l, double x) { return ln_sf(l, x); }
  static double quantile(const LogNormalLaw& l, double q) { return ln_quantile(l, q); }
  static double upper_quantile(const LogNormalLaw& l, double t) { return ln_upper_quantile(l, t); }
  static double density(const LogNormalLaw& l, double x) { return ln_density(l, x); }
  // Integral of t dF over (threshold, x].
  static double partial(const LogNormalLaw& l, double threshold, double x) {
    return ln_mean(l) * (ln_psi(l, x) - ln_psi(l, threshold));
  }
  static double upper_partial(const LogNormalLaw& l, double threshold) {
    return ln_mean(l) * ln_psi_upper(l, threshold);
  }
  static double upper_second(const LogNormalLaw& l, double threshold) {
    // E[X^2 1{X > t}] = exp(2mu + 2sigma^2) Phi((mu + 2 sigma^2 - log t) / sigma)
    const double s2 = l.sigma * l.sigma;
    const double tail = threshold <= 0.0 ? 1.0 : std_normal_cdf((l.mu + 2.0 * s2 - std::log(threshold)) / l.sigma);
    return std::exp(2.0 * l.mu + 2.0 * s2) * tail;
  }
};

struct GammaOps {
  static double cdf(const GammaLaw& g, double x) { return g_cdf(g, x); }
  static double sf(const GammaLaw& g, double x) { return g_sf(g, x); }
  static double quantile(const GammaLaw& g, double q) { return g_quantile(g, q); }
  static double upper_quantile(const GammaLaw& g, double t) { return g_upper_quantile(g, t); }
  static double density(const GammaLaw& g, double x) { return g_density(g, x); }
  // kappa * delta * (F_{kappa+1,delta}(x) - F_{kappa+1,delta}(threshold))
  static double partial(const GammaLaw& g, double threshold, double x) {
    const GammaLaw up{g.shape + 1.0, g.scale};
    return g_mean(g) * (g_cdf(up, x) - g_cdf(up, threshold));
  }
  static double upper_partial(const GammaLaw& g, double threshold) {
    return g_mean(g) * g_sf(GammaLaw{g.shape + 1.0, g.scale}, threshold);
  }
  static double upper_second(const GammaLaw& g, double threshold) {
    return g.shape * (g.shape + 1.0) * g.scale * g.scale * g_sf(GammaLaw{g.shape + 2.0, g.scale}, threshold);
  }
};

template <class Ops, class Base>
double trunc_cdf(const Truncated<Base>& t, double x) {
  if (x <= t.threshold) return 0.0;
  const double f = Ops::cdf(t.base, x);
  const double v = f < 0.5 ? (f - t.p) / (1.0 - t.p) : 1.0 - Ops::sf(t.base, x) / (1.0 - t.p);
  return std::clamp(v, 0.0, 1.0);
}

template <class Ops, class Base>
double trunc_mean(const Truncated<Base>& t) {
  return Ops::upper_partial(t.base, t.threshold) / (1.0 - t.p);
}

template <class Ops, class Base>
double trunc_lower(const Truncated<Base>& t, double x) {
  if (x <= t.threshold) return 0.0;
  return Ops::partial(t.base, t.threshold, x) / (1.0 - t.p);
}

template <class Ops, class Base>
double trunc_quantile(const Truncated<Base>& t, double q) {
  const double level = t.p + q * (1.0 - t.p);
  const double tail = (1.0 - q) * (1.0 - t.p);
  const double x = level < 0.5 ? Ops::quantile(t.base, level) : Ops::upper_quantile(t.base, tail);
  return std::max(x, t.threshold);
}

template <class Ops, class Base>
double trunc_variance(const Truncated<Base>& t) {
  const double m = trunc_mean<Ops>(t);
  return Ops::upper_second(t.base, t.threshold) / (1.0 - t.p) - m * m;
}

// ---- crop loss ----

double crop_cdf(const CropLossLaw& c, double s) {
  if (s < 0.0) return 0.0;
  if (s >= c.s_max()) return 1.0;
  return 1.0 - std_normal_cdf((c.c_crit - s - c.mu) / c.sigma);
}

// Integral of (c_crit - t) phi_{mu,sigma}(t) dt over [lo, c_crit].
double crop_segment(const CropLossLaw& c, double lo) {
  const double a = (lo - c.mu) / c.sigma;
  const double b = (c.c_crit - c.mu) / c.sigma;
  return (c.c_crit - c.mu) * (std_normal_cdf(b) - std_normal_cdf(a)) +
         c.sigma * (std_normal_pdf(b) - std_normal_pdf(a));
}

double crop_mean(const CropLossLaw& c) {
  const double at_max = c.s_max() * std_normal_cdf((c.c_min - c.mu) / c.sigma);
  return at_max + crop_segment(c, c.c_min);
}

double crop_lower(const CropLossLaw& c, double s) {
  if (s <= 0.0) return 0.0;
  if (s >= c.s_max()) return crop_mean(c);
  return crop_segment(c, c.c_crit - s);
}

double crop_second_moment(const CropLossLaw& c) {
  const double a = (c.c_min - c.mu) / c.sigma;
  const double b = (c.c_crit - c.mu) / c.sigma;
  const double d = c.c_crit - c.mu;
  const double mass = std_normal_cdf(b) - std_normal_cdf(a);
  const double first = std_normal_pdf(a) - std_normal_pdf(b);
  const double second = mass + a * std_normal_pdf(a) - b * std_normal_pdf(b);
  const double smax = c.s_max();
  return smax * smax * std_normal_cdf(a) + d * d * mass - 2.0 * d * c.sigma * first + c.sigma * c.sigma * second;
}

double crop_quantile(const CropLossLaw& c, double q) {
  const double at_zero = crop_cdf(c, 0.0);
  if (q <= at_zero) return 0.0;
  const double below_max = 1.0 - std_normal_cdf((c.c_min - c.mu) / c.sigma);
  if (q > below_max) return c.s_max();
  const double s = c.c_crit - c.mu + c.sigma * std_normal_quantile(q);
  return std::clamp(s, 0.0, c.s_max());
}

// ---- empirical ----

double emp_cdf(const EmpiricalLaw& e, double x) {
  const auto& v = *e.sorted;
  const auto it = std::upper_bound(v.begin(), v.end(), x);
  return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}
double emp_lower(const EmpiricalLaw& e, double x) {
  const auto& v = *e.sorted;
  const auto k = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
  return (*e.prefix)[k] / static_cast<double>(v.size());
}
double emp_mean(const EmpiricalLaw& e) { return e.prefix->back() / static_cast<double>(e.sorted->size()); }
double emp_quantile(const EmpiricalLaw& e, double q) {
  const auto& v = *e.sorted;
  const double n = static_cast<double>(v.size());
  // Left-continuous inverse: the ceil(n q)-th order statistic.
  auto k = static_cast<std::size_t>(std::ceil(n * q - 1e-9));
  k = std::clamp<std::size_t>(k, 1, v.size());
  return v[k - 1];
}

// ---- discrete ----

std::size_t disc_upper(const DiscreteLaw& d, double x) {
  return static_cast<std::size_t>(
      std::upper_bound(d.atoms.begin(), d.atoms.end(), x, [](double v, const Atom& a) { return v < a.value; }) -
      d.atoms.begin());
}
double disc_cdf(const DiscreteLaw& d, double x) {
  const auto k = disc_upper(d, x);
  return k == 0 ? 0.0 : std::min(1.0, d.cumulative[k - 1]);
}
double disc_lower(const DiscreteLaw& d, double x) {
  const auto k = disc_upper(d, x);
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += d.atoms[i].value * d.atoms[i].probability;
  return s;
}
double disc_mean(const DiscreteLaw& d) {
  double s = 0.0;
  for (const auto& a : d.atoms) s += a.value * a.probability;
  return s;
}
double disc_quantile(const DiscreteLaw& d, double q) {
  for (std::size_t i = 0; i < d.atoms.size(); ++i) {
    if (d.atoms[i].probability > 0.0 && d.cumulative[i] >= q - 1e-12) return d.atoms[i].value;
  }
  return d.atoms.back().value;
}

// ---- dispatch on the base variable ----

double base_cdf(const Distribution::Law& law, double z) {
  return std::visit(Overloaded{
                        [&](const NormalLaw& l) { return std_normal_cdf((z - l.mu) / l.sigma); },
                        [&](const LogNormalLaw& l) { return ln_cdf(l, z); },
                        [&](const GammaLaw& l) { return g_cdf(l, z); },
                        [&](const TruncatedLogNormalLaw& l) { return trunc_cdf<LnOps>(l, z); },
                        [&](const TruncatedGammaLaw& l) { return trunc_cdf<GammaOps>(l, z); },
                        [&](const CropLossLaw& l) { return crop_cdf(l, z); },
                        [&](const EmpiricalLaw& l) { return emp_cdf(l, z); },
                        [&](const DiscreteLaw& l) { return disc_cdf(l, z); },
                    },
                    law);
}

double base_mean(const Distribution::Law& law) {
  return std::visit(Overloaded{
                        [](const NormalLaw& l) { return l.mu; },
                        [](const LogNormalLaw& l) { return ln_mean(l); },
                        [](const GammaLaw& l) { return g_mean(l); },
                        [](const TruncatedLogNormalLaw& l) { return trunc_mean<LnOps>(l); },
                        [](const TruncatedGammaLaw& l) { return trunc_mean<GammaOps>(l); },
                        [](const CropLossLaw& l) { return crop_mean(l); },
                        [](const EmpiricalLaw& l) { return emp_mean(l); },
                        [](const DiscreteLaw& l) { return disc_mean(l); },
                    },
                    law);
}

double base_lower(const Distribution::Law& law, double z) {
  return std::visit(Overloaded{
                        [&](const NormalLaw& l) {
                          const double u = (z - l.mu) / l.sigma;
                          return l.mu * std_normal_cdf(u) - l.sigma * std_normal_pdf(u);
                        },
                        [&](const LogNormalLaw& l) { return ln_mean(l) * ln_psi(l, z); },
                        [&](const GammaLaw& l) { return g_mean(l) * g_cdf(GammaLaw{l.shape + 1.0, l.scale}, z); },
                        [&](const TruncatedLogNormalLaw& l) { return trunc_lower<LnOps>(l, z); },
                        [&](const TruncatedGammaLaw& l) { return trunc_lower<GammaOps>(l, z); },
                        [&](const CropLossLaw& l) { return crop_lower(l, z); },
                        [&](const EmpiricalLaw& l) { return emp_lower(l, z); },
                        [&](const DiscreteLaw& l) { return disc_lower(l, z); },
                    },
                    law);
}

double base_variance(const Distribution::Law& law) {
  return std::visit(Overloaded{
                        [](const NormalLaw& l) { return l.sigma * l.sigma; },
                        [](const LogNormalLaw& l) {
                          const double s2 = l.sigma * l.sigma;
                          return std::expm1(s2) * std::exp(2.0 * l.mu + s2);
                        },
                        [](const GammaLaw& l) { return l.shape * l.scale * l.scale; },
                        [](const TruncatedLogNormalLaw& l) { return trunc_variance<LnOps>(l); },
                        [](const TruncatedGammaLaw& l) { return trunc_variance<GammaOps>(l); },
                        [](const CropLossLaw& l) {
                          const double m = crop_mean(l);
                          return crop_second_moment(l) - m * m;
                        },
                        [](const EmpiricalLaw& l) {
                          const double m = emp_mean(l);
                          double s = 0.0;
                          for (double v : *l.sorted) s += (v - m) * (v - m);
                          return s / static_cast<double>(l.sorted->size());
                        },
                        [](const DiscreteLaw& l) {
                          const double m = disc_mean(l);
                          double s = 0.0;
                          for (const auto& a : l.atoms) s += a.probability * (a.value - m) * (a.value - m);
                          return s;
                        },
                    },
                    law);
}

double base_quantile(const Distribution::Law& law, double q) {
  return std::visit(Overloaded{
                        [&](const NormalLaw& l) { return l.mu + l.sigma * std_normal_quantile(q); },
                        [&](const LogNormalLaw& l) { return ln_quantile(l, q); },
                        [&](const GammaLaw& l) { return g_quantile(l, q); },
                        [&](const TruncatedLogNormalLaw& l) { return trunc_quantile<LnOps>(l, q); },
                        [&](const TruncatedGammaLaw& l) { return trunc_quantile<GammaOps>(l, q); },
                        [&](const CropLossLaw& l) { return crop_quantile(l, q); },
                        [&](const EmpiricalLaw& l) { return emp_quantile(l, q); },
                        [&](const DiscreteLaw& l) { return disc_quantile(l, q); },
                    },
                    law);
}

double base_density(const Distribution::Law& law, double z) {
  return std::visit(Overloaded{
                        [&](const NormalLaw& l) { return std_normal_pdf((z - l.mu) / l.sigma) / l.sigma; },
                        [&](const LogNormalLaw& l) { return ln_density(l, z); },
                        [&](const GammaLaw& l) { return g_density(l, z); },
                        [&](const TruncatedLogNormalLaw& l) {
                          return z > l.threshold ? ln_density(l.base, z) / (1.0 - l.p) : 0.0;
                        },
                        [&](const TruncatedGammaLaw& l) {
                          return z > l.threshold ? g_density(l.base, z) / (1.0 - l.p) : 0.0;
                        },
                        [&](const CropLossLaw& l) {
                          if (z <= 0.0 || z >= l.s_max()) return 0.0;
                          return std_normal_pdf((l.c_crit - z - l.mu) / l.sigma) / l.sigma;
                        },
                        [](const EmpiricalLaw&) { return 0.0; },
                        [](const DiscreteLaw&) { return 0.0; },
                    },
                    law);
}

double base_atom(const Distribution::Law& law, double z) {
  return std::visit(Overloaded{
                        [&](const CropLossLaw& l) {
                          if (z == 0.0) return crop_cdf(l, 0.0);
                          if (z == l.s_max()) return std_normal_cdf((l.c_min - l.mu) / l.sigma);
                          return 0.0;
                        },
                        [&](const EmpiricalLaw& l) {
                          const auto [lo, hi] = std::equal_range(l.sorted->begin(), l.sorted->end(), z);
                          return static_cast<double>(hi - lo) / static_cast<double>(l.sorted->size());
                        },
                        [&](const DiscreteLaw& l) {
                          for (const auto& a : l.atoms)
                            if (a.value == z) return a.probability;
                          return 0.0;
                        },
                        [](const auto&) { return 0.0; },
                    },
                    law);
}

Support base_support(const Distribution::Law& law) {
  return std::visit(Overloaded{
                        [](const NormalLaw&) { return Support{-kInf, kInf}; },
                        [](const LogNormalLaw&) { return Support{0.0, kInf}; },
                        [](const GammaLaw&) { return Support{0.0, kInf}; },
                        [](const TruncatedLogNormalLaw& l) { return Support{l.threshold, kInf}; },
                        [](const TruncatedGammaLaw& l) { return Support{l.threshold, kInf}; },
                        [](const CropLossLaw& l) { return Support{0.0, l.s_max()}; },
                        [](const EmpiricalLaw& l) { return Support{l.sorted->front(), l.sorted->back()}; },
                        [](const DiscreteLaw& l) {
                          Support s{kInf, -kInf};
                          for (const auto& a : l.atoms) {
                            if (a.probability <= 0.0) continue;
                            s.lo = std::min(s.lo, a.value);
                            s.hi = std::max(s.hi, a.value);
                          }
                          return s;
                        },
                    },
                    law);
}

double base_draw(const Distribution::Law& law, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const NormalLaw& l) { return l.mu + l.sigma * rng.normal(); },
                        [&](const LogNormalLaw& l) { return std::exp(l.mu + l.sigma * rng.normal()); },
                        [&](const GammaLaw& l) { return g_draw(l, rng); },
                        [&](const TruncatedLogNormalLaw& l) { return trunc_quantile<LnOps>(l, rng.uniform()); },
                        [&](const TruncatedGammaLaw& l) { return trunc_quantile<GammaOps>(l, rng.uniform()); },
                        [&](const CropLossLaw& l) {
                          const double c = l.mu + l.sigma * rng.normal();
                          return std::clamp(l.c_crit - c, 0.0, l.s_max());
                        },
                        [&](const EmpiricalLaw& l) { return (*l.sorted)[rng.index(l.sorted->size())]; },
                        [&](const DiscreteLaw& l) { return disc_quantile(l, rng.uniform()); },
                    },
                    law);
}

}  // namespace

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("normal quantile level must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

std::string family_name(Family f) {
  switch (f) {
    case Family::kNormal: return "normal";
    case Family::kLogNormal: return "lognormal";
    case Family::kGamma: return "gamma";
    case Family::kTruncatedLogNormal: return "truncated_lognormal";
    case Family::kTruncatedGamma: return "truncated_gamma";
    case Family::kCropLoss: return "crop_loss";
    case Family::kEmpirical: return "empirical";
    case Family::kDiscrete: return "discrete";
  }
  return "unknown";
}

Distribution Distribution::normal(double mu, double sigma) {
  require_finite(mu, "normal mu");
  require_positive(sigma, "normal sigma");
  return Distribution(NormalLaw{mu, sigma});
}

Distribution Distribution::lognormal(double mu, double sigma) {
  require_finite(mu, "lognormal mu");
  require_positive(sigma, "lognormal sigma");
  return Distribution(LogNormalLaw{mu, sigma});
}

Distribution Distribution::gamma(double shape, double scale) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
  return Distribution(GammaLaw{shape, scale});
}

Distribution Distribution::truncated_lognormal(double mu, double sigma, double threshold) {
  lognormal(mu, sigma);
  require_finite(threshold, "truncation threshold");
  if (threshold < 0.0) invalid("truncation threshold must be >= 0");
  const LogNormalLaw l{mu, sigma};
  const double p = ln_cdf(l, threshold);
  if (!(p < 1.0)) invalid("truncation level p must be < 1");
  return Distribution(TruncatedLogNormalLaw{l, threshold, p});
}

Distribution Distribution::truncated_lognormal_at_level(double mu, double sigma, double p) {
  lognormal(mu, sigma);
  if (!(p >= 0.0 && p < 1.0)) invalid("truncation level p must lie in [0, 1)");
  const LogNormalLaw l{mu, sigma};
  const double threshold = p == 0.0 ? 0.0 : ln_quantile(l, p);
  return Distribution(TruncatedLogNormalLaw{l, threshold, p});
}

Distribution Distribution::truncated_gamma(double shape, double scale, double threshold) {
  gamma(shape, scale);
  require_finite(threshold, "truncation threshold");
  if (threshold < 0.0) invalid("truncation threshold must be >= 0");
  const GammaLaw g{shape, scale};
  const double p = g_cdf(g, threshold);
  if (!(p < 1.0)) invalid("truncation level p must be < 1");
  return Distribution(TruncatedGammaLaw{g, threshold, p});
}

Distribution Distribution::truncated_gamma_at_level(double shape, double scale, double p) {
  gamma(shape, scale);
  if (!(p >= 0.0 && p < 1.0)) invalid("truncation level p must lie in [0, 1)");
  const GammaLaw g{shape, scale};
  const double threshold = p == 0.0 ? 0.0 : g_quantile(g, p);
  return Distribution(TruncatedGammaLaw{g, threshold, p});
}

Distribution Distribution::crop_loss(double mu, double sigma, double c_crit, double c_min) {
  require_finite(mu, "crop mu*");
  require_positive(sigma, "crop sigma*");
  require_finite(c_crit, "c_crit");
  require_finite(c_min, "c_min");
  if (!(c_min < c_crit)) invalid("c_min must be < c_crit");
  return Distribution(CropLossLaw{mu, sigma, c_crit, c_min});
}

Distribution Distribution::empirical(std::vector<double> samples) {
  if (samples.empty()) invalid("empirical law needs at least one sample");
  for (double v : samples) require_finite(v, "empirical sample");
  std::sort(samples.begin(), samples.end());
  std::vector<double> prefix(samples.size() + 1, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) prefix[i + 1] = prefix[i] + samples[i];
  return Distribution(EmpiricalLaw{std::make_shared<const std::vector<double>>(std::move(samples)),
                                   std::make_shared<const std::vector<double>>(std::move(prefix))});
}

Distribution Distribution::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) invalid("discrete law needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    require_finite(a.value, "atom value");
    if (!(a.probability >= 0.0)) invalid("atom probabilities must be >= 0");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "atom probabilities must sum to 1 (got " << total << ")";
    invalid(os.str());
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value)
      merged.back().probability += a.probability;
    else
      merged.push_back(a);
  }
  std::vector<double> cumulative(merged.size());
  double c = 0.0;
  for (std::size_t i = 0; i < merged.size(); ++i) cumulative[i] = (c += merged[i].probability);
  return Distribution(DiscreteLaw{std::move(merged), std::move(cumulative)});
}

Distribution Distribution::affine(double shift, double scale) const {
  require_finite(shift, "affine shift");
  require_positive(scale, "affine scale");
  Distribution out = *this;
  out.shift_ = shift + scale * shift_;
  out.scale_ = scale * scale_;
  return out;
}

Family Distribution::family() const { return static_cast<Family>(law_.index()); }

bool Distribution::is_continuous() const {
  const auto f = family();
  return f != Family::kCropLoss && f != Family::kEmpirical && f != Family::kDiscrete;
}

double cdf(const Distribution& d, double x) {
  if (std::isnan(x)) throw ValidationError("cdf argument is NaN");
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  return base_cdf(d.law(), (x - d.shift()) / d.scale());
}

PartialMoments mean_and_partial_moment(const Distribution& d, double x) {
  const double m = d.shift() + d.scale() * base_mean(d.law());
  if (!std::isfinite(m)) throw NumericalError("law has no finite mean");
  if (x == kInf) return {m, m};
  if (x == -kInf) return {m, 0.0};
  const double z = (x - d.shift()) / d.scale();
  const double lower = d.shift() * base_cdf(d.law(), z) + d.scale() * base_lower(d.law(), z);
  return {m, lower};
}

double mean(const Distribution& d) { return d.shift() + d.scale() * base_mean(d.law()); }

double variance(const Distribution& d) { return d.scale() * d.scale() * base_variance(d.law()); }

double quantile(const Distribution& d, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream os;
    os << "quantile level must lie in (0, 1) (got " << q << ")";
    throw ValidationError(os.str());
  }
  return d.shift() + d.scale() * base_quantile(d.law(), q);
}

double density(const Distribution& d, double x) {
  return base_density(d.law(), (x - d.shift()) / d.scale()) / d.scale();
}

double atom_mass(const Distribution& d, double x) { return base_atom(d.law(), (x - d.shift()) / d.scale()); }

Support support(const Distribution& d) {
  const auto s = base_support(d.law());
  return {d.shift() + d.scale() * s.lo, d.shift() + d.scale() * s.hi};
}

double draw(const Distribution& d, Rng& rng) { return d.shift() + d.scale() * base_draw(d.law(), rng); }

std::vector<double> sample(const Distribution& d, Rng& rng, std::size_t n) {
  if (n == 0) throw ValidationError("sample size must be >= 1");
  std::vector<double> out(n);
  for (auto& v : out) v = draw(d, rng);
  return out;
}

}  // namespace expins
