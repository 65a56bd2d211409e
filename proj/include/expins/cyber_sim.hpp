#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "expins/distributions.hpp"
#include "expins/parallel.hpp"
#include "expins/payment_design.hpp"
#include "expins/rng.hpp"

namespace expins {

/// Power-law (Duane/AMSAA) outage intensity lambda(s) = alpha s^(-beta).
struct ServiceParams {
  double alpha = 4.25;
  double beta = 0.0;

  void validate() const;
  double cumulative(double t) const;          // Lambda(t) = alpha t^(1-beta) / (1-beta)
  double inverse_cumulative(double u) const;  // Lambda^{-1}(u)
};

/// The three services of the study, in order.
std::vector<ServiceParams> default_services();

/// Event times on (0, T] by time rescaling of a unit-rate Poisson path.
std::vector<double> simulate_arrivals(const ServiceParams& svc, double horizon, Rng& rng);

/// P(no arrival in (t, t + x]) = exp(-(Lambda(t + x) - Lambda(t))).
double interarrival_survival(const ServiceParams& svc, double t, double x);

enum class DurationFamily { kLogNormal, kGamma };
std::string family_name(DurationFamily f);
DurationFamily duration_family_from_string(const std::string& s);

/// Year-dependent outage durations: log-normal with
///   mu(y) = exp(mu_a + mu_b y), sigma(y) = exp(sigma_a + sigma_b y),
/// or the gamma law with the same mean and variance.
struct DurationModel {
  DurationFamily family = DurationFamily::kLogNormal;
  double mu_a = -0.105;
  double mu_b = 0.119;
  double sigma_a = 0.482;
  double sigma_b = 0.018;

  double mu(int year) const { return std::exp(mu_a + mu_b * year); }
  double sigma(int year) const { return std::exp(sigma_a + sigma_b * year); }
  double kappa(int year) const;
  double delta(int year) const;

  Distribution law(int year) const;
  /// The year law conditioned on exceeding its p-quantile.
  Distribution truncated_law(int year, double p) const;
  double draw(int year, Rng& rng) const;
};

/// Year index of an event time: floor(t), with t = T mapped to T - 1.
int policy_year(double t, int years);

enum class ContractMode { kStatic, kDynamic };
std::string mode_name(ContractMode m);
ContractMode mode_from_string(const std::string& s);

/// Static contracts use year-0 parameters in every year.
double threshold(const DurationModel& m, double p, int year, ContractMode mode);

enum class Sector { kFI, kHC, kBR, kEDU, kGOV, kMAN };
std::string sector_name(Sector s);
Sector sector_from_string(const std::string& s);

struct CostModel {
  double fix_base = 2.996;
  double fix_mid = 0.095;   // BR, MAN, EDU
  double fix_high = 0.18;   // FI, HC
  double var_base = 0.784;
  double var_size2 = 0.095;
  double var_size3 = 0.18;
  double sigma_eps = 2.5;
};

struct Policyholder {
  Sector sector = Sector::kGOV;
  int size = 1;
  double p_level = 0.05;

  double c_fix(const CostModel& c) const;
  double c_var(const CostModel& c) const;
};

/// c_fix + c_var * duration + eps, eps ~ N(0, sigma_eps^2), floored at 0.
/// `floored` is set when the floor was applied.
double outage_loss(const Policyholder& ph, const CostModel& cost, double duration, Rng& rng, bool* floored = nullptr);

/// c_fix + c_var * e_gamma(duration | duration > threshold).
double optimal_fixed_payout(const Policyholder& ph, const CostModel& cost, const DurationModel& m, int year,
                            ContractMode mode, ExpectileLevel gamma);

/// 15/15/5/5/5/5 sectors (FI, HC, BR, EDU, GOV, MAN) and 30/15/5 sizes,
/// replicated once per threshold level.
std::vector<Policyholder> baseline_portfolio(std::span<const double> p_levels);

struct StudyConfig {
  std::vector<ServiceParams> services = default_services();
  DurationModel durations;
  CostModel cost;
  ContractMode mode = ContractMode::kDynamic;
  int years = 5;
  int runs = 1000;
  std::uint64_t seed = 1;
  std::vector<double> p_levels{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  std::vector<double> gammas{0.4, 0.5, 0.6, 0.9};
  std::vector<Policyholder> portfolio;  // empty: baseline_portfolio(p_levels)
  int records_runs = 1;                 // runs whose incident-level records are kept

  void validate() const;
};

/// One incident's effect on one policyholder; payouts per configured gamma.
struct SimRecord {
  int run = 0;
  int incident = 0;
  double time = 0.0;
  int year = 0;
  int service = 0;
  double duration = 0.0;
  int policyholder = 0;
  int p_index = 0;
  double loss = 0.0;
  std::vector<double> payouts;  // per gamma
};

/// Per-run totals. deviation/payout are indexed [year][p][gamma] and losses
/// [year][p]; sums run over all incidents of the year and all policyholders
/// of the threshold level.
struct RunCells {
  std::vector<double> deviation;
  std::vector<double> payout;
  std::vector<double> loss;
  std::vector<int> incidents;      // [year][service]
  std::vector<int> first4_counts;  // per service, arrivals in (0, min(4, T)]
  std::size_t floored = 0;
};

struct StudyResult {
  StudyConfig config;
  std::vector<Policyholder> portfolio;
  std::vector<double> thresholds;  // [year][p]
  std::vector<double> payouts;     // [year][p][gamma] per unit: expectile of the duration
  std::vector<RunCells> runs;
  std::vector<SimRecord> records;

  std::size_t cell(int year, int p, int g) const;
};

StudyResult run_study(const StudyConfig& cfg, const ExecConfig& exec = {});

struct Histogram {
  double start = 0.0;
  double width = 0.0;
  std::vector<std::size_t> counts;
};

/// Freedman-Diaconis bins (falls back to one bin for degenerate data).
Histogram freedman_diaconis(std::span<const double> values);

struct GroupSummary {
  std::string group;
  std::string key;
  std::size_t runs = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double lower_tail_mean = 0.0;  // mean of the most negative 1% (at least one value)
  Histogram histogram;
};

GroupSummary summarize(const std::string& group, const std::string& key, std::span<const double> per_run);

enum class GroupBy { kThreshold, kYear, kGamma };

/// Per-run portfolio deviation sums for each group key.
///   kThreshold: year 1, gamma index g, one key per threshold level.
///   kYear:      all levels, gamma index g, one key per year.
///   kGamma:     year 1, all levels, one key per gamma (g ignored).
std::map<std::string, std::vector<double>> group_deviations(const StudyResult& r, GroupBy by, int g);

/// Same grouping computed from incident records (only runs with records).
std::map<std::string, std::vector<double>> group_deviations_from_records(const StudyResult& r, GroupBy by, int g);

/// Per-run total payout at year 1 per gamma.
std::map<std::string, std::vector<double>> payout_totals_by_gamma(const StudyResult& r);

std::string format_key(double v);

/// One outage (year `year`) hitting one policyholder; index is the duration,
/// payment triggered above the p-quantile. Conditional moments are given the
/// trigger event only (pure parametric information).
class SingleOutageModel : public IncidentModel {
 public:
  SingleOutageModel(DurationModel durations, CostModel cost, Policyholder ph, int year = 0);
  Incident draw(Rng& rng) const override;
  Moments conditional_moments(const Incident& incident) const override;
  TriggerArea trigger() const;
  double threshold() const { return threshold_; }

 private:
  DurationModel durations_;
  CostModel cost_;
  Policyholder ph_;
  int year_;
  double threshold_;
  Moments triggered_;
};

}  // namespace expins
