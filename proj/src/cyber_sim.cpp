#include "expins/cyber_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "expins/errors.hpp"

namespace expins {

void ServiceParams::validate() const {
  if (!(alpha > 0.0)) throw ValidationError("service intensity alpha must be > 0");
  if (!(beta < 1.0)) throw ValidationError("service intensity beta must be < 1");
}

double ServiceParams::cumulative(double t) const {
  if (t <= 0.0) return 0.0;
  return alpha * std::pow(t, 1.0 - beta) / (1.0 - beta);
}

double ServiceParams::inverse_cumulative(double u) const {
  if (u <= 0.0) return 0.0;
  return std::pow((1.0 - beta) * u / alpha, 1.0 / (1.0 - beta));
}

std::vector<ServiceParams> default_services() { return {{6.8, -0.6}, {4.25, 0.0}, {2.635, 0.38}}; }

std::vector<double> simulate_arrivals(const ServiceParams& svc, double horizon, Rng& rng) {
  svc.validate();
  if (!(horizon > 0.0)) throw ValidationError("simulation horizon must be > 0");
  const double total = svc.cumulative(horizon);
  std::vector<double> times;
  double u = 0.0;
  for (;;) {
    u += rng.exponential();
    if (u > total) break;
    times.push_back(std::min(horizon, svc.inverse_cumulative(u)));
  }
  return times;
}

double interarrival_survival(const ServiceParams& svc, double t, double x) {
  return std::exp(-(svc.cumulative(t + x) - svc.cumulative(t)));
}

std::string family_name(DurationFamily f) { return f == DurationFamily::kLogNormal ? "lognormal" : "gamma"; }

DurationFamily duration_family_from_string(const std::string& s) {
  if (s == "lognormal" || s == "LN") return DurationFamily::kLogNormal;
  if (s == "gamma" || s == "G") return DurationFamily::kGamma;
  throw ValidationError("unknown duration family '" + s + "' (expected lognormal or gamma)");
}

double DurationModel::kappa(int year) const {
  const double s = sigma(year);
  return 1.0 / std::expm1(s * s);
}

double DurationModel::delta(int year) const {
  const double s = sigma(year);
  return std::expm1(s * s) * std::exp(mu(year) + 0.5 * s * s);
}

Distribution DurationModel::law(int year) const {
  if (year < 0) throw ValidationError("policy year must be >= 0");
  if (family == DurationFamily::kLogNormal) return Distribution::lognormal(mu(year), sigma(year));
  return Distribution::gamma(kappa(year), delta(year));
}

Distribution DurationModel::truncated_law(int year, double p) const {
  if (year < 0) throw ValidationError("policy year must be >= 0");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("threshold level p must lie in (0, 1)");
  if (family == DurationFamily::kLogNormal) return Distribution::truncated_lognormal_at_level(mu(year), sigma(year), p);
  return Distribution::truncated_gamma_at_level(kappa(year), delta(year), p);
}

double DurationModel::draw(int year, Rng& rng) const { return expins::draw(law(year), rng); }

int policy_year(double t, int years) {
  const int y = static_cast<int>(std::floor(t));
  return std::clamp(y, 0, years - 1);
}

std::string mode_name(ContractMode m) { return m == ContractMode::kStatic ? "static" : "dynamic"; }

ContractMode mode_from_string(const std::string& s) {
  if (s == "static") return ContractMode::kStatic;
  if (s == "dynamic") return ContractMode::kDynamic;
  throw ValidationError("unknown contract mode '" + s + "' (expected static or dynamic)");
}

double threshold(const DurationModel& m, double p, int year, ContractMode mode) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("threshold level p must lie in (0, 1)");
  return quantile(m.law(mode == ContractMode::kStatic ? 0 : year), p);
}

std::string sector_name(Sector s) {
  static const char* names[] = {"FI", "HC", "BR", "EDU", "GOV", "MAN"};
  return names[static_cast<int>(s)];
}

Sector sector_from_string(const std::string& s) {
  for (int i = 0; i < 6; ++i)
    if (sector_name(static_cast<Sector>(i)) == s) return static_cast<Sector>(i);
  throw ValidationError("unknown sector '" + s + "'");
}

double Policyholder::c_fix(const CostModel& c) const {
  const bool mid = sector == Sector::kBR || sector == Sector::kMAN || sector == Sector::kEDU;
  const bool high = sector == Sector::kFI || sector == Sector::kHC;
  return std::exp(c.fix_base + (mid ? c.fix_mid : 0.0) + (high ? c.fix_high : 0.0));
}

double Policyholder::c_var(const CostModel& c) const {
  return std::exp(c.var_base + (size == 2 ? c.var_size2 : 0.0) + (size == 3 ? c.var_size3 : 0.0));
}

double outage_loss(const Policyholder& ph, const CostModel& cost, double duration, Rng& rng, bool* floored) {
  if (!(duration >= 0.0)) throw ValidationError("outage duration must be >= 0");
  const double s = ph.c_fix(cost) + ph.c_var(cost) * duration + cost.sigma_eps * rng.normal();
  if (floored) *floored = s < 0.0;
  return std::max(0.0, s);
}

double optimal_fixed_payout(const Policyholder& ph, const CostModel& cost, const DurationModel& m, int year,
                            ContractMode mode, ExpectileLevel gamma) {
  const int y = mode == ContractMode::kStatic ? 0 : year;
  return ph.c_fix(cost) + ph.c_var(cost) * expectile(m.truncated_law(y, ph.p_level), gamma);
}

std::vector<Policyholder> baseline_portfolio(std::span<const double> p_levels) {
  static const std::pair<Sector, int> sectors[] = {{Sector::kFI, 15}, {Sector::kHC, 15}, {Sector::kBR, 5},
                                                   {Sector::kEDU, 5}, {Sector::kGOV, 5}, {Sector::kMAN, 5}};
  // Sizes cycle with period 10 so each sector mixes sizes: 30/15/5 per 50.
  static const int size_cycle[10] = {1, 1, 1, 1, 1, 1, 2, 2, 2, 3};
  std::vector<Policyholder> out;
  for (double p : p_levels) {
    int i = 0;
    for (const auto& [sector, count] : sectors)
      for (int c = 0; c < count; ++c, ++i) out.push_back({sector, size_cycle[i % 10], p});
  }
  return out;
}

void StudyConfig::validate() const {
  if (services.empty()) throw ValidationError("study needs at least one service");
  for (const auto& s : services) s.validate();
  if (years < 1) throw ValidationError("years must be >= 1");
  if (runs < 1) throw ValidationError("runs must be >= 1");
  if (records_runs < 0) throw ValidationError("records_runs must be >= 0");
  if (p_levels.empty()) throw ValidationError("study needs at least one threshold level");
  for (double p : p_levels)
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("threshold levels must lie in (0, 1)");
  if (gammas.empty()) throw ValidationError("study needs at least one expectile level");
  for (double g : gammas) ExpectileLevel{g};
  if (!(cost.sigma_eps > 0.0)) throw ValidationError("sigma_eps must be > 0");
  for (const auto& ph : portfolio) {
    if (ph.size < 1 || ph.size > 3) throw ValidationError("policyholder size must be 1, 2 or 3");
    if (std::find(p_levels.begin(), p_levels.end(), ph.p_level) == p_levels.end())
      throw ValidationError("policyholder threshold level is not among the configured levels");
  }
}

std::size_t StudyResult::cell(int year, int p, int g) const {
  const auto np = config.p_levels.size();
  const auto ng = config.gammas.size();
  return (static_cast<std::size_t>(year) * np + static_cast<std::size_t>(p)) * ng + static_cast<std::size_t>(g);
}

namespace {

struct Event {
  double time;
  int service;
};

struct RunOutput {
  RunCells cells;
  std::vector<SimRecord> records;
};

}  // namespace

StudyResult run_study(const StudyConfig& cfg, const ExecConfig& exec) {
  cfg.validate();
  StudyResult r;
  r.config = cfg;
  r.portfolio = cfg.portfolio.empty() ? baseline_portfolio(cfg.p_levels) : cfg.portfolio;

  const int years = cfg.years;
  const int np = static_cast<int>(cfg.p_levels.size());
  const int ng = static_cast<int>(cfg.gammas.size());
  const int ns = static_cast<int>(cfg.services.size());

  r.thresholds.resize(static_cast<std::size_t>(years * np));
  r.payouts.resize(static_cast<std::size_t>(years * np * ng));
  for (int y = 0; y < years; ++y) {
    const int ye = cfg.mode == ContractMode::kStatic ? 0 : y;
    for (int p = 0; p < np; ++p) {
      r.thresholds[static_cast<std::size_t>(y * np + p)] = threshold(cfg.durations, cfg.p_levels[p], y, cfg.mode);
      const Distribution trunc = cfg.durations.truncated_law(ye, cfg.p_levels[p]);
      for (int g = 0; g < ng; ++g) r.payouts[r.cell(y, p, g)] = expectile(trunc, cfg.gammas[g]);
    }
  }

  std::vector<int> p_index(r.portfolio.size());
  std::vector<double> c_fix(r.portfolio.size()), c_var(r.portfolio.size());
  std::vector<double> group_fix(static_cast<std::size_t>(np), 0.0), group_var(static_cast<std::size_t>(np), 0.0);
  for (std::size_t k = 0; k < r.portfolio.size(); ++k) {
    const auto& ph = r.portfolio[k];
    p_index[k] = static_cast<int>(std::find(cfg.p_levels.begin(), cfg.p_levels.end(), ph.p_level) - cfg.p_levels.begin());
    c_fix[k] = ph.c_fix(cfg.cost);
    c_var[k] = ph.c_var(cfg.cost);
    group_fix[static_cast<std::size_t>(p_index[k])] += c_fix[k];
    group_var[static_cast<std::size_t>(p_index[k])] += c_var[k];
  }

  const double horizon = static_cast<double>(years);
  const double first4 = std::min(4.0, horizon);

  auto one_run = [&](std::size_t run) {
    Rng rng = Rng::stream(cfg.seed, run);
    RunOutput out;
    auto& c = out.cells;
    c.deviation.assign(static_cast<std::size_t>(years * np * ng), 0.0);
    c.payout.assign(c.deviation.size(), 0.0);
    c.loss.assign(static_cast<std::size_t>(years * np), 0.0);
    c.incidents.assign(static_cast<std::size_t>(years * ns), 0);
    c.first4_counts.assign(static_cast<std::size_t>(ns), 0);

    std::vector<Event> events;
    for (int s = 0; s < ns; ++s) {
      for (double t : simulate_arrivals(cfg.services[static_cast<std::size_t>(s)], horizon, rng)) {
        events.push_back({t, s});
        if (t <= first4) ++c.first4_counts[static_cast<std::size_t>(s)];
      }
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.time < b.time || (a.time == b.time && a.service < b.service); });

    const bool keep = static_cast<int>(run) < cfg.records_runs;
    std::vector<double> group_loss(static_cast<std::size_t>(np));
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& ev = events[i];
      const int y = policy_year(ev.time, years);
      ++c.incidents[static_cast<std::size_t>(y * ns + ev.service)];
      const double theta = cfg.durations.draw(y, rng);

      std::fill(group_loss.begin(), group_loss.end(), 0.0);
      for (std::size_t k = 0; k < r.portfolio.size(); ++k) {
        const double s = c_fix[k] + c_var[k] * theta + cfg.cost.sigma_eps * rng.normal();
        if (s < 0.0) ++c.floored;
        const double loss = std::max(0.0, s);
        const auto p = p_index[k];
        group_loss[static_cast<std::size_t>(p)] += loss;
        if (keep) {
          SimRecord rec{static_cast<int>(run), static_cast<int>(i), ev.time, y, ev.service, theta,
                        static_cast<int>(k), p, loss, std::vector<double>(static_cast<std::size_t>(ng), 0.0)};
          if (theta > r.thresholds[static_cast<std::size_t>(y * np + p)])
            for (int g = 0; g < ng; ++g) rec.payouts[static_cast<std::size_t>(g)] = c_fix[k] + c_var[k] * r.payouts[r.cell(y, p, g)];
          out.records.push_back(std::move(rec));
        }
      }
      for (int p = 0; p < np; ++p) {
        const auto pi = static_cast<std::size_t>(p);
        c.loss[static_cast<std::size_t>(y * np + p)] += group_loss[pi];
        const bool trig = theta > r.thresholds[static_cast<std::size_t>(y * np + p)];
        for (int g = 0; g < ng; ++g) {
          const auto idx = r.cell(y, p, g);
          const double pay = trig ? group_fix[pi] + group_var[pi] * r.payouts[idx] : 0.0;
          c.payout[idx] += pay;
          c.deviation[idx] += pay - group_loss[pi];
        }
      }
    }
    return out;
  };

  auto outputs = map_indexed(static_cast<std::size_t>(cfg.runs), exec, one_run);
  r.runs.reserve(outputs.size());
  for (auto& o : outputs) {
    r.runs.push_back(std::move(o.cells));
    r.records.insert(r.records.end(), std::make_move_iterator(o.records.begin()),
                     std::make_move_iterator(o.records.end()));
  }
  return r;
}

Histogram freedman_diaconis(std::span<const double> values) {
  if (values.empty()) throw ValidationError("histogram needs data");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto q = [&](double level) {
    const double pos = level * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] + f * (v[i + 1] - v[i]) : v[i];
  };
  const double lo = v.front();
  const double hi = v.back();
  double width = 2.0 * (q(0.75) - q(0.25)) / std::cbrt(static_cast<double>(v.size()));
  Histogram h;
  h.start = lo;
  if (!(width > 0.0) || !std::isfinite(width)) {
    h.width = hi > lo ? hi - lo : 1.0;
    h.counts = {v.size()};
    return h;
  }
  auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  bins = std::clamp<std::size_t>(bins, 1, 10000);
  width = std::max(width, (hi - lo) / static_cast<double>(bins));
  h.width = width;
  h.counts.assign(bins, 0);
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

GroupSummary summarize(const std::string& group, const std::string& key, std::span<const double> per_run) {
  if (per_run.empty()) throw ValidationError("group '" + group + "/" + key + "' is empty");
  GroupSummary s;
  s.group = group;
  s.key = key;
  s.runs = per_run.size();
  RunningStats st;
  for (double v : per_run) st.add(v);
  s.mean = st.mean;
  s.std_error = st.std_error();
  std::vector<double> sorted(per_run.begin(), per_run.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = std::max<std::size_t>(1, sorted.size() / 100);
  double tail = 0.0;
  for (std::size_t i = 0; i < m; ++i) tail += sorted[i];
  s.lower_tail_mean = tail / static_cast<double>(m);
  s.histogram = freedman_diaconis(per_run);
  return s;
}

std::string format_key(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::map<std::string, std::vector<double>> group_deviations(const StudyResult& r, GroupBy by, int g) {
  const int np = static_cast<int>(r.config.p_levels.size());
  const int ng = static_cast<int>(r.config.gammas.size());
  if (by != GroupBy::kGamma && (g < 0 || g >= ng)) throw ValidationError("gamma index out of range");
  std::map<std::string, std::vector<double>> out;
  for (const auto& run : r.runs) {
    switch (by) {
      case GroupBy::kThreshold:
        for (int p = 0; p < np; ++p) out[format_key(r.config.p_levels[p])].push_back(run.deviation[r.cell(0, p, g)]);
        break;
      case GroupBy::kYear:
        for (int y = 0; y < r.config.years; ++y) {
          double s = 0.0;
          for (int p = 0; p < np; ++p) s += run.deviation[r.cell(y, p, g)];
          out[std::to_string(y + 1)].push_back(s);
        }
        break;
      case GroupBy::kGamma:
        for (int gi = 0; gi < ng; ++gi) {
          double s = 0.0;
          for (int p = 0; p < np; ++p) s += run.deviation[r.cell(0, p, gi)];
          out[format_key(r.config.gammas[gi])].push_back(s);
        }
        break;
    }
  }
  return out;
}

std::map<std::string, std::vector<double>> group_deviations_from_records(const StudyResult& r, GroupBy by, int g) {
  const int ng = static_cast<int>(r.config.gammas.size());
  if (by != GroupBy::kGamma && (g < 0 || g >= ng)) throw ValidationError("gamma index out of range");
  const auto runs = static_cast<std::size_t>(std::min(r.config.records_runs, r.config.runs));
  std::map<std::string, std::vector<double>> out;
  // Every key exists in every run even if no record falls into it.
  const auto touch = [&](const std::string& key) -> std::vector<double>& {
    auto& v = out[key];
    v.resize(runs, 0.0);
    return v;
  };
  for (std::size_t run = 0; run < runs; ++run) {
    if (by == GroupBy::kThreshold)
      for (double p : r.config.p_levels) touch(format_key(p));
    if (by == GroupBy::kYear)
      for (int y = 0; y < r.config.years; ++y) touch(std::to_string(y + 1));
    if (by == GroupBy::kGamma)
      for (double gm : r.config.gammas) touch(format_key(gm));
  }
  for (const auto& rec : r.records) {
    const auto run = static_cast<std::size_t>(rec.run);
    switch (by) {
      case GroupBy::kThreshold:
        if (rec.year == 0)
          touch(format_key(r.config.p_levels[static_cast<std::size_t>(rec.p_index)]))[run] +=
              rec.payouts[static_cast<std::size_t>(g)] - rec.loss;
        break;
      case GroupBy::kYear:
        touch(std::to_string(rec.year + 1))[run] += rec.payouts[static_cast<std::size_t>(g)] - rec.loss;
        break;
      case GroupBy::kGamma:
        if (rec.year == 0)
          for (int gi = 0; gi < ng; ++gi)
            touch(format_key(r.config.gammas[static_cast<std::size_t>(gi)]))[run] +=
                rec.payouts[static_cast<std::size_t>(gi)] - rec.loss;
        break;
    }
  }
  return out;
}

std::map<std::string, std::vector<double>> payout_totals_by_gamma(const StudyResult& r) {
  const int np = static_cast<int>(r.config.p_levels.size());
  const int ng = static_cast<int>(r.config.gammas.size());
  std::map<std::string, std::vector<double>> out;
  for (const auto& run : r.runs) {
    for (int g = 0; g < ng; ++g) {
      double s = 0.0;
      for (int p = 0; p < np; ++p) s += run.payout[r.cell(0, p, g)];
      out[format_key(r.config.gammas[g])].push_back(s);
    }
  }
  return out;
}

SingleOutageModel::SingleOutageModel(DurationModel durations, CostModel cost, Policyholder ph, int year)
    : durations_(durations), cost_(cost), ph_(ph), year_(year) {
  if (!(cost_.sigma_eps > 0.0)) throw ValidationError("sigma_eps must be > 0");
  threshold_ = quantile(durations_.law(year_), ph_.p_level);
  const Distribution trunc = durations_.truncated_law(year_, ph_.p_level);
  const double cv = ph_.c_var(cost_);
  triggered_ = {ph_.c_fix(cost_) + cv * mean(trunc), cv * cv * variance(trunc) + cost_.sigma_eps * cost_.sigma_eps};
}

Incident SingleOutageModel::draw(Rng& rng) const {
  Incident inc;
  const double theta = durations_.draw(year_, rng);
  inc.index = {theta};
  inc.time = static_cast<double>(year_);
  inc.loss = outage_loss(ph_, cost_, theta, rng);
  return inc;
}

Moments SingleOutageModel::conditional_moments(const Incident& incident) const {
  if (!(incident.index.at(0) > threshold_))
    throw ValidationError("conditional moments are only defined on the trigger event");
  return triggered_;
}

TriggerArea SingleOutageModel::trigger() const { return TriggerArea::above(threshold_); }

}  // namespace expins
