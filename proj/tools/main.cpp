// expins: expectile-based payment design for parametric insurance.
//
//   expins expectile  --distribution '{"family":"normal","mu":0,"sigma":1}' --gamma 0.5,0.9
//   expins fit        --data obs.csv --config scheme.json --out dir
//   expins design     --config design.json --out dir
//   expins evaluate   --scheme scheme.json --config model.json --out dir
//   expins crop-case  --config crop.json --out dir
//   expins cyber-sim  --config study.json --out dir
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "expins/als_regression.hpp"
#include "expins/crop_case.hpp"
#include "expins/cyber_sim.hpp"
#include "expins/errors.hpp"
#include "expins/expectile.hpp"
#include "expins/json_io.hpp"
#include "expins/payment_design.hpp"

namespace fs = std::filesystem;
using namespace expins;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out;
  std::string config;
};

ExecConfig exec_of(const Common& c) {
  if (c.workers < 1) throw ValidationError("--workers must be >= 1");
  return {c.workers};
}

json load_config(const Common& c, bool required) {
  if (c.config.empty()) {
    if (required) throw ValidationError("--config is required");
    return json::object();
  }
  return read_json_file(c.config);
}

std::string out_dir(const Common& c) {
  const std::string dir = c.out.empty() ? "." : c.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir + "'");
  return dir;
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

double level_from(const json& j, const std::string& where) {
  if (j.contains("gamma") && j.contains("alpha")) throw ValidationError(where + ": give gamma or alpha, not both");
  if (j.contains("gamma")) return ExpectileLevel(j.at("gamma").get<double>()).value();
  if (j.contains("alpha")) return gamma_from_alpha(j.at("alpha").get<double>()).value();
  return 0.5;
}

// ---- expectile ----

int cmd_expectile(const Common& c, const std::string& dist_inline, const std::string& samples_path,
                  const std::string& column, std::vector<double> gammas) {
  json cfg = load_config(c, false);
  require_keys(cfg, {"distribution", "gammas"}, "expectile config");
  if (gammas.empty() && cfg.contains("gammas")) gammas = cfg.at("gammas").get<std::vector<double>>();
  if (gammas.empty()) gammas = {0.5};
  std::vector<ExpectileLevel> levels(gammas.begin(), gammas.end());

  json source;
  json values = json::object();
  const int sources = (!dist_inline.empty()) + (!samples_path.empty()) + cfg.contains("distribution");
  if (sources != 1) throw ValidationError("give exactly one of --distribution, --samples or a config distribution");
  if (!samples_path.empty()) {
    const CsvTable t = read_csv(samples_path);
    const auto data = t.values(column.empty() ? t.header.front() : column);
    if (data.empty()) throw ValidationError("samples file has no rows");
    for (auto g : levels) values[format_key(g)] = empirical_expectile(data, g);
    source = {{"samples", samples_path}, {"n", data.size()}};
  } else {
    const json spec = dist_inline.empty() ? cfg.at("distribution") : json::parse(dist_inline);
    const Distribution d = distribution_from_json(spec);
    for (auto g : levels) values[format_key(g)] = expectile(d, g);
    source = {{"distribution", spec}};
  }
  const json hashed{{"source", source}, {"gammas", gammas}};
  const RunMeta meta{"expectile", c.seed.value_or(0), c.workers, config_hash(hashed)};
  const json out{{"metadata", metadata_json(meta)}, {"source", source}, {"expectiles", values}};
  if (c.out.empty()) {
    std::cout << out.dump(2) << '\n';
  } else {
    write_json_file(path_in(out_dir(c), "expectile.json"), out);
  }
  return 0;
}

// ---- fit ----

int cmd_fit(const Common& c, const std::string& data_path) {
  if (data_path.empty()) throw ValidationError("--data is required");
  const json cfg = load_config(c, true);
  require_keys(cfg, {"design", "trigger", "bins", "gamma", "alpha", "covariates", "max_iter", "tol"}, "fit config");
  const CsvTable t = read_csv(data_path);
  const auto s = t.values("s");
  const std::string design = cfg.value("design", std::string("pure"));

  std::vector<std::string> cov_names;
  if (cfg.contains("covariates")) {
    cov_names = cfg.at("covariates").get<std::vector<std::string>>();
  } else {
    for (const auto& h : t.header)
      if (h.size() > 1 && h[0] == 'x') cov_names.push_back(h);
  }
  Eigen::MatrixXd cov(static_cast<Eigen::Index>(cov_names.empty() ? 0 : t.rows.size()),
                      static_cast<Eigen::Index>(cov_names.size()));
  for (std::size_t j = 0; j < cov_names.size(); ++j) {
    const auto col = t.values(cov_names[j]);
    for (std::size_t i = 0; i < col.size(); ++i)
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }

  DesignMatrix dm;
  if (design == "intercept") {
    dm = design_intercept(s);
  } else {
    const auto theta = t.values("theta");
    if (design == "pure") {
      if (!cfg.contains("trigger")) throw ValidationError("pure design needs a trigger");
      dm = design_pure_parametric(theta, trigger_from_json(cfg.at("trigger")), cov, s);
    } else if (design == "linear") {
      dm = design_linear(theta, cov, s);
    } else if (design == "step") {
      if (!cfg.contains("bins")) throw ValidationError("step design needs bins");
      std::vector<Interval> bins;
      for (const auto& b : cfg.at("bins")) bins.push_back(interval_from_json(b));
      dm = design_step(theta, bins, cov, s);
    } else {
      throw ValidationError("unknown design '" + design + "' (expected intercept, pure, linear or step)");
    }
  }
  const double g = level_from(cfg, "fit config");
  FitOptions opt;
  opt.max_iter = cfg.value("max_iter", opt.max_iter);
  opt.tol = cfg.value("tol", opt.tol);
  const FitResult r = fit(dm, g, opt);

  json coef = json::object();
  for (Eigen::Index i = 0; i < r.coefficients.size(); ++i)
    coef[r.columns[static_cast<std::size_t>(i)]] = r.coefficients(i);
  const RunMeta meta{"fit", c.seed.value_or(0), c.workers, config_hash({{"config", cfg}, {"data", data_path}})};
  const json out{{"metadata", metadata_json(meta)},
                 {"design", design},
                 {"gamma", g},
                 {"coefficients", coef},
                 {"columns", r.columns},
                 {"converged", r.converged},
                 {"iterations", r.iterations},
                 {"objective", r.objective},
                 {"rank_deficient", r.rank_deficient},
                 {"observations", dm.x.rows()}};
  if (r.rank_deficient) std::cerr << "warning: design is rank deficient; ridge term applied\n";
  if (c.out.empty())
    std::cout << out.dump(2) << '\n';
  else
    write_json_file(path_in(out_dir(c), "fit.json"), out);
  return 0;
}

// ---- shared model builders for design/evaluate ----

int farm_from(const json& j, const CropPortfolio& p) {
  if (!j.contains("farm")) return central_farm(p);
  const auto& f = j.at("farm");
  if (f.is_string()) {
    const auto s = f.get<std::string>();
    if (s == "central") return central_farm(p);
    if (s == "peripheral") return peripheral_farm(p);
    throw ValidationError("farm must be central, peripheral or an index");
  }
  const int k = f.get<int>();
  if (k < 0 || k >= p.config.farms) throw ValidationError("farm index out of range");
  return k;
}

Policyholder policyholder_from(const json& j) {
  Policyholder ph;
  if (j.contains("sector")) ph.sector = sector_from_string(j.at("sector").get<std::string>());
  ph.size = j.value("size", 1);
  if (ph.size < 1 || ph.size > 3) throw ValidationError("size must be 1, 2 or 3");
  ph.p_level = j.value("p_level", 0.5);
  if (!(ph.p_level > 0.0 && ph.p_level < 1.0)) throw ValidationError("p_level must lie in (0, 1)");
  return ph;
}

DurationModel durations_from(const json& j) {
  DurationModel m;
  if (j.contains("family")) m.family = duration_family_from_string(j.at("family").get<std::string>());
  return m;
}

std::vector<double> grid_from(const json& j) {
  if (!j.contains("theta_grid")) return default_theta_grid();
  const auto& g = j.at("theta_grid");
  if (g.is_array()) return g.get<std::vector<double>>();
  require_keys(g, {"lo", "hi", "points"}, "theta_grid");
  const double lo = g.at("lo").get<double>(), hi = g.at("hi").get<double>();
  const int n = g.at("points").get<int>();
  if (n < 2 || !(hi > lo)) throw ValidationError("theta_grid needs points >= 2 and hi > lo");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

// ---- design ----

int cmd_design(const Common& c) {
  json cfg = load_config(c, true);
  const std::string kind = cfg.value("kind", std::string());
  PaymentScheme scheme{FixedPayment{}, TriggerArea::above(0.0)};
  json info = json::object();
  if (kind == "pure") {
    require_keys(cfg, {"kind", "loss", "alpha", "gamma", "trigger"}, "design config");
    if (!cfg.contains("loss") || !cfg.contains("trigger")) throw ValidationError("pure design needs loss and trigger");
    const double g = level_from(cfg, "design config");
    scheme = {FixedPayment{expectile(distribution_from_json(cfg.at("loss")), g)}, trigger_from_json(cfg.at("trigger"))};
    info["gamma"] = g;
  } else if (kind == "crop_index") {
    require_keys(cfg, {"kind", "crop", "farm", "alpha", "gamma", "theta_grid"}, "design config");
    CropConfig cc = crop_config_from_json(cfg.value("crop", json::object()));
    if (c.seed) cc.seed = *c.seed;
    const CropPortfolio p = generate_portfolio(cc);
    const int k = farm_from(cfg, p);
    const double g = level_from(cfg, "design config");
    const auto grid = grid_from(cfg);
    const TriggerArea trig =
        TriggerArea::interval(Interval{-std::numeric_limits<double>::infinity(), cc.threshold, false, true});
    scheme = optimal_index_payment(
        grid, [&](double t) { return conditional_loss_law(p, k, t); }, alpha_from_gamma(g), trig, exec_of(c));
    info = {{"gamma", g}, {"farm", k}, {"crop", crop_config_to_json(cc)}};
  } else if (kind == "cyber_fixed") {
    require_keys(cfg, {"kind", "family", "sector", "size", "p_level", "year", "mode", "alpha", "gamma"},
                 "design config");
    const DurationModel m = durations_from(cfg);
    const Policyholder ph = policyholder_from(cfg);
    const int year = cfg.value("year", 0);
    const ContractMode mode = mode_from_string(cfg.value("mode", std::string("dynamic")));
    const double g = level_from(cfg, "design config");
    const CostModel cost;
    const double y = optimal_fixed_payout(ph, cost, m, year, mode, g);
    scheme = {FixedPayment{y}, TriggerArea::above(threshold(m, ph.p_level, year, mode))};
    info = {{"gamma", g}, {"c_fix", ph.c_fix(cost)}, {"c_var", ph.c_var(cost)}};
  } else {
    throw ValidationError("design kind must be pure, crop_index or cyber_fixed");
  }
  const RunMeta meta{"design", c.seed.value_or(0), c.workers, config_hash(cfg)};
  json out = scheme_to_json(scheme);
  out["metadata"] = metadata_json(meta);
  out["info"] = info;
  if (c.out.empty())
    std::cout << out.dump(2) << '\n';
  else
    write_json_file(path_in(out_dir(c), "scheme.json"), out);
  return 0;
}

// ---- evaluate ----

int cmd_evaluate(const Common& c, const std::string& scheme_path) {
  if (scheme_path.empty()) throw ValidationError("--scheme is required");
  json sj = read_json_file(scheme_path);
  sj.erase("metadata");
  sj.erase("info");
  const PaymentScheme scheme = scheme_from_json(sj);
  const json cfg = load_config(c, true);
  require_keys(cfg,
               {"model", "crop", "farm", "family", "sector", "size", "p_level", "year", "alpha", "n", "records"},
               "evaluate config");
  const double alpha = cfg.value("alpha", 0.5);
  const auto n = cfg.value("n", std::size_t{100000});
  const auto keep = std::min(n, cfg.value("records", std::size_t{10000}));
  const std::uint64_t seed = c.seed.value_or(1);

  std::optional<CropPortfolio> portfolio;
  std::unique_ptr<IncidentModel> model;
  const std::string kind = cfg.value("model", std::string());
  if (kind == "crop") {
    CropConfig cc = crop_config_from_json(cfg.value("crop", json::object()));
    cc.seed = seed;
    portfolio = generate_portfolio(cc);
    model = std::make_unique<CropIncidentModel>(*portfolio, farm_from(cfg, *portfolio));
  } else if (kind == "cyber_single") {
    model = std::make_unique<SingleOutageModel>(durations_from(cfg), CostModel{}, policyholder_from(cfg),
                                                cfg.value("year", 0));
  } else {
    throw ValidationError("model must be crop or cyber_single");
  }

  const McEstimate est = expected_basis_risk_mc(scheme, *model, alpha, n, seed, exec_of(c));
  const std::string dir = out_dir(c);
  const RunMeta meta{"evaluate", seed, c.workers, config_hash({{"config", cfg}, {"scheme", sj}})};
  {
    CsvWriter w(path_in(dir, "records.csv"), meta, {"incident", "time", "index", "loss", "payout", "deviation"});
    // Same block streams as the estimator, so the records are its first draws.
    for (std::size_t b = 0, i = 0; i < keep; ++b) {
      Rng rng = Rng::stream(seed, b);
      for (std::size_t j = 0; j < kBlockSize && i < keep; ++j, ++i) {
        const Incident inc = model->draw(rng);
        const double y = scheme.payout(inc.index);
        w.cell(static_cast<long long>(i)).cell(inc.time).cell(inc.index.at(0)).cell(inc.loss).cell(y).cell(y - inc.loss);
        w.end_row();
      }
    }
  }
  const json out{{"metadata", metadata_json(meta)},
                 {"alpha", alpha},
                 {"n", n},
                 {"expected_basis_risk", est.estimate},
                 {"std_error", est.std_error},
                 {"records", keep}};
  write_json_file(path_in(dir, "evaluate.json"), out);
  return 0;
}

// ---- crop-case ----

int cmd_crop(const Common& c) {
  json cfg = load_config(c, false);
  require_keys(cfg,
               {"farms", "radius", "mu", "sigma", "c_crit", "c_min", "threshold", "corr_length_factor", "seed",
                "alphas", "theta_grid"},
               "crop config");
  json crop_part = cfg;
  crop_part.erase("alphas");
  crop_part.erase("theta_grid");
  CropConfig cc = crop_config_from_json(crop_part);
  if (c.seed) cc.seed = *c.seed;
  const std::vector<double> alphas =
      cfg.contains("alphas") ? cfg.at("alphas").get<std::vector<double>>() : std::vector<double>{0.3, 0.4, 0.5, 0.6, 0.7};
  const auto grid = grid_from(cfg);
  const CropCaseResult r = run_crop_case(cc, alphas, grid, exec_of(c));

  const json effective{{"crop", crop_config_to_json(cc)}, {"alphas", alphas}, {"theta_grid", grid}};
  const RunMeta meta{"crop-case", cc.seed, c.workers, config_hash(effective)};
  const std::string dir = out_dir(c);
  {
    CsvWriter w(path_in(dir, "locations.csv"), meta, {"farm", "x", "y", "index_cov", "role"});
    for (int k = 0; k < cc.farms; ++k) {
      const auto& l = r.portfolio.locations[static_cast<std::size_t>(k)];
      const std::string role = k == r.central ? "central" : k == r.peripheral ? "peripheral" : "";
      w.cell(static_cast<long long>(k)).cell(l.x).cell(l.y).cell(r.portfolio.index_cov(k)).cell(role);
      w.end_row();
    }
  }
  {
    std::vector<std::string> header{"theta"};
    for (double a : alphas) header.push_back("central_alpha_" + format_key(a));
    for (double a : alphas) header.push_back("peripheral_alpha_" + format_key(a));
    CsvWriter w(path_in(dir, "curve.csv"), meta, header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      w.cell(grid[i]);
      for (const auto& cv : r.central_curves) w.cell(cv[i]);
      for (const auto& cv : r.peripheral_curves) w.cell(cv[i]);
      w.end_row();
    }
  }
  const auto& cov = r.portfolio.covariance;
  double min_corr = 1.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) min_corr = std::min(min_corr, cov(i, j) / cov(i, i));
  const json out{
      {"metadata", metadata_json(meta)},
      {"config", effective},
      {"disk_sampling", "polar: radius r*sqrt(U), angle 2*pi*U"},
      {"central_farm", r.central},
      {"peripheral_farm", r.peripheral},
      {"covariance",
       {{"index_variance", r.portfolio.index_variance},
        {"min_correlation", min_corr},
        {"central_index_cov", r.portfolio.index_cov(r.central)},
        {"peripheral_index_cov", r.portfolio.index_cov(r.peripheral)},
        {"cholesky_jitter", r.portfolio.cholesky_jitter}}},
      {"farms", cc.farms}};
  write_json_file(path_in(dir, "crop_case.json"), out);
  return 0;
}

// ---- cyber-sim ----

json summary_json(const GroupSummary& s) {
  return {{"runs", s.runs},
          {"mean", s.mean},
          {"std_error", s.std_error},
          {"lower_tail_mean", s.lower_tail_mean},
          {"histogram", {{"start", s.histogram.start}, {"width", s.histogram.width}, {"counts", s.histogram.counts}}}};
}

json groups_json(const std::string& name, const std::map<std::string, std::vector<double>>& groups) {
  json j = json::object();
  for (const auto& [key, values] : groups) j[key] = summary_json(summarize(name, key, values));
  return j;
}

int cmd_cyber(const Common& c, const std::string& mode_flag, int years_flag, int runs_flag) {
  json cfg = load_config(c, false);
  std::vector<std::string> families{"lognormal", "gamma"};
  if (cfg.contains("families")) {
    families = cfg.at("families").get<std::vector<std::string>>();
    cfg.erase("families");
  } else if (cfg.contains("family")) {
    families = {cfg.at("family").get<std::string>()};
  }
  require_keys(cfg,
               {"services", "family", "durations", "cost", "mode", "years", "runs", "records_runs", "seed", "p_levels",
                "gammas", "portfolio"},
               "study config");
  StudyConfig base = study_config_from_json(cfg);
  if (c.seed) base.seed = *c.seed;
  if (!mode_flag.empty()) base.mode = mode_from_string(mode_flag);
  if (years_flag > 0) base.years = years_flag;
  if (runs_flag > 0) base.runs = runs_flag;
  base.validate();

  json effective = study_config_to_json(base);
  effective["families"] = families;
  const RunMeta meta{"cyber-sim", base.seed, c.workers, config_hash(effective)};
  const std::string dir = out_dir(c);

  std::vector<std::string> header{"family", "run",     "incident",     "time",    "year", "service", "duration",
                                  "policyholder", "sector", "size", "p_level", "loss"};
  for (double g : base.gammas) header.push_back("payout_gamma_" + format_key(g));
  for (double g : base.gammas) header.push_back("deviation_gamma_" + format_key(g));
  CsvWriter w(path_in(dir, "records.csv"), meta, header);

  json per_family = json::object();
  const int primary = [&] {
    for (std::size_t i = 0; i < base.gammas.size(); ++i)
      if (base.gammas[i] == 0.5) return static_cast<int>(i);
    return 0;
  }();
  for (const auto& fam : families) {
    StudyConfig sc = base;
    sc.durations.family = duration_family_from_string(fam);
    const StudyResult r = run_study(sc, exec_of(c));

    for (const auto& rec : r.records) {
      const auto& ph = r.portfolio[static_cast<std::size_t>(rec.policyholder)];
      w.cell(fam).cell(static_cast<long long>(rec.run)).cell(static_cast<long long>(rec.incident)).cell(rec.time);
      w.cell(static_cast<long long>(rec.year + 1)).cell(static_cast<long long>(rec.service + 1)).cell(rec.duration);
      w.cell(static_cast<long long>(rec.policyholder)).cell(sector_name(ph.sector)).cell(static_cast<long long>(ph.size));
      w.cell(ph.p_level).cell(rec.loss);
      for (double y : rec.payouts) w.cell(y);
      for (double y : rec.payouts) w.cell(y - rec.loss);
      w.end_row();
    }

    const auto ns = sc.services.size();
    std::vector<double> counts(ns, 0.0);
    std::vector<double> per_year(static_cast<std::size_t>(sc.years), 0.0);
    std::size_t floored = 0;
    for (const auto& run : r.runs) {
      for (std::size_t s = 0; s < ns; ++s) counts[s] += run.first4_counts[s];
      for (int y = 0; y < sc.years; ++y)
        for (std::size_t s = 0; s < ns; ++s) per_year[static_cast<std::size_t>(y)] += run.incidents[y * ns + s];
      floored += run.floored;
    }
    for (auto& v : counts) v /= sc.runs;
    for (auto& v : per_year) v /= sc.runs;

    json thresholds = json::object(), payouts = json::object();
    const int np = static_cast<int>(sc.p_levels.size());
    for (int y = 0; y < sc.years; ++y) {
      json ty = json::object(), py = json::object();
      for (int p = 0; p < np; ++p) {
        const auto key = format_key(sc.p_levels[p]);
        ty[key] = r.thresholds[static_cast<std::size_t>(y * np + p)];
        json pg = json::object();
        for (std::size_t g = 0; g < sc.gammas.size(); ++g)
          pg[format_key(sc.gammas[g])] = r.payouts[r.cell(y, p, static_cast<int>(g))];
        py[key] = pg;
      }
      thresholds[std::to_string(y + 1)] = ty;
      payouts[std::to_string(y + 1)] = py;
    }
    per_family[fam] = {
        {"policyholders", r.portfolio.size()},
        {"mean_counts_first_4_years", counts},
        {"mean_incidents_per_year", per_year},
        {"floored_losses", floored},
        {"thresholds", thresholds},
        {"duration_expectiles", payouts},
        {"by_threshold", groups_json("threshold", group_deviations(r, GroupBy::kThreshold, primary))},
        {"by_year", groups_json("year", group_deviations(r, GroupBy::kYear, primary))},
        {"by_gamma", groups_json("gamma", group_deviations(r, GroupBy::kGamma, primary))},
        {"payout_totals_by_gamma", groups_json("gamma_payout", payout_totals_by_gamma(r))}};
  }
  const json out{{"metadata", metadata_json(meta)},
                 {"config", effective},
                 {"primary_gamma", base.gammas[static_cast<std::size_t>(primary)]},
                 {"families", per_family}};
  write_json_file(path_in(dir, "summary.json"), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expectile-based payment design for parametric insurance"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Master RNG seed (64-bit)");
  app.add_option("--workers", common.workers, "Declared worker count")->check(CLI::PositiveNumber);
  app.add_option("--out", common.out, "Output directory");
  app.add_option("--config", common.config, "JSON configuration file");

  std::string dist_inline, samples_path, column, data_path, scheme_path, mode_flag;
  std::vector<double> gammas;
  int years_flag = 0, runs_flag = 0;

  auto* ex = app.add_subcommand("expectile", "Expectiles of a distribution or a sample");
  ex->add_option("--distribution", dist_inline, "Distribution spec as inline JSON");
  ex->add_option("--samples", samples_path, "CSV file with samples");
  ex->add_option("--column", column, "Sample column (default: first)");
  ex->add_option("--gamma", gammas, "Expectile levels")->delimiter(',');

  auto* ft = app.add_subcommand("fit", "Asymmetric least-squares fit of a payment design");
  ft->add_option("--data", data_path, "CSV with columns s, theta, x1..xl");

  auto* de = app.add_subcommand("design", "Optimal payment scheme");
  auto* ev = app.add_subcommand("evaluate", "Monte-Carlo basis risk of a scheme");
  ev->add_option("--scheme", scheme_path, "Scheme JSON");

  auto* cr = app.add_subcommand("crop-case", "Area-yield crop example");
  auto* cy = app.add_subcommand("cyber-sim", "Cloud-outage simulation study");
  cy->add_option("--mode", mode_flag, "static or dynamic");
  cy->add_option("--years", years_flag, "Policy years");
  cy->add_option("--runs", runs_flag, "Simulation runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*ex) return cmd_expectile(common, dist_inline, samples_path, column, gammas);
    if (*ft) return cmd_fit(common, data_path);
    if (*de) return cmd_design(common);
    if (*ev) return cmd_evaluate(common, scheme_path);
    if (*cr) return cmd_crop(common);
    if (*cy) return cmd_cyber(common, mode_flag, years_flag, runs_flag);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: invalid JSON input: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
