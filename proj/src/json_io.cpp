#include "expins/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "expins/errors.hpp"

namespace expins {

namespace {

double num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing key '" + key + "'");
  if (!j.at(key).is_number()) throw ValidationError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? num(j, key, where) : fallback;
}

std::vector<double> num_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError(where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// JSON has no infinities; null stands for an unbounded end.
json bound_to_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double bound_from_json(const json& j, double unbounded) { return j.is_null() ? unbounded : j.get<double>(); }

}  // namespace

void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ValidationError(where + ": unknown key '" + k + "'");
}

Distribution distribution_from_json(const json& j) {
  const std::string where = "distribution";
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw ValidationError("distribution spec needs a string 'family'");
  const auto family = j.at("family").get<std::string>();
  const bool trunc_q = j.contains("truncate_at_quantile");
  const bool trunc_x = j.contains("truncate_at");
  if (trunc_q && trunc_x) throw ValidationError("give either truncate_at or truncate_at_quantile, not both");

  auto base = [&]() -> Distribution {
    if (family == "normal") {
      require_keys(j, {"family", "mu", "sigma", "shift", "scale"}, where);
      return Distribution::normal(num(j, "mu", where), num(j, "sigma", where));
    }
    if (family == "lognormal") {
      require_keys(j, {"family", "mu", "sigma", "truncate_at", "truncate_at_quantile", "shift", "scale"}, where);
      const double mu = num(j, "mu", where), sigma = num(j, "sigma", where);
      if (trunc_q) return Distribution::truncated_lognormal_at_level(mu, sigma, num(j, "truncate_at_quantile", where));
      if (trunc_x) return Distribution::truncated_lognormal(mu, sigma, num(j, "truncate_at", where));
      return Distribution::lognormal(mu, sigma);
    }
    if (family == "gamma") {
      require_keys(j, {"family", "shape", "scale", "truncate_at", "truncate_at_quantile", "shift", "affine_scale"},
                   where);
      const double k = num(j, "shape", where), d = num(j, "scale", where);
      if (trunc_q) return Distribution::truncated_gamma_at_level(k, d, num(j, "truncate_at_quantile", where));
      if (trunc_x) return Distribution::truncated_gamma(k, d, num(j, "truncate_at", where));
      return Distribution::gamma(k, d);
    }
    if (family == "crop_loss") {
      require_keys(j, {"family", "mu", "sigma", "c_crit", "c_min", "shift", "scale"}, where);
      return Distribution::crop_loss(num(j, "mu", where), num(j, "sigma", where), num(j, "c_crit", where),
                                     num(j, "c_min", where));
    }
    if (family == "empirical") {
      require_keys(j, {"family", "samples", "shift", "scale"}, where);
      if (!j.contains("samples")) throw ValidationError("empirical distribution needs 'samples'");
      return Distribution::empirical(num_array(j.at("samples"), "samples"));
    }
    if (family == "discrete") {
      require_keys(j, {"family", "atoms", "shift", "scale"}, where);
      if (!j.contains("atoms") || !j.at("atoms").is_array()) throw ValidationError("discrete distribution needs 'atoms'");
      std::vector<Atom> atoms;
      for (const auto& a : j.at("atoms")) {
        const auto pair = num_array(a, "atom");
        if (pair.size() != 2) throw ValidationError("each atom must be [value, probability]");
        atoms.push_back({pair[0], pair[1]});
      }
      return Distribution::discrete(std::move(atoms));
    }
    throw ValidationError("unknown distribution family '" + family + "'");
  };
  Distribution d = base();
  // Gamma uses "scale" for its own parameter, so its affine factor is "affine_scale".
  const char* scale_key = family == "gamma" ? "affine_scale" : "scale";
  if (j.contains("shift") || j.contains(scale_key))
    d = d.affine(num_or(j, "shift", 0.0, where), num_or(j, scale_key, 1.0, where));
  return d;
}

Interval interval_from_json(const json& j) {
  // [lo, hi] (open ends) or {"lo":..,"hi":..,"lo_closed":..,"hi_closed":..}
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (j.is_array()) {
    if (j.size() != 2) throw ValidationError("interval array must be [lo, hi]");
    return {bound_from_json(j[0], -inf), bound_from_json(j[1], inf), false, false};
  }
  require_keys(j, {"lo", "hi", "lo_closed", "hi_closed"}, "interval");
  Interval iv;
  if (j.contains("lo")) iv.lo = bound_from_json(j.at("lo"), -inf);
  if (j.contains("hi")) iv.hi = bound_from_json(j.at("hi"), inf);
  iv.lo_closed = j.value("lo_closed", false);
  iv.hi_closed = j.value("hi_closed", false);
  return iv;
}

TriggerArea trigger_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("trigger must be a JSON object");
  require_keys(j, {"above", "below", "interval", "boxes", "any_component_above"}, "trigger");
  if (j.size() != 1) throw ValidationError("trigger needs exactly one of above, below, interval, boxes, any_component_above");
  if (j.contains("above")) return TriggerArea::above(num(j, "above", "trigger"));
  if (j.contains("below")) return TriggerArea::below(num(j, "below", "trigger"));
  if (j.contains("interval")) return TriggerArea::interval(interval_from_json(j.at("interval")));
  if (j.contains("any_component_above")) {
    const auto t = num_array(j.at("any_component_above"), "any_component_above");
    return TriggerArea::any_component_above(t);
  }
  std::vector<TriggerArea::Box> boxes;
  for (const auto& b : j.at("boxes")) {
    TriggerArea::Box box;
    for (const auto& iv : b) box.push_back(interval_from_json(iv));
    boxes.push_back(std::move(box));
  }
  return TriggerArea(std::move(boxes));
}

json trigger_to_json(const TriggerArea& t) {
  json boxes = json::array();
  for (const auto& b : t.boxes()) {
    json box = json::array();
    for (const auto& iv : b)
      box.push_back({{"lo", bound_to_json(iv.lo)},
                     {"hi", bound_to_json(iv.hi)},
                     {"lo_closed", iv.lo_closed},
                     {"hi_closed", iv.hi_closed}});
    boxes.push_back(std::move(box));
  }
  return {{"boxes", std::move(boxes)}};
}

json scheme_to_json(const PaymentScheme& s) {
  json j{{"rule", rule_name(s.rule)}, {"trigger", trigger_to_json(s.trigger)}};
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, FixedPayment>) {
          j["amount"] = r.amount;
        } else if constexpr (std::is_same_v<R, LinearPayment>) {
          j["intercept"] = r.intercept;
          j["slope"] = r.slope;
        } else if constexpr (std::is_same_v<R, StepPayment>) {
          j["base"] = r.base;
          j["levels"] = r.levels;
          json bins = json::array();
          for (const auto& iv : r.bins)
            bins.push_back({{"lo", bound_to_json(iv.lo)},
                            {"hi", bound_to_json(iv.hi)},
                            {"lo_closed", iv.lo_closed},
                            {"hi_closed", iv.hi_closed}});
          j["bins"] = std::move(bins);
        } else {
          j["theta"] = r.theta;
          j["payment"] = r.payment;
          j["interpolation"] = "piecewise_linear";
        }
      },
      s.rule);
  return j;
}

PaymentScheme scheme_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rule") || !j.contains("trigger"))
    throw ValidationError("scheme needs 'rule' and 'trigger'");
  const auto rule = j.at("rule").get<std::string>();
  PaymentScheme s{FixedPayment{}, trigger_from_json(j.at("trigger"))};
  if (rule == "fixed") {
    s.rule = FixedPayment{num(j, "amount", "scheme")};
  } else if (rule == "linear") {
    s.rule = LinearPayment{num(j, "intercept", "scheme"), num(j, "slope", "scheme")};
  } else if (rule == "step") {
    StepPayment st{num(j, "base", "scheme"), {}, num_array(j.at("levels"), "levels")};
    for (const auto& b : j.at("bins")) st.bins.push_back(interval_from_json(b));
    if (st.bins.size() != st.levels.size()) throw ValidationError("step scheme needs one level per bin");
    s.rule = std::move(st);
  } else if (rule == "tabulated") {
    TabulatedCurve c{num_array(j.at("theta"), "theta"), num_array(j.at("payment"), "payment")};
    if (c.theta.empty() || c.theta.size() != c.payment.size())
      throw ValidationError("tabulated scheme needs matching nonempty theta and payment arrays");
    for (std::size_t i = 1; i < c.theta.size(); ++i)
      if (!(c.theta[i] > c.theta[i - 1])) throw ValidationError("tabulated theta must be strictly increasing");
    s.rule = std::move(c);
  } else {
    throw ValidationError("unknown scheme rule '" + rule + "'");
  }
  return s;
}

CropConfig crop_config_from_json(const json& j) {
  const std::string where = "crop config";
  require_keys(j, {"farms", "radius", "mu", "sigma", "c_crit", "c_min", "threshold", "corr_length_factor", "seed"},
               where);
  CropConfig c;
  c.farms = static_cast<int>(num_or(j, "farms", c.farms, where));
  c.radius = num_or(j, "radius", c.radius, where);
  c.mu = num_or(j, "mu", c.mu, where);
  c.sigma = num_or(j, "sigma", c.sigma, where);
  c.c_crit = num_or(j, "c_crit", c.c_crit, where);
  c.c_min = num_or(j, "c_min", c.c_min, where);
  c.threshold = num_or(j, "threshold", c.threshold, where);
  c.corr_length_factor = num_or(j, "corr_length_factor", c.corr_length_factor, where);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  c.validate();
  return c;
}

json crop_config_to_json(const CropConfig& c) {
  return {{"farms", c.farms},         {"radius", c.radius}, {"mu", c.mu},
          {"sigma", c.sigma},         {"c_crit", c.c_crit}, {"c_min", c.c_min},
          {"threshold", c.threshold}, {"corr_length_factor", c.corr_length_factor},
          {"seed", c.seed}};
}

StudyConfig study_config_from_json(const json& j) {
  const std::string where = "study config";
  StudyConfig c;
  if (j.contains("services")) {
    c.services.clear();
    for (const auto& s : j.at("services")) {
      require_keys(s, {"alpha", "beta"}, "service");
      c.services.push_back({num(s, "alpha", "service"), num(s, "beta", "service")});
    }
  }
  if (j.contains("family")) c.durations.family = duration_family_from_string(j.at("family").get<std::string>());
  if (j.contains("durations")) {
    const auto& d = j.at("durations");
    require_keys(d, {"mu_a", "mu_b", "sigma_a", "sigma_b"}, "durations");
    c.durations.mu_a = num_or(d, "mu_a", c.durations.mu_a, "durations");
    c.durations.mu_b = num_or(d, "mu_b", c.durations.mu_b, "durations");
    c.durations.sigma_a = num_or(d, "sigma_a", c.durations.sigma_a, "durations");
    c.durations.sigma_b = num_or(d, "sigma_b", c.durations.sigma_b, "durations");
  }
  if (j.contains("cost")) {
    const auto& k = j.at("cost");
    require_keys(k, {"fix_base", "fix_mid", "fix_high", "var_base", "var_size2", "var_size3", "sigma_eps"}, "cost");
    c.cost.fix_base = num_or(k, "fix_base", c.cost.fix_base, "cost");
    c.cost.fix_mid = num_or(k, "fix_mid", c.cost.fix_mid, "cost");
    c.cost.fix_high = num_or(k, "fix_high", c.cost.fix_high, "cost");
    c.cost.var_base = num_or(k, "var_base", c.cost.var_base, "cost");
    c.cost.var_size2 = num_or(k, "var_size2", c.cost.var_size2, "cost");
    c.cost.var_size3 = num_or(k, "var_size3", c.cost.var_size3, "cost");
    c.cost.sigma_eps = num_or(k, "sigma_eps", c.cost.sigma_eps, "cost");
  }
  if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
  c.years = static_cast<int>(num_or(j, "years", c.years, where));
  c.runs = static_cast<int>(num_or(j, "runs", c.runs, where));
  c.records_runs = static_cast<int>(num_or(j, "records_runs", c.records_runs, where));
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("p_levels")) c.p_levels = num_array(j.at("p_levels"), "p_levels");
  if (j.contains("gammas")) c.gammas = num_array(j.at("gammas"), "gammas");
  if (j.contains("portfolio")) {
    for (const auto& p : j.at("portfolio")) {
      require_keys(p, {"sector", "size", "p_level"}, "policyholder");
      c.portfolio.push_back({sector_from_string(p.at("sector").get<std::string>()),
                             static_cast<int>(num(p, "size", "policyholder")), num(p, "p_level", "policyholder")});
    }
  }
  c.validate();
  return c;
}

json study_config_to_json(const StudyConfig& c) {
  json services = json::array();
  for (const auto& s : c.services) services.push_back({{"alpha", s.alpha}, {"beta", s.beta}});
  return {{"services", services},
          {"family", family_name(c.durations.family)},
          {"durations",
           {{"mu_a", c.durations.mu_a},
            {"mu_b", c.durations.mu_b},
            {"sigma_a", c.durations.sigma_a},
            {"sigma_b", c.durations.sigma_b}}},
          {"cost",
           {{"fix_base", c.cost.fix_base},
            {"fix_mid", c.cost.fix_mid},
            {"fix_high", c.cost.fix_high},
            {"var_base", c.cost.var_base},
            {"var_size2", c.cost.var_size2},
            {"var_size3", c.cost.var_size3},
            {"sigma_eps", c.cost.sigma_eps}}},
          {"mode", mode_name(c.mode)},
          {"years", c.years},
          {"runs", c.runs},
          {"records_runs", c.records_runs},
          {"seed", c.seed},
          {"p_levels", c.p_levels},
          {"gammas", c.gammas},
          {"custom_portfolio", !c.portfolio.empty()}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

std::string config_hash(const json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json metadata_json(const RunMeta& m) {
  return {{"tool", "expins"},
          {"version", kVersion},
          {"command", m.command},
          {"seed", m.seed},
          {"workers", m.workers},
          {"config_hash", m.hash}};
}

std::string metadata_comment(const RunMeta& m) {
  std::ostringstream os;
  os << "# tool=expins version=" << kVersion << " command=" << m.command << " seed=" << m.seed
     << " workers=" << m.workers << " config_hash=" << m.hash;
  return os.str();
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError("CSV is missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const auto c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
      const auto b = cur.find_first_not_of(" \t\r");
      const auto e = cur.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw ValidationError("CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                            " fields, expected " + std::to_string(t.header.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw ValidationError("CSV line " + std::to_string(lineno) + ": '" + c + "' is not a number");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ValidationError("CSV '" + path + "' has no header");
  return t;
}

CsvWriter::CsvWriter(const std::string& path, const RunMeta& meta, const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw ValidationError("cannot write '" + path + "'");
  out_ << metadata_comment(meta) << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(fmt(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (!first_) out_ << ',';
  out_ << v;
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace expins
