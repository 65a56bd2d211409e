#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "expins/crop_case.hpp"
#include "expins/cyber_sim.hpp"
#include "expins/distributions.hpp"
#include "expins/payment_design.hpp"

namespace expins {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// {"family": "lognormal", "mu": 0, "sigma": 1, "truncate_at_quantile": 0.05}
/// Families: normal, lognormal, gamma (shape, scale), crop_loss (mu, sigma,
/// c_crit, c_min), empirical (samples), discrete (atoms: [[value, prob], ...]).
/// lognormal and gamma accept truncate_at or truncate_at_quantile; any family
/// accepts an affine "shift" and "scale".
Distribution distribution_from_json(const json& j);

TriggerArea trigger_from_json(const json& j);
json trigger_to_json(const TriggerArea& t);
Interval interval_from_json(const json& j);

json scheme_to_json(const PaymentScheme& s);
PaymentScheme scheme_from_json(const json& j);

CropConfig crop_config_from_json(const json& j);
json crop_config_to_json(const CropConfig& c);

StudyConfig study_config_from_json(const json& j);
json study_config_to_json(const StudyConfig& c);

/// Rejects keys outside `allowed`, naming the first offender.
void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where);

/// Reads and parses a JSON file (ValidationError on failure).
json read_json_file(const std::string& path);

/// FNV-1a 64-bit hash of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const json& config);

struct RunMeta {
  std::string command;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string hash;
};

json metadata_json(const RunMeta& m);
/// "# tool=expins version=... command=... seed=... workers=... config_hash=..."
std::string metadata_comment(const RunMeta& m);

/// Shortest round-trip decimal representation, '.' separator, locale free.
std::string fmt(double v);

/// Simple numeric CSV table with a header row. Lines starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // ValidationError if missing
  std::vector<double> values(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const RunMeta& meta, const std::vector<std::string>& header);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

void write_json_file(const std::string& path, const json& j);

}  // namespace expins
