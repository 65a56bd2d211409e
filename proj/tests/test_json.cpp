#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "expins/errors.hpp"
#include "expins/expectile.hpp"
#include "expins/json_io.hpp"

using namespace expins;

TEST_SUITE("json_io") {
  TEST_CASE("distribution specs") {
    const auto ln = distribution_from_json(json::parse(R"({"family":"lognormal","mu":0.2,"sigma":0.7})"));
    CHECK(mean(ln) == doctest::Approx(std::exp(0.2 + 0.245)));
    const auto tg = distribution_from_json(
        json::parse(R"({"family":"gamma","shape":2,"scale":3,"truncate_at_quantile":0.4,"affine_scale":2})"));
    CHECK(tg.family() == Family::kTruncatedGamma);
    CHECK(tg.scale() == 2.0);
    CHECK(support(tg).lo == doctest::Approx(2.0 * quantile(Distribution::gamma(2, 3), 0.4)));
    const auto disc = distribution_from_json(json::parse(R"({"family":"discrete","atoms":[[0,0.25],[4,0.75]]})"));
    CHECK(mean(disc) == doctest::Approx(3.0));
    CHECK_THROWS_AS(distribution_from_json(json::parse(R"({"family":"normal","mu":0})")), ValidationError);
    CHECK_THROWS_AS(distribution_from_json(json::parse(R"({"family":"normal","mu":0,"sigma":1,"bogus":1})")),
                    ValidationError);
    CHECK_THROWS_AS(distribution_from_json(json::parse(R"({"family":"cauchy"})")), ValidationError);
    CHECK_THROWS_AS(distribution_from_json(json::parse(
                        R"({"family":"lognormal","mu":0,"sigma":1,"truncate_at":1,"truncate_at_quantile":0.2})")),
                    ValidationError);
  }

  TEST_CASE("schemes round trip") {
    const PaymentScheme step{StepPayment{1.0, {{0.0, 2.0, true, false}, {2.0, 5.0, true, true}}, {3.0, 4.0}},
                             TriggerArea::above(0.5)};
    const PaymentScheme tab{TabulatedCurve{{0.0, 1.0}, {5.0, 2.0}},
                            TriggerArea::interval({-std::numeric_limits<double>::infinity(), 3.0, false, true})};
    for (const auto& s : {step, tab}) {
      const auto back = scheme_from_json(json::parse(scheme_to_json(s).dump()));
      CHECK(scheme_to_json(back) == scheme_to_json(s));
      for (double t : {-1.0, 0.5, 0.7, 1.5, 2.0, 3.0, 4.0, 6.0}) CHECK(back.payout(t) == s.payout(t));
    }
    CHECK_THROWS_AS(scheme_from_json(json::parse(R"({"rule":"fixed"})")), ValidationError);
    CHECK_THROWS_AS(trigger_from_json(json::parse(R"({"above":1,"below":2})")), ValidationError);
  }

  TEST_CASE("study and crop configs round trip") {
    StudyConfig s;
    s.runs = 17;
    s.mode = ContractMode::kStatic;
    s.durations.family = DurationFamily::kGamma;
    const auto back = study_config_from_json(study_config_to_json(s));
    CHECK(back.runs == 17);
    CHECK(back.mode == ContractMode::kStatic);
    CHECK(back.durations.family == DurationFamily::kGamma);
    CHECK(study_config_to_json(back) == study_config_to_json(s));
    CropConfig c;
    c.farms = 12;
    CHECK(crop_config_to_json(crop_config_from_json(crop_config_to_json(c))) == crop_config_to_json(c));
    CHECK_THROWS_AS(crop_config_from_json(json::parse(R"({"farm":3})")), ValidationError);
  }

  TEST_CASE("hash is insensitive to key order") {
    CHECK(config_hash(json::parse(R"({"a":1,"b":[1,2]})")) == config_hash(json::parse(R"({"b":[1,2],"a":1})")));
    CHECK(config_hash(json::parse(R"({"a":1})")) != config_hash(json::parse(R"({"a":2})")));
    CHECK(config_hash(json::object()).size() == 16);
  }

  TEST_CASE("csv writer and reader agree") {
    const auto path = (std::filesystem::temp_directory_path() / "expins_csv_test.csv").string();
    {
      CsvWriter w(path, RunMeta{"test", 3, 1, "abc"}, {"s", "theta"});
      w.cell(0.1).cell(1e-300).end_row();
      w.cell(-2.5).cell(3.0).end_row();
    }
    const auto t = read_csv(path);
    CHECK(t.header == std::vector<std::string>{"s", "theta"});
    CHECK(t.values("s")[0] == 0.1);
    CHECK(t.values("theta")[0] == 1e-300);
    CHECK_THROWS_AS(t.column("x"), ValidationError);
    {
      std::ofstream bad(path);
      bad << "s,theta\n1,abc\n";
    }
    CHECK_THROWS_AS(read_csv(path), ValidationError);
    std::remove(path.c_str());
    CHECK(fmt(0.1) == "0.1");
    CHECK(metadata_comment(RunMeta{"fit", 3, 2, "h"}).rfind("# tool=expins", 0) == 0);
  }
}
