#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

namespace wzone {
namespace {

Summary sample(bool defined) {
  Summary s;
  s.scenario = defined ? "baseline_4w" : "distance_fraud";
  s.seed = 42;
  s.iterations = 1000;
  s.claims_per_run = 30;
  s.success_rate_mean = defined ? 1.0 : 0.0;
  s.success_rate_std = 0.0;
  if (defined) {
    s.precision = 1.0;
    s.recall = 1.0;
    s.tp = 30000;
  } else {
    s.tn = 30000;
  }
  s.admitted_mean = defined ? 30.0 : 0.0;
  return s;
}

void expect_same(const Summary& a, const Summary& b) {
  EXPECT_EQ(a.scenario, b.scenario);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.success_rate_mean, b.success_rate_mean);
  EXPECT_EQ(a.success_rate_std, b.success_rate_std);
  EXPECT_EQ(a.precision, b.precision);
  EXPECT_EQ(a.recall, b.recall);
  EXPECT_EQ(a.admitted_mean, b.admitted_mean);
  EXPECT_EQ(a.tp, b.tp);
  EXPECT_EQ(a.tn, b.tn);
}

TEST(Report, JsonRoundTrip) {
  for (bool d : {true, false}) {
    const Summary s = sample(d);
    const auto j = summary_to_json(s);
    EXPECT_EQ(j["precision"].is_null(), !d);
    expect_same(summary_from_json(ordered_json::parse(j.dump())), s);
  }
  // Awkward reals survive text round trip exactly.
  Summary s = sample(true);
  s.success_rate_mean = 0.33999999999999986;
  expect_same(summary_from_json(ordered_json::parse(summary_to_json(s).dump())), s);
}

TEST(Report, CsvRoundTrip) {
  std::vector<Summary> rows{sample(true), sample(false)};
  rows[0].success_rate_std = 0.0929755045398756;
  std::stringstream out;
  write_summary_csv(out, rows);
  const auto back = read_summary_csv(out);
  ASSERT_EQ(back.size(), 2u);
  expect_same(back[0], rows[0]);
  expect_same(back[1], rows[1]);
  std::stringstream bad("nope\n");
  EXPECT_THROW(read_summary_csv(bad), ConfigError);
}

TEST(Report, TableLayout) {
  const std::string t = render_table({ReportRow::from(sample(true)), ReportRow::from(sample(false))});
  std::istringstream lines(t);
  std::string header, base, fraud;
  std::getline(lines, header);
  std::getline(lines, base);
  std::getline(lines, fraud);
  EXPECT_NE(header.find("Scenario"), std::string::npos);
  EXPECT_NE(header.find("Precision"), std::string::npos);
  EXPECT_EQ(base.rfind("Baseline (4W)", 0), 0u);
  EXPECT_NE(base.find("1.000 +/- 0.00"), std::string::npos);
  EXPECT_NE(base.find("1.00 "), std::string::npos);
  EXPECT_NE(base.find("30.0/30"), std::string::npos);
  EXPECT_EQ(fraud.rfind("Distance Fraud", 0), 0u);
  EXPECT_NE(fraud.find("N/A"), std::string::npos);
  EXPECT_NE(fraud.find("0.0/30"), std::string::npos);
}

TEST(Report, RegistryJsonRoundTrip) {
  const auto cfg = build_scenario("baseline_6w");
  const auto nodes = make_witness_nodes(cfg);
  const auto reg = make_registry(cfg, nodes);
  const auto back = registry_from_json(ordered_json::parse(registry_to_json(reg).dump()));
  EXPECT_EQ(back.zone_id, reg.zone_id);
  EXPECT_EQ(back.quorum_k, reg.quorum_k);
  EXPECT_EQ(back.policies, reg.policies);
  ASSERT_EQ(back.witnesses.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(back.witnesses[i].public_key, reg.witnesses[i].public_key);
    EXPECT_EQ(back.witnesses[i].position, reg.witnesses[i].position);
  }
}

}  // namespace
}  // namespace wzone
