#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

namespace wzone {
namespace {

using testing::scenario;

TEST(BuildScenario, Definitions) {
  const auto b = build_scenario("baseline_4w");
  EXPECT_EQ(b.prover_true_pos, (Vector3{5, 5, 0}));
  EXPECT_EQ(b.zone.claim_count(), 30);
  EXPECT_EQ(b.policy.policy_id, "supply_chain_v1");
  EXPECT_EQ(build_scenario("baseline_6w").zone.witness_positions.size(), 6u);
  EXPECT_EQ(build_scenario("edge_position").prover_true_pos, (Vector3{9.28, 0, 0}));
  const auto f = build_scenario("distance_fraud");
  EXPECT_EQ(f.prover_true_pos, (Vector3{13, 13, 0}));
  EXPECT_EQ(f.prover_claimed_pos, (Vector3{5, 5, 0}));
  EXPECT_FALSE(claim_is_legitimate(f));
  EXPECT_FALSE(build_scenario("visual_invalid").scene.contains("red car"));
  EXPECT_TRUE(build_scenario("visual_valid").scene.contains("red car"));
  EXPECT_EQ(build_scenario("visual_valid").policy.policy_id, "visual_v1");
  EXPECT_THROW(build_scenario("nope"), ConfigError);
  for (const auto& n : builtin_scenario_names()) EXPECT_NO_THROW(build_scenario(n).validate());
}

TEST(Intervals, ClaimTimesMapToBlocks) {
  ZoneConfig z;
  EXPECT_EQ(interval_for(0, z), 1u);
  EXPECT_EQ(interval_for(seconds_to_sim(2.0), z), 2u);
  EXPECT_EQ(interval_for(seconds_to_sim(58.0), z), 30u);
  EXPECT_EQ(interval_for(seconds_to_sim(1.999), z), 1u);
}

TEST(RunScenario, BaselineAdmitsEveryClaim) {
  int full = 0;
  for (std::uint64_t s = 0; s < 40; ++s) full += run_scenario(scenario("baseline_4w", s)).admitted_count == 30;
  EXPECT_GE(full, 38);
}

TEST(RunScenario, FraudAdmitsNothing) {
  for (std::uint64_t s = 0; s < 40; ++s) EXPECT_EQ(run_scenario(scenario("distance_fraud", s)).admitted_count, 0);
}

TEST(RunScenario, StructureAndDeterminism) {
  const auto cfg = scenario("edge_position", 3);
  const RunResult a = run_scenario(cfg);
  const RunResult b = run_scenario(cfg);
  EXPECT_EQ(canonical_encode(a), canonical_encode(b));
  ASSERT_EQ(a.outcomes.size(), 30u);
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) EXPECT_EQ(a.outcomes[i].interval_index, i + 1);
  EXPECT_TRUE(verify_chain(a.chain));
  const auto nodes = make_witness_nodes(cfg);
  const auto registry = make_registry(cfg, nodes);
  for (const auto& o : a.outcomes) {
    if (!o.admitted) continue;
    EXPECT_TRUE(verify_evidence(*o.evidence, registry, registry.policies, std::span<const Block>(a.chain)).ok());
  }
  EXPECT_NE(canonical_encode(run_scenario(scenario("edge_position", 4))), canonical_encode(a));
  EXPECT_EQ(canonical_decode<RunResult>(canonical_encode(a)).admitted_count, a.admitted_count);
}

TEST(RunScenario, SparseClaimsLeaveEmptyBlocks) {
  auto cfg = scenario("baseline_4w");
  cfg.zone.claim_period_seconds = 6.0;
  const RunResult r = run_scenario(cfg);
  EXPECT_EQ(r.outcomes.size(), 10u);
  EXPECT_EQ(r.outcomes[1].interval_index, 4u);
  EXPECT_TRUE(verify_chain(r.chain));
  EXPECT_EQ(r.chain.size(), 29u);
  EXPECT_TRUE(r.chain[2].admitted_claim_ids.empty());
}

TEST(Summarize, PooledMetrics) {
  const auto cfg = build_scenario("edge_position");
  const std::vector<int> admitted{30, 15, 0, 15};
  const Summary s = summarize(cfg, admitted);
  EXPECT_DOUBLE_EQ(s.success_rate_mean, 0.5);
  EXPECT_NEAR(s.success_rate_std, std::sqrt((0.25 + 0 + 0.25 + 0) / 4.0), 1e-12);
  EXPECT_DOUBLE_EQ(s.admitted_mean, 15.0);
  EXPECT_EQ(s.tp, 60u);
  EXPECT_EQ(s.fn, 60u);
  EXPECT_EQ(s.fp, 0u);
  EXPECT_DOUBLE_EQ(*s.precision, 1.0);
  EXPECT_DOUBLE_EQ(*s.recall, 0.5);

  const Summary f = summarize(build_scenario("distance_fraud"), std::vector<int>{0, 0, 0});
  EXPECT_FALSE(f.precision);
  EXPECT_FALSE(f.recall);
  EXPECT_EQ(f.tn, 90u);

  const Summary g = summarize(build_scenario("distance_fraud"), std::vector<int>{1, 0});
  EXPECT_DOUBLE_EQ(*g.precision, 0.0);
  EXPECT_FALSE(g.recall);

  const Summary v = summarize(build_scenario("visual_invalid"), std::vector<int>{0, 0});
  EXPECT_FALSE(v.precision);
  EXPECT_DOUBLE_EQ(*v.recall, 0.0);
}

TEST(MonteCarlo, IndependentOfJobs) {
  const auto cfg = scenario("edge_position", 7);
  const Summary one = monte_carlo(cfg, 24, 1);
  const Summary four = monte_carlo(cfg, 24, 4);
  EXPECT_EQ(one.success_rate_mean, four.success_rate_mean);
  EXPECT_EQ(one.success_rate_std, four.success_rate_std);
  EXPECT_EQ(one.tp, four.tp);
  EXPECT_NEAR(one.success_rate_mean * 30, one.admitted_mean, 1e-9);
  EXPECT_THROW(monte_carlo(cfg, 0), ConfigError);
}

TEST(MonteCarlo, IterationSeeds) {
  auto cfg = scenario("edge_position", 100);
  const auto nodes = make_witness_nodes(cfg);
  const auto reg = make_registry(cfg, nodes);
  const Summary s = monte_carlo(cfg, 3);
  int total = 0;
  for (std::uint64_t i = 0; i < 3; ++i) total += run_scenario(cfg, nodes, reg, 100 + i).admitted_count;
  EXPECT_DOUBLE_EQ(s.admitted_mean, total / 3.0);
}

TEST(ParseScenario, ShippedFiles) {
  const std::string dir = std::string(WZONE_SOURCE_DIR) + "/scenarios/";
  const auto cocoa = load_scenario_file(dir + "cocoa_handoff.yaml");
  EXPECT_EQ(cocoa.name, "cocoa_handoff");
  EXPECT_EQ(cocoa.seed, 11u);
  EXPECT_EQ(cocoa.policy.policy_id, "cocoa_v1");
  EXPECT_EQ(cocoa.prover_true_pos, (Vector3{3, -4, 0}));
  EXPECT_THROW(load_scenario_file(dir + "bad_quorum.yaml"), ConfigError);
  const auto two = load_scenario_file(dir + "two_colluders.yaml");
  EXPECT_EQ(two.witness_behaviors[1], WitnessBehavior::colluder);
  EXPECT_FALSE(two.prover_honest);
  EXPECT_THROW(load_scenario_file(dir + "missing.yaml"), ConfigError);
}

TEST(ParseScenario, InlineDocument) {
  const auto s = parse_scenario(R"(
scenario: hex
base: baseline_6w
seed: 5
zone:
  quorum_k: 4
  d_acc: 21.5m
channel:
  mp_sigma: 0.4m
prover:
  true_position: [1, 2]
  claimed_position: [1, 2]
policy:
  policy: hex_v1
  zone_id: Z-1
  interval: 2s
  quorum:
    k: 4
    n: 6
  requirements:
    distance_bound:
      max_distance: 20m
  on_fail: reject
)");
  EXPECT_EQ(s.zone.witness_count, 6);
  EXPECT_EQ(s.zone.quorum_k, 4);
  EXPECT_DOUBLE_EQ(s.zone.d_acc, 21.5);
  EXPECT_DOUBLE_EQ(s.zone.channel.mp_sigma, 0.4);
  EXPECT_EQ(s.policy.policy_id, "hex_v1");
  EXPECT_EQ(run_scenario(s).admitted_count, 30);
}

TEST(ParseScenario, Errors) {
  EXPECT_THROW(parse_scenario("zone: {quorum_k: 5}"), ConfigError);
  EXPECT_THROW(parse_scenario("colour: red"), ConfigError);
  EXPECT_THROW(parse_scenario("zone: {witness_count: 5}"), ConfigError);
  EXPECT_THROW(parse_scenario("policy: unknown_v9"), ConfigError);
  EXPECT_THROW(parse_scenario("witness_behaviors: [honest, honest]"), ConfigError);
  EXPECT_THROW(parse_scenario("witness_behaviors: [honest, sleepy, honest, honest]"), ConfigError);
  EXPECT_THROW(parse_scenario("[1, 2"), ConfigError);
  EXPECT_THROW(parse_scenario("scene: {p_det: 1.5}"), ConfigError);
}

}  // namespace
}  // namespace wzone
