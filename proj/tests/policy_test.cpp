#include <gtest/gtest.h>

#include <string>

#include "test_support.hpp"

namespace wzone {
namespace {

using testing::read_text;

const std::string kMediaListing = R"(policy: media_v2
zone_id: Z-17
interval: 2s
quorum:
    k: 3
    n: 4
requirements:
    distance_bound:
        max_distance: 20m
    visual_similarity:
        metric: vlm_embedding
        threshold: 0.70
    audio_hash_match: true
    beacon_overlap:
        min_count: 2
on_fail: reject
)";

PolicyErrorCode error_of(const std::string& text) {
  try {
    parse_policy(text);
  } catch (const PolicyParseError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return PolicyErrorCode::syntax_error;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

TEST(ParsePolicy, MediaListing) {
  const Policy p = parse_policy(kMediaListing);
  EXPECT_EQ(p.policy_id, "media_v2");
  EXPECT_EQ(p.zone_id, "Z-17");
  EXPECT_DOUBLE_EQ(p.interval, 2.0);
  EXPECT_EQ(p.quorum_k, 3);
  EXPECT_EQ(p.quorum_n, 4);
  ASSERT_EQ(p.requirements.size(), 4u);
  EXPECT_EQ(p.requirements[0].kind, RequirementKind::distance_bound);
  EXPECT_DOUBLE_EQ(p.requirements[0].threshold, 20.0);
  EXPECT_EQ(p.requirements[1].kind, RequirementKind::visual_similarity);
  EXPECT_DOUBLE_EQ(p.requirements[1].threshold, 0.70);
  EXPECT_EQ(p.requirements[1].metric, "vlm_embedding");
  EXPECT_EQ(p.requirements[2].kind, RequirementKind::audio_hash_match);
  EXPECT_EQ(p.requirements[3].kind, RequirementKind::beacon_overlap);
  EXPECT_DOUBLE_EQ(p.requirements[3].threshold, 2.0);
  EXPECT_EQ(p.on_fail, OnFail::reject);
}

TEST(ParsePolicy, SerializeReproducesListing) {
  EXPECT_EQ(serialize_policy(parse_policy(kMediaListing)), replace(kMediaListing, "0.70", "0.7"));
}

TEST(ParsePolicy, ShippedProfilesRoundTrip) {
  for (const char* name : {"cocoa_v1", "media_v2", "mobility_v3"}) {
    const std::string text = read_text(std::string(WZONE_SOURCE_DIR) + "/policies/" + name + ".yaml");
    const Policy p = parse_policy(text);
    EXPECT_EQ(p.policy_id, name);
    const Policy again = parse_policy(serialize_policy(p));
    EXPECT_EQ(again, p) << name;
    EXPECT_EQ(serialize_policy(again), serialize_policy(p));
  }
  EXPECT_EQ(parse_policy(read_text(std::string(WZONE_SOURCE_DIR) + "/policies/media_v2.yaml")),
            parse_policy(kMediaListing));
}

TEST(ParsePolicy, BuiltinsRoundTrip) {
  for (const Policy& p : {supply_chain_policy(), visual_policy()}) EXPECT_EQ(parse_policy(serialize_policy(p)), p);
}

TEST(ParsePolicy, Errors) {
  EXPECT_EQ(error_of(replace(kMediaListing, "k: 3", "k: 5")), PolicyErrorCode::quorum_invariant);
  EXPECT_EQ(error_of(replace(kMediaListing, "threshold: 0.70", "threshold: 1.5")),
            PolicyErrorCode::threshold_out_of_range);
  EXPECT_EQ(error_of(replace(kMediaListing, "audio_hash_match", "smell_match")),
            PolicyErrorCode::unknown_requirement);
  EXPECT_EQ(error_of(replace(kMediaListing, "on_fail: reject", "on_fail: reject\ncolour: red")),
            PolicyErrorCode::unknown_key);
  EXPECT_EQ(error_of(replace(kMediaListing, "quorum:\n    k: 3\n    n: 4\n", "")), PolicyErrorCode::missing_quorum);
  EXPECT_EQ(error_of(replace(kMediaListing, "policy: media_v2\n", "")), PolicyErrorCode::missing_field);
  EXPECT_EQ(error_of("policy: [unclosed"), PolicyErrorCode::syntax_error);
  EXPECT_EQ(error_of(replace(kMediaListing, "20m", "20kg")), PolicyErrorCode::invalid_value);
  EXPECT_EQ(error_of(replace(kMediaListing, "max_distance: 20m", "max_distance: -3m")),
            PolicyErrorCode::threshold_out_of_range);
}

FeatureDescriptor rf(double v, double fresh = 0.0) {
  return {Modality::rf_fingerprint, v, 1.0, fresh, "W1"};
}
FeatureDescriptor visual(bool v) { return {Modality::visual, v, 1.0, 0.0, "W1"}; }

RangingResult ranging(double estimate) {
  RangingResult r;
  r.estimate = estimate;
  return r;
}

const Claim kClaim = Claim::make(1, "Z-1", {5, 5, 0}, "red car");

TEST(EvaluateAdmit, SupplyChainExamples) {
  const Policy p = supply_chain_policy();
  const std::vector<FeatureDescriptor> good{rf(0.9)};
  auto d = evaluate_admit(p, kClaim, ranging(12.0), good);
  EXPECT_TRUE(d.admitted);

  d = evaluate_admit(p, kClaim, ranging(25.0), good);
  EXPECT_FALSE(d.admitted);
  EXPECT_EQ(d.satisfied(RequirementKind::distance_bound), false);
  EXPECT_EQ(d.satisfied(RequirementKind::rf_similarity), true);

  // Missing modality evaluates false rather than throwing.
  d = evaluate_admit(p, kClaim, ranging(12.0), {});
  EXPECT_FALSE(d.admitted);
  EXPECT_EQ(d.satisfied(RequirementKind::rf_similarity), false);

  // Stale feature is ignored.
  const std::vector<FeatureDescriptor> stale{rf(0.9, 2.0)};
  EXPECT_FALSE(evaluate_admit(p, kClaim, ranging(12.0), stale).admitted);

  // Similarity must be strictly above the threshold.
  const std::vector<FeatureDescriptor> edge{rf(0.5)};
  EXPECT_FALSE(evaluate_admit(p, kClaim, ranging(12.0), edge).admitted);
}

TEST(EvaluateAdmit, DistanceGateMargin) {
  const Policy p = supply_chain_policy();
  const std::vector<FeatureDescriptor> good{rf(0.9)};
  const DistanceGate gate = DistanceGate::for_zone(ZoneConfig{});
  EXPECT_FALSE(evaluate_admit(p, kClaim, ranging(20.5), good).admitted);
  EXPECT_TRUE(evaluate_admit(p, kClaim, ranging(20.5), good, gate).admitted);
  EXPECT_TRUE(evaluate_admit(p, kClaim, ranging(21.24), good, gate).admitted);
  EXPECT_FALSE(evaluate_admit(p, kClaim, ranging(21.25), good, gate).admitted);
}

TEST(EvaluateAdmit, VisualInvalidScene) {
  const Policy p = visual_policy();
  const std::vector<FeatureDescriptor> f{rf(0.9), visual(false)};
  const auto d = evaluate_admit(p, kClaim, ranging(8.0), f);
  EXPECT_FALSE(d.admitted);
  EXPECT_EQ(d.satisfied(RequirementKind::visual_similarity), false);
  EXPECT_EQ(d.satisfied(RequirementKind::distance_bound), true);
}

TEST(EvaluateAdmit, ConjunctionExhaustive) {
  Policy p = parse_policy(kMediaListing);
  p.requirements.push_back({RequirementKind::rf_similarity, 0.5, "", "", ""});
  p.requirements.push_back({RequirementKind::imu_pattern, 0.0, "", "", ""});
  // Six requirements; toggle each input between passing and failing.
  for (int mask = 0; mask < 64; ++mask) {
    const bool b[6] = {bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8), bool(mask & 16),
                       bool(mask & 32)};
    std::vector<FeatureDescriptor> f;
    f.push_back(visual(b[1]));
    f.push_back({Modality::audio, b[2], 1.0, 0.0, "W1"});
    f.push_back({Modality::beacon, b[3] ? 2.0 : 1.0, 1.0, 0.0, "W1"});
    f.push_back(rf(b[4] ? 0.9 : 0.2));
    f.push_back({Modality::imu, b[5], 1.0, 0.0, "W1"});
    const auto d = evaluate_admit(p, kClaim, ranging(b[0] ? 10.0 : 30.0), f);
    ASSERT_EQ(d.per_requirement.size(), 6u);
    bool all = true;
    for (int i = 0; i < 6; ++i) {
      EXPECT_EQ(d.per_requirement[i].satisfied, b[i]) << mask << " " << i;
      all &= b[i];
    }
    EXPECT_EQ(d.admitted, all);
  }
}

TEST(EvaluateAdmit, DeterministicDigest) {
  const Policy p = supply_chain_policy();
  const std::vector<FeatureDescriptor> f{rf(0.9)};
  const auto a = evaluate_admit(p, kClaim, ranging(12.0), f);
  const auto b = evaluate_admit(p, kClaim, ranging(12.0), f);
  EXPECT_EQ(a.evaluated_inputs_digest, b.evaluated_inputs_digest);
  const auto c = evaluate_admit(p, kClaim, ranging(12.5), f);
  EXPECT_NE(a.evaluated_inputs_digest, c.evaluated_inputs_digest);
}

// Tightening: a lower distance bound or a higher similarity threshold.
TEST(EvaluateAdmit, TighteningNeverAdmits) {
  RandomStream rng(31);
  for (int i = 0; i < 5000; ++i) {
    Policy p = visual_policy();
    const std::vector<FeatureDescriptor> f{rf(rng.uniform()), visual(rng.uniform() < 0.5)};
    const auto r = ranging(10 + rng.uniform() * 15);
    const bool before = evaluate_admit(p, kClaim, r, f).admitted;
    auto& req = p.requirements[rng.next_u64() % p.requirements.size()];
    if (req.kind == RequirementKind::distance_bound) {
      req.threshold -= rng.uniform() * 5.0;
    } else {
      req.threshold += rng.uniform() * 0.3;
    }
    if (!before) {
      EXPECT_FALSE(evaluate_admit(p, kClaim, r, f).admitted);
    }
  }
}

}  // namespace
}  // namespace wzone
