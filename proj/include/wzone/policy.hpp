#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wzone/channel.hpp"
#include "wzone/claim.hpp"
#include "wzone/crypto.hpp"
#include "wzone/encoding.hpp"
#include "wzone/sensing.hpp"
#include "wzone/zone.hpp"

namespace wzone {

enum class RequirementKind : std::uint8_t {
  distance_bound = 0,
  rf_similarity = 1,
  visual_similarity = 2,
  audio_hash_match = 3,
  beacon_overlap = 4,
  imu_pattern = 5,
};

inline constexpr RequirementKind kAllRequirementKinds[] = {
    RequirementKind::distance_bound,   RequirementKind::rf_similarity,
    RequirementKind::visual_similarity, RequirementKind::audio_hash_match,
    RequirementKind::beacon_overlap,   RequirementKind::imu_pattern,
};

inline std::string_view requirement_name(RequirementKind k) {
  switch (k) {
    case RequirementKind::distance_bound: return "distance_bound";
    case RequirementKind::rf_similarity: return "rf_similarity";
    case RequirementKind::visual_similarity: return "visual_similarity";
    case RequirementKind::audio_hash_match: return "audio_hash_match";
    case RequirementKind::beacon_overlap: return "beacon_overlap";
    case RequirementKind::imu_pattern: return "imu_pattern";
  }
  return "unknown";
}

inline std::optional<RequirementKind> requirement_from_name(std::string_view name) {
  for (auto k : kAllRequirementKinds)
    if (requirement_name(k) == name) return k;
  return std::nullopt;
}

/// One admission requirement. `threshold` is meters for distance_bound,
/// a similarity in [0, 1] for rf/visual, and a count for beacon_overlap.
/// audio_hash_match and imu_pattern are flags and carry no threshold.
struct Requirement {
  RequirementKind kind = RequirementKind::distance_bound;
  double threshold = 0.0;
  std::string metric;  // optional comparison metric name
  std::string query;   // visual: semantic label to confirm
  std::string pattern; // imu: expected motion pattern name

  friend bool operator==(const Requirement&, const Requirement&) = default;
};

enum class OnFail : std::uint8_t { reject = 0 };

/// Versioned admission policy (Admit_v).
struct Policy {
  std::string policy_id;
  std::string zone_id;
  double interval = 2.0;  // seconds
  int quorum_k = 3;
  int quorum_n = 4;
  std::vector<Requirement> requirements;
  OnFail on_fail = OnFail::reject;

  friend bool operator==(const Policy&, const Policy&) = default;

  [[nodiscard]] const Requirement* find(RequirementKind kind) const {
    for (const auto& r : requirements)
      if (r.kind == kind) return &r;
    return nullptr;
  }
};

enum class PolicyErrorCode {
  syntax_error,
  unknown_key,
  unknown_requirement,
  threshold_out_of_range,
  missing_quorum,
  missing_field,
  invalid_value,
  quorum_invariant,
};

inline std::string_view policy_error_name(PolicyErrorCode c) {
  switch (c) {
    case PolicyErrorCode::syntax_error: return "syntax error";
    case PolicyErrorCode::unknown_key: return "unknown key";
    case PolicyErrorCode::unknown_requirement: return "unknown requirement kind";
    case PolicyErrorCode::threshold_out_of_range: return "threshold out of range";
    case PolicyErrorCode::missing_quorum: return "missing quorum";
    case PolicyErrorCode::missing_field: return "missing field";
    case PolicyErrorCode::invalid_value: return "invalid value";
    case PolicyErrorCode::quorum_invariant: return "quorum invariant violated";
  }
  return "policy error";
}

class PolicyParseError : public ConfigError {
 public:
  PolicyParseError(PolicyErrorCode code, const std::string& detail)
      : ConfigError(std::string(policy_error_name(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] PolicyErrorCode code() const { return code_; }

 private:
  PolicyErrorCode code_;
};

namespace detail {

inline std::string node_text(const YAML::Node& n, const std::string& where) {
  if (!n.IsScalar())
    throw PolicyParseError(PolicyErrorCode::invalid_value, where + " must be a scalar");
  return n.Scalar();
}

/// Number with an optional unit suffix ("20m", "2s", "0.70").
inline double parse_quantity(const YAML::Node& n, std::string_view unit, const std::string& where) {
  std::string text = node_text(n, where);
  if (!unit.empty() && text.size() > unit.size() && text.ends_with(unit))
    text.resize(text.size() - unit.size());
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw PolicyParseError(PolicyErrorCode::invalid_value, where + " is not a number: '" + n.Scalar() + "'");
  return v;
}

inline int parse_int(const YAML::Node& n, const std::string& where) {
  const std::string text = node_text(n, where);
  int v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw PolicyParseError(PolicyErrorCode::invalid_value, where + " is not an integer: '" + text + "'");
  return v;
}

inline bool parse_flag(const YAML::Node& n, const std::string& where) {
  const std::string text = node_text(n, where);
  if (text == "true") return true;
  if (text == "false") return false;
  throw PolicyParseError(PolicyErrorCode::invalid_value, where + " must be true or false");
}

/// Iterates a mapping, rejecting duplicate keys and keys outside `allowed`.
template <class F>
void for_each_key(const YAML::Node& map, const std::string& where, std::initializer_list<std::string_view> allowed,
                  F&& on_key) {
  if (!map.IsMap()) throw PolicyParseError(PolicyErrorCode::invalid_value, where + " must be a mapping");
  std::set<std::string> seen;
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!seen.insert(key).second)
      throw PolicyParseError(PolicyErrorCode::syntax_error, "duplicate key '" + key + "' in " + where);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw PolicyParseError(PolicyErrorCode::unknown_key, "'" + key + "' in " + where);
    on_key(key, kv.second);
  }
}

inline void require_unit_interval(double v, const std::string& where) {
  if (!(v >= 0.0 && v <= 1.0))
    throw PolicyParseError(PolicyErrorCode::threshold_out_of_range,
                           where + " = " + real_to_text(v) + " outside [0, 1]");
}

inline Requirement parse_requirement(RequirementKind kind, const YAML::Node& body) {
  const std::string where = "requirements." + std::string(requirement_name(kind));
  Requirement r;
  r.kind = kind;
  switch (kind) {
    case RequirementKind::distance_bound: {
      bool have = false;
      for_each_key(body, where, {"max_distance"}, [&](const std::string&, const YAML::Node& v) {
        r.threshold = parse_quantity(v, "m", where + ".max_distance");
        have = true;
      });
      if (!have) throw PolicyParseError(PolicyErrorCode::missing_field, where + ".max_distance");
      if (!(r.threshold > 0.0))
        throw PolicyParseError(PolicyErrorCode::threshold_out_of_range, where + ".max_distance must be > 0");
      break;
    }
    case RequirementKind::rf_similarity:
    case RequirementKind::visual_similarity: {
      bool have = false;
      const bool visual = kind == RequirementKind::visual_similarity;
      auto on_key = [&](const std::string& key, const YAML::Node& v) {
        if (key == "threshold") {
          r.threshold = parse_quantity(v, "", where + ".threshold");
          require_unit_interval(r.threshold, where + ".threshold");
          have = true;
        } else if (key == "metric") {
          r.metric = node_text(v, where + ".metric");
        } else if (key == "query") {
          r.query = node_text(v, where + ".query");
        }
      };
      if (visual) {
        for_each_key(body, where, {"threshold", "metric", "query"}, on_key);
      } else {
        for_each_key(body, where, {"threshold", "metric"}, on_key);
      }
      if (!have) throw PolicyParseError(PolicyErrorCode::missing_field, where + ".threshold");
      break;
    }
    case RequirementKind::audio_hash_match:
      if (!parse_flag(body, where))
        throw PolicyParseError(PolicyErrorCode::invalid_value, where + " must be true when present");
      break;
    case RequirementKind::imu_pattern:
      if (body.IsScalar()) {
        if (!parse_flag(body, where))
          throw PolicyParseError(PolicyErrorCode::invalid_value, where + " must be true when present");
      } else {
        for_each_key(body, where, {"pattern"}, [&](const std::string&, const YAML::Node& v) {
          r.pattern = node_text(v, where + ".pattern");
        });
      }
      break;
    case RequirementKind::beacon_overlap: {
      bool have = false;
      for_each_key(body, where, {"min_count"}, [&](const std::string&, const YAML::Node& v) {
        r.threshold = parse_int(v, where + ".min_count");
        have = true;
      });
      if (!have) throw PolicyParseError(PolicyErrorCode::missing_field, where + ".min_count");
      if (r.threshold < 1.0)
        throw PolicyParseError(PolicyErrorCode::threshold_out_of_range, where + ".min_count must be >= 1");
      break;
    }
  }
  return r;
}

}  // namespace detail

/// Builds a Policy from an already-parsed YAML mapping.
inline Policy policy_from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) throw PolicyParseError(PolicyErrorCode::syntax_error, "policy document must be a mapping");
  Policy p;
  bool have_id = false, have_zone = false, have_interval = false, have_quorum = false, have_reqs = false;
  detail::for_each_key(
      root, "policy document", {"policy", "zone_id", "interval", "quorum", "requirements", "on_fail"},
      [&](const std::string& key, const YAML::Node& v) {
        if (key == "policy") {
          p.policy_id = detail::node_text(v, "policy");
          have_id = true;
        } else if (key == "zone_id") {
          p.zone_id = detail::node_text(v, "zone_id");
          have_zone = true;
        } else if (key == "interval") {
          p.interval = detail::parse_quantity(v, "s", "interval");
          have_interval = true;
        } else if (key == "quorum") {
          bool have_k = false, have_n = false;
          detail::for_each_key(v, "quorum", {"k", "n"}, [&](const std::string& qk, const YAML::Node& qv) {
            if (qk == "k") {
              p.quorum_k = detail::parse_int(qv, "quorum.k");
              have_k = true;
            } else {
              p.quorum_n = detail::parse_int(qv, "quorum.n");
              have_n = true;
            }
          });
          if (!have_k || !have_n)
            throw PolicyParseError(PolicyErrorCode::missing_quorum, "quorum requires both k and n");
          have_quorum = true;
        } else if (key == "requirements") {
          if (!v.IsMap())
            throw PolicyParseError(PolicyErrorCode::invalid_value, "requirements must be a mapping");
          std::set<std::string> seen;
          for (const auto& kv : v) {
            const std::string name = kv.first.as<std::string>();
            if (!seen.insert(name).second)
              throw PolicyParseError(PolicyErrorCode::syntax_error, "duplicate requirement '" + name + "'");
            auto kind = requirement_from_name(name);
            if (!kind) throw PolicyParseError(PolicyErrorCode::unknown_requirement, "'" + name + "'");
            p.requirements.push_back(detail::parse_requirement(*kind, kv.second));
          }
          have_reqs = true;
        } else if (key == "on_fail") {
          const std::string action = detail::node_text(v, "on_fail");
          if (action != "reject")
            throw PolicyParseError(PolicyErrorCode::invalid_value, "on_fail '" + action + "' (only reject)");
          p.on_fail = OnFail::reject;
        }
      });
  if (!have_id || p.policy_id.empty()) throw PolicyParseError(PolicyErrorCode::missing_field, "policy");
  if (!have_zone || p.zone_id.empty()) throw PolicyParseError(PolicyErrorCode::missing_field, "zone_id");
  if (!have_interval) throw PolicyParseError(PolicyErrorCode::missing_field, "interval");
  if (!have_quorum) throw PolicyParseError(PolicyErrorCode::missing_quorum, "quorum section absent");
  if (!have_reqs) throw PolicyParseError(PolicyErrorCode::missing_field, "requirements");
  if (!(p.interval > 0.0)) throw PolicyParseError(PolicyErrorCode::threshold_out_of_range, "interval must be > 0");
  if (p.quorum_k < 1 || p.quorum_n < 1)
    throw PolicyParseError(PolicyErrorCode::quorum_invariant, "quorum k and n must be positive");
  if (p.quorum_k > p.quorum_n)
    throw PolicyParseError(PolicyErrorCode::quorum_invariant, "quorum.k (" + std::to_string(p.quorum_k) +
                                                                  ") > quorum.n (" + std::to_string(p.quorum_n) + ")");
  return p;
}

/// Parses the indentation-based policy document format.
inline Policy parse_policy(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw PolicyParseError(PolicyErrorCode::syntax_error, e.what());
  }
  try {
    return policy_from_yaml(root);
  } catch (const YAML::Exception& e) {
    throw PolicyParseError(PolicyErrorCode::syntax_error, e.what());
  }
}

/// Emits a policy in the same document layout parse_policy reads.
inline std::string serialize_policy(const Policy& p) {
  std::ostringstream out;
  const std::string in1(4, ' '), in2(8, ' ');
  out << "policy: " << p.policy_id << "\n";
  out << "zone_id: " << p.zone_id << "\n";
  out << "interval: " << real_to_text(p.interval) << "s\n";
  out << "quorum:\n" << in1 << "k: " << p.quorum_k << "\n" << in1 << "n: " << p.quorum_n << "\n";
  out << "requirements:\n";
  for (const auto& r : p.requirements) {
    out << in1 << requirement_name(r.kind) << ":";
    switch (r.kind) {
      case RequirementKind::distance_bound:
        out << "\n" << in2 << "max_distance: " << real_to_text(r.threshold) << "m\n";
        break;
      case RequirementKind::rf_similarity:
      case RequirementKind::visual_similarity:
        out << "\n";
        if (!r.metric.empty()) out << in2 << "metric: " << r.metric << "\n";
        out << in2 << "threshold: " << real_to_text(r.threshold) << "\n";
        if (!r.query.empty()) out << in2 << "query: " << r.query << "\n";
        break;
      case RequirementKind::audio_hash_match:
        out << " true\n";
        break;
      case RequirementKind::imu_pattern:
        if (r.pattern.empty()) {
          out << " true\n";
        } else {
          out << "\n" << in2 << "pattern: " << r.pattern << "\n";
        }
        break;
      case RequirementKind::beacon_overlap:
        out << "\n" << in2 << "min_count: " << static_cast<long long>(r.threshold) << "\n";
        break;
    }
  }
  out << "on_fail: reject\n";
  return out.str();
}

// Built-in policies used by the simulator scenarios.

inline Policy supply_chain_policy(const std::string& zone_id = "Z-1", int k = 3, int n = 4,
                                  double interval = 2.0) {
  Policy p;
  p.policy_id = "supply_chain_v1";
  p.zone_id = zone_id;
  p.interval = interval;
  p.quorum_k = k;
  p.quorum_n = n;
  p.requirements = {{RequirementKind::distance_bound, 20.0, "", "", ""},
                    {RequirementKind::rf_similarity, 0.5, "", "", ""}};
  return p;
}

inline Policy visual_policy(const std::string& zone_id = "Z-1", int k = 3, int n = 4, double interval = 2.0,
                            const std::string& query = "red car") {
  Policy p = supply_chain_policy(zone_id, k, n, interval);
  p.policy_id = "visual_v1";
  p.requirements.push_back({RequirementKind::visual_similarity, 0.7, "", query, ""});
  return p;
}

inline std::set<std::string> builtin_policy_ids() { return {"supply_chain_v1", "visual_v1"}; }

/// Adds the zone's calibrated noise allowance (d_acc - d_max) to a policy's
/// max_distance; with max_distance == d_max the gate is exactly d_acc.
struct DistanceGate {
  double noise_margin = 0.0;

  static DistanceGate for_zone(const ZoneConfig& z) { return {z.d_acc - z.d_max}; }
};

struct RequirementOutcome {
  RequirementKind kind = RequirementKind::distance_bound;
  bool satisfied = false;

  friend bool operator==(const RequirementOutcome&, const RequirementOutcome&) = default;
};

inline void encode_outcomes(Encoder& e, const std::vector<RequirementOutcome>& outcomes) {
  e.sequence(outcomes, [](Encoder& n, const RequirementOutcome& o) {
    n.u64(static_cast<std::uint64_t>(o.kind)).boolean(o.satisfied);
  });
}

struct AdmitDecision {
  bool admitted = false;
  std::vector<RequirementOutcome> per_requirement;
  Digest evaluated_inputs_digest{};

  [[nodiscard]] std::optional<bool> satisfied(RequirementKind kind) const {
    for (const auto& o : per_requirement)
      if (o.kind == kind) return o.satisfied;
    return std::nullopt;
  }
};

namespace detail {

inline const FeatureDescriptor* fresh_feature(std::span<const FeatureDescriptor> features, Modality m,
                                              double interval) {
  for (const auto& f : features)
    if (f.modality == m && f.freshness >= 0.0 && f.freshness < interval) return &f;
  return nullptr;
}

inline bool value_passes(const FeatureDescriptor& f, double threshold) {
  if (const bool* b = std::get_if<bool>(&f.value)) return *b;
  return std::get<double>(f.value) > threshold;
}

}  // namespace detail

/// Evaluates each requirement in policy order. A missing or stale feature
/// leaves its requirement unsatisfied.
inline std::vector<RequirementOutcome> evaluate_requirements(const Policy& policy, const RangingResult& ranging,
                                                             std::span<const FeatureDescriptor> features,
                                                             DistanceGate gate = {}) {
  std::vector<RequirementOutcome> out;
  out.reserve(policy.requirements.size());
  for (const auto& r : policy.requirements) {
    bool ok = false;
    switch (r.kind) {
      case RequirementKind::distance_bound:
        ok = ranging.estimate <= r.threshold + gate.noise_margin;
        break;
      case RequirementKind::rf_similarity:
        if (auto* f = detail::fresh_feature(features, Modality::rf_fingerprint, policy.interval))
          ok = detail::value_passes(*f, r.threshold);
        break;
      case RequirementKind::visual_similarity:
        if (auto* f = detail::fresh_feature(features, Modality::visual, policy.interval))
          ok = detail::value_passes(*f, r.threshold);
        break;
      case RequirementKind::audio_hash_match:
        if (auto* f = detail::fresh_feature(features, Modality::audio, policy.interval))
          ok = detail::value_passes(*f, 0.0);
        break;
      case RequirementKind::imu_pattern:
        if (auto* f = detail::fresh_feature(features, Modality::imu, policy.interval))
          ok = detail::value_passes(*f, 0.0);
        break;
      case RequirementKind::beacon_overlap:
        if (auto* f = detail::fresh_feature(features, Modality::beacon, policy.interval))
          ok = f->as_number() >= r.threshold;
        break;
    }
    out.push_back({r.kind, ok});
  }
  return out;
}

/// Admit_v(c, phi_P, phi_j, db_j): conjunction of the policy requirements,
/// plus a digest over every input that influenced the decision.
inline AdmitDecision evaluate_admit(const Policy& policy, const Claim& claim, const RangingResult& ranging,
                                    std::span<const FeatureDescriptor> features, DistanceGate gate = {}) {
  AdmitDecision d;
  d.per_requirement = evaluate_requirements(policy, ranging, features, gate);
  d.admitted = std::all_of(d.per_requirement.begin(), d.per_requirement.end(),
                           [](const RequirementOutcome& o) { return o.satisfied; });
  Encoder e;
  e.str("wzone/admit/v1").str(policy.policy_id).bytes(claim.claim_id).real(ranging.estimate);
  e.sequence(claim.disclosed_features, [](Encoder& n, const FeatureDescriptor& f) { encode_fields(n, f); });
  e.sequence(features, [](Encoder& n, const FeatureDescriptor& f) { encode_fields(n, f); });
  encode_outcomes(e, d.per_requirement);
  d.evaluated_inputs_digest = sha256(e.data());
  return d;
}

}  // namespace wzone
