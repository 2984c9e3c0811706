#pragma once

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wzone/geometry.hpp"
#include "wzone/policy.hpp"
#include "wzone/sensing.hpp"
#include "wzone/witness.hpp"
#include "wzone/zone.hpp"

namespace wzone {

struct ScenarioConfig {
  std::string name;
  ZoneConfig zone;
  Vector3 prover_true_pos{};
  Vector3 prover_claimed_pos{};
  bool prover_honest = true;
  ProverTiming prover_timing{};
  std::string payload = "context claim";
  Policy policy;
  Scene scene;
  double p_det = 0.982;
  std::vector<WitnessBehavior> witness_behaviors;
  std::uint64_t seed = 0;

  void validate() const {
    zone.validate();
    if (!prover_true_pos.finite() || !prover_claimed_pos.finite())
      throw ConfigError("prover positions must be finite");
    if (!(p_det >= 0.0 && p_det <= 1.0)) throw ConfigError("scene.p_det must be in [0, 1]");
    if (static_cast<int>(witness_behaviors.size()) != zone.witness_count)
      throw ConfigError("witness_behaviors needs one entry per witness");
    if (policy.zone_id != zone.zone_id)
      throw ConfigError("policy zone '" + policy.zone_id + "' differs from zone '" + zone.zone_id + "'");
    if (policy.quorum_k != zone.quorum_k || policy.quorum_n != zone.witness_count)
      throw ConfigError("policy quorum " + std::to_string(policy.quorum_k) + "-of-" + std::to_string(policy.quorum_n) +
                        " differs from zone quorum " + std::to_string(zone.quorum_k) + "-of-" +
                        std::to_string(zone.witness_count));
    if (std::abs(policy.interval - zone.interval_seconds) > 1e-9)
      throw ConfigError("policy interval differs from zone block interval");
    if (zone.claim_period_seconds + 1e-9 < zone.interval_seconds)
      throw ConfigError("claim period shorter than the block interval");
  }
};

inline const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = {"baseline_4w", "baseline_6w",  "distance_fraud",
                                                 "edge_position", "visual_valid", "visual_invalid"};
  return names;
}

inline std::string scenario_display_name(std::string_view name) {
  if (name == "baseline_4w") return "Baseline (4W)";
  if (name == "baseline_6w") return "Baseline (6W)";
  if (name == "distance_fraud") return "Distance Fraud";
  if (name == "edge_position") return "Edge Position";
  if (name == "visual_valid") return "Visual (Valid)";
  if (name == "visual_invalid") return "Visual (Invalid)";
  return std::string(name);
}

inline Policy builtin_policy(const std::string& id, const ZoneConfig& zone) {
  if (id == "supply_chain_v1")
    return supply_chain_policy(zone.zone_id, zone.quorum_k, zone.witness_count, zone.interval_seconds);
  if (id == "visual_v1") return visual_policy(zone.zone_id, zone.quorum_k, zone.witness_count, zone.interval_seconds);
  throw ConfigError("unknown built-in policy '" + id + "'");
}

/// The six evaluation scenarios.
inline ScenarioConfig build_scenario(std::string_view name) {
  ScenarioConfig s;
  s.name = std::string(name);
  if (name == "baseline_6w") {
    s.zone.witness_count = 6;
    s.zone.witness_positions = witness_layout(6);
  }
  s.prover_true_pos = {5.0, 5.0, 0.0};
  s.prover_claimed_pos = {5.0, 5.0, 0.0};
  std::string policy_id = "supply_chain_v1";
  if (name == "baseline_4w" || name == "baseline_6w") {
  } else if (name == "distance_fraud") {
    s.prover_true_pos = {13.0, 13.0, 0.0};
    s.prover_honest = false;
  } else if (name == "edge_position") {
    s.prover_true_pos = {9.28, 0.0, 0.0};
    s.prover_claimed_pos = s.prover_true_pos;
  } else if (name == "visual_valid") {
    policy_id = "visual_v1";
    s.scene.objects = {"red car"};
  } else if (name == "visual_invalid") {
    policy_id = "visual_v1";
  } else {
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
  }
  s.policy = builtin_policy(policy_id, s.zone);
  s.witness_behaviors.assign(static_cast<std::size_t>(s.zone.witness_count), WitnessBehavior::honest);
  return s;
}

namespace detail {

inline double yaml_quantity(const YAML::Node& n, std::string_view unit, const std::string& where) {
  try {
    return parse_quantity(n, unit, where);
  } catch (const PolicyParseError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

inline Vector3 yaml_vector(const YAML::Node& n, const std::string& where) {
  if (!n.IsSequence() || n.size() < 2 || n.size() > 3)
    throw ConfigError("scenario: " + where + " must be [x, y] or [x, y, z]");
  Vector3 v;
  v.x = yaml_quantity(n[0], "m", where);
  v.y = yaml_quantity(n[1], "m", where);
  if (n.size() == 3) v.z = yaml_quantity(n[2], "m", where);
  return v;
}

template <class F>
void scenario_keys(const YAML::Node& map, const std::string& where, std::initializer_list<std::string_view> allowed,
                   F&& f) {
  try {
    for_each_key(map, where, allowed, std::forward<F>(f));
  } catch (const PolicyParseError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

}  // namespace detail

/// Parses a scenario document. Relative `policy_file` paths resolve
/// against `base_dir`.
inline ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {}) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario syntax error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("scenario document must be a mapping");

  ScenarioConfig s = build_scenario(root["base"] ? root["base"].as<std::string>() : "baseline_4w");
  s.name = "custom";
  bool positions_given = false;
  bool behaviors_given = false;
  std::optional<Policy> explicit_policy;
  std::string policy_name = s.policy.policy_id;

  try {
    detail::scenario_keys(
        root, "scenario",
        {"scenario", "base", "seed", "zone", "channel", "prover", "scene", "policy", "policy_file",
         "witness_behaviors"},
        [&](const std::string& key, const YAML::Node& v) {
          if (key == "scenario") {
            s.name = v.as<std::string>();
          } else if (key == "base") {
          } else if (key == "seed") {
            s.seed = v.as<std::uint64_t>();
          } else if (key == "zone") {
            detail::scenario_keys(v, "zone",
                                  {"zone_id", "radius", "witness_count", "quorum_k", "interval", "claim_period",
                                   "run_duration", "d_max", "d_acc", "witness_positions"},
                                  [&](const std::string& zk, const YAML::Node& zv) {
                                    auto& z = s.zone;
                                    if (zk == "zone_id") z.zone_id = zv.as<std::string>();
                                    else if (zk == "radius") z.radius = detail::yaml_quantity(zv, "m", "zone.radius");
                                    else if (zk == "witness_count") z.witness_count = zv.as<int>();
                                    else if (zk == "quorum_k") z.quorum_k = zv.as<int>();
                                    else if (zk == "interval") z.interval_seconds = detail::yaml_quantity(zv, "s", "zone.interval");
                                    else if (zk == "claim_period") z.claim_period_seconds = detail::yaml_quantity(zv, "s", "zone.claim_period");
                                    else if (zk == "run_duration") z.run_seconds = detail::yaml_quantity(zv, "s", "zone.run_duration");
                                    else if (zk == "d_max") z.d_max = detail::yaml_quantity(zv, "m", "zone.d_max");
                                    else if (zk == "d_acc") z.d_acc = detail::yaml_quantity(zv, "m", "zone.d_acc");
                                    else if (zk == "witness_positions") {
                                      if (!zv.IsSequence()) throw ConfigError("scenario: zone.witness_positions must be a list");
                                      z.witness_positions.clear();
                                      for (const auto& p : zv) z.witness_positions.push_back(detail::yaml_vector(p, "zone.witness_positions"));
                                      positions_given = true;
                                    }
                                  });
          } else if (key == "channel") {
            detail::scenario_keys(v, "channel",
                                  {"pl0", "d0", "gamma", "shadow_sigma", "rounds", "mp_sigma", "dist_err_frac"},
                                  [&](const std::string& ck, const YAML::Node& cv) {
                                    auto& c = s.zone.channel;
                                    if (ck == "pl0") c.pl0 = cv.as<double>();
                                    else if (ck == "d0") c.d0 = detail::yaml_quantity(cv, "m", "channel.d0");
                                    else if (ck == "gamma") c.gamma = cv.as<double>();
                                    else if (ck == "shadow_sigma") c.shadow_sigma = cv.as<double>();
                                    else if (ck == "rounds") c.rounds = cv.as<int>();
                                    else if (ck == "mp_sigma") c.mp_sigma = detail::yaml_quantity(cv, "m", "channel.mp_sigma");
                                    else if (ck == "dist_err_frac") c.dist_err_frac = cv.as<double>();
                                  });
          } else if (key == "prover") {
            detail::scenario_keys(v, "prover",
                                  {"true_position", "claimed_position", "honest", "payload", "processing_delay_ns"},
                                  [&](const std::string& pk, const YAML::Node& pv) {
                                    if (pk == "true_position") s.prover_true_pos = detail::yaml_vector(pv, "prover.true_position");
                                    else if (pk == "claimed_position") s.prover_claimed_pos = detail::yaml_vector(pv, "prover.claimed_position");
                                    else if (pk == "honest") s.prover_honest = pv.as<bool>();
                                    else if (pk == "payload") s.payload = pv.as<std::string>();
                                    else if (pk == "processing_delay_ns") s.prover_timing.processing_delay_ns = pv.as<double>();
                                  });
          } else if (key == "scene") {
            detail::scenario_keys(v, "scene", {"objects", "p_det"}, [&](const std::string& sk, const YAML::Node& sv) {
              if (sk == "objects") {
                s.scene.objects.clear();
                for (const auto& o : sv) {
                  if (!s.scene.objects.insert(o.as<std::string>()).second)
                    throw ConfigError("scenario: duplicate scene object '" + o.as<std::string>() + "'");
                }
              } else {
                s.p_det = sv.as<double>();
              }
            });
          } else if (key == "policy") {
            if (v.IsScalar()) {
              policy_name = v.Scalar();
            } else {
              explicit_policy = policy_from_yaml(v);
            }
          } else if (key == "policy_file") {
            const auto path = base_dir / v.as<std::string>();
            std::ifstream in(path);
            if (!in) throw ConfigError("cannot read policy file " + path.string());
            std::stringstream buf;
            buf << in.rdbuf();
            explicit_policy = parse_policy(buf.str());
          } else if (key == "witness_behaviors") {
            s.witness_behaviors.clear();
            for (const auto& b : v) {
              auto parsed = behavior_from_name(b.as<std::string>());
              if (!parsed) throw ConfigError("scenario: unknown witness behavior '" + b.as<std::string>() + "'");
              s.witness_behaviors.push_back(*parsed);
            }
            behaviors_given = true;
          }
        });
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }

  if (!positions_given) {
    if (s.zone.witness_count != 4 && s.zone.witness_count != 6)
      throw ConfigError("scenario: zone.witness_positions required for witness_count " +
                        std::to_string(s.zone.witness_count));
    s.zone.witness_positions = witness_layout(s.zone.witness_count);
  }
  if (!behaviors_given)
    s.witness_behaviors.assign(static_cast<std::size_t>(std::max(0, s.zone.witness_count)), WitnessBehavior::honest);
  s.policy = explicit_policy ? *explicit_policy : builtin_policy(policy_name, s.zone);
  s.validate();
  return s;
}

inline ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

}  // namespace wzone
