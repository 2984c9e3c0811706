#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wzone/event_queue.hpp"
#include "wzone/evidence.hpp"
#include "wzone/random.hpp"
#include "wzone/scenario.hpp"
#include "wzone/witness.hpp"

namespace wzone {

/// Simulation-grade witness keys, derived from the scenario's master seed.
inline std::vector<WitnessNode> make_witness_nodes(const ScenarioConfig& cfg) {
  std::vector<WitnessNode> nodes;
  for (int i = 0; i < cfg.zone.witness_count; ++i) {
    Encoder e;
    e.str("wzone/witness-key/v1").u64(cfg.seed).str(cfg.zone.zone_id).u64(static_cast<std::uint64_t>(i));
    const KeyPair kp = keypair_from_seed(sha256(e.data()));
    WitnessNode n;
    n.identity.witness_id = "W" + std::to_string(i + 1);
    n.identity.public_key = kp.public_key;
    n.identity.position = cfg.zone.witness_positions[static_cast<std::size_t>(i)];
    n.secret_key = kp.secret_key;
    n.behavior = cfg.witness_behaviors[static_cast<std::size_t>(i)];
    nodes.push_back(std::move(n));
  }
  return nodes;
}

inline ZoneRegistry make_registry(const ScenarioConfig& cfg, std::span<const WitnessNode> nodes) {
  auto policies = builtin_policy_ids();
  policies.insert(cfg.policy.policy_id);
  return make_registry(cfg.zone, nodes, std::move(policies));
}

struct RunResult {
  std::vector<IntervalOutcome> outcomes;
  int admitted_count = 0;
  std::vector<Block> chain;
};

inline void encode_fields(Encoder& e, const RunResult& r) {
  e.sequence(r.outcomes, [](Encoder& n, const IntervalOutcome& o) { encode_fields(n, o); });
  e.u64(static_cast<std::uint64_t>(r.admitted_count));
  e.sequence(r.chain, [](Encoder& n, const Block& b) { encode_fields(n, b); });
}

inline void decode_fields(Decoder& d, RunResult& r) {
  r.outcomes.clear();
  d.sequence([&](Decoder& n) {
    IntervalOutcome o;
    decode_fields(n, o);
    r.outcomes.push_back(std::move(o));
  });
  r.admitted_count = static_cast<int>(d.u64());
  r.chain.clear();
  d.sequence([&](Decoder& n) {
    Block b;
    decode_fields(n, b);
    r.chain.push_back(std::move(b));
  });
}

/// Interval index of a claim issued at `t`; interval 0 is the genesis block.
inline std::uint64_t interval_for(SimTime t, const ZoneConfig& zone) {
  return static_cast<std::uint64_t>(t / seconds_to_sim(zone.interval_seconds)) + 1;
}

/// One run: a claim event every claim period, each triggering a quorum
/// round in its block interval.
inline RunResult run_scenario(const ScenarioConfig& cfg, std::span<const WitnessNode> nodes,
                              const ZoneRegistry& registry, std::uint64_t run_seed) {
  RunResult result;
  RandomStream rng(run_seed);
  append_block(result.chain, cfg.zone.zone_id, 0, {});

  Environment env;
  env.prover_true_position = cfg.prover_true_pos;
  env.scene = cfg.scene;
  env.p_det = cfg.p_det;
  env.prover_timing = cfg.prover_timing;

  EventQueue queue;
  const SimTime period = seconds_to_sim(cfg.zone.claim_period_seconds);
  for (int i = 0; i < cfg.zone.claim_count(); ++i) {
    queue.schedule(period * i, [&](SimTime now) {
      const std::uint64_t interval = interval_for(now, cfg.zone);
      while (result.chain.back().interval_index + 1 < interval)
        append_block(result.chain, cfg.zone.zone_id, result.chain.back().interval_index + 1, {});
      const Claim claim = Claim::make(interval, cfg.zone.zone_id, cfg.prover_claimed_pos, cfg.payload);
      RandomStream round_rng = rng.split();
      IntervalOutcome o = quorum_round(nodes, registry, claim, cfg.zone, cfg.policy, env, result.chain, round_rng);
      if (o.admitted) ++result.admitted_count;
      result.outcomes.push_back(std::move(o));
    });
  }
  queue.run();
  return result;
}

inline RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto nodes = make_witness_nodes(cfg);
  const auto registry = make_registry(cfg, nodes);
  return run_scenario(cfg, nodes, registry, cfg.seed);
}

/// Ground truth for precision/recall: the prover is honest and inside the zone.
inline bool claim_is_legitimate(const ScenarioConfig& cfg) {
  return cfg.prover_honest && distance(cfg.prover_true_pos, cfg.zone.center) <= cfg.zone.radius;
}

struct Summary {
  std::string scenario;
  std::uint64_t seed = 0;
  int iterations = 0;
  int claims_per_run = 0;
  double success_rate_mean = 0.0;
  double success_rate_std = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  double admitted_mean = 0.0;
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Aggregates per-iteration admitted counts (in iteration order).
inline Summary summarize(const ScenarioConfig& cfg, std::span<const int> admitted_per_run) {
  Summary s;
  s.scenario = cfg.name;
  s.seed = cfg.seed;
  s.iterations = static_cast<int>(admitted_per_run.size());
  s.claims_per_run = cfg.zone.claim_count();
  const double claims = s.claims_per_run;
  const bool positive = claim_is_legitimate(cfg);

  double sum_rate = 0.0, sum_admitted = 0.0;
  for (int a : admitted_per_run) {
    sum_rate += a / claims;
    sum_admitted += a;
    const auto adm = static_cast<std::uint64_t>(a);
    const auto rej = static_cast<std::uint64_t>(s.claims_per_run - a);
    if (positive) {
      s.tp += adm;
      s.fn += rej;
    } else {
      s.fp += adm;
      s.tn += rej;
    }
  }
  const double n = std::max(1, s.iterations);
  s.success_rate_mean = sum_rate / n;
  s.admitted_mean = sum_admitted / n;
  double var = 0.0;
  for (int a : admitted_per_run) {
    const double d = a / claims - s.success_rate_mean;
    var += d * d;
  }
  s.success_rate_std = std::sqrt(var / n);
  if (s.tp + s.fp > 0) s.precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
  if (s.tp + s.fn > 0) s.recall = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
  return s;
}

/// Runs `count` independent tasks over `jobs` threads; task i only writes
/// slot i, so results do not depend on the thread count.
template <class F>
void parallel_for_index(std::size_t count, int jobs, F&& task) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), 1, std::max<std::size_t>(1, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Monte Carlo over `iterations` runs seeded with seed + iteration index.
inline Summary monte_carlo(const ScenarioConfig& cfg, int iterations, int jobs = 1) {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  cfg.validate();
  const auto nodes = make_witness_nodes(cfg);
  const auto registry = make_registry(cfg, nodes);
  std::vector<int> admitted(static_cast<std::size_t>(iterations), 0);
  parallel_for_index(admitted.size(), jobs, [&](std::size_t i) {
    admitted[i] = run_scenario(cfg, nodes, registry, iteration_seed(cfg.seed, i)).admitted_count;
  });
  return summarize(cfg, admitted);
}

}  // namespace wzone
