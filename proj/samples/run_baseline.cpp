// One run of the 4-witness baseline: prints each interval's decision and
// checks the first admitted evidence object the way an external verifier would.

#include <iostream>

#include "wzone/wzone.hpp"

int main() {
  using namespace wzone;
  ScenarioConfig cfg = build_scenario("baseline_4w");
  cfg.seed = 42;
  const auto nodes = make_witness_nodes(cfg);
  const auto registry = make_registry(cfg, nodes);
  const RunResult run = run_scenario(cfg, nodes, registry, cfg.seed);

  const EvidenceObject* first = nullptr;
  for (const auto& o : run.outcomes) {
    std::cout << "interval " << o.interval_index << ": " << (o.admitted ? "admitted" : "rejected") << " ("
              << o.attestations.size() << " attestations)\n";
    if (o.evidence && !first) first = &*o.evidence;
  }
  std::cout << run.admitted_count << "/" << run.outcomes.size() << " claims admitted\n";
  if (!first) return 1;

  const Bytes file = serialize_evidence(*first);
  const Verdict v = verify_evidence(deserialize_evidence(file), registry, registry.policies,
                                    std::span<const Block>(run.chain));
  std::cout << "evidence (" << file.size() << " bytes): " << verdict_name(v.code) << "\n";
  return v.ok() ? 0 : 1;
}
