// Closed-form admission probability along the x axis, against a quick
// Monte Carlo estimate.

#include <cstdio>

#include "wzone/wzone.hpp"

int main() {
  using namespace wzone;
  const ZoneConfig zone;
  const Policy policy = supply_chain_policy(zone.zone_id, zone.quorum_k, zone.witness_count, zone.interval_seconds);
  std::printf("%6s %10s %10s\n", "x", "analytic", "simulated");
  for (double x = 6.0; x <= 12.0; x += 0.5) {
    const Vector3 p{x, 0.0, 0.0};
    RandomStream rng(static_cast<std::uint64_t>(x * 10));
    std::printf("%6.2f %10.4f %10.4f\n", x, admission_probability(p, zone),
                simulate_admission_frequency(p, zone, policy, 4000, rng));
  }
}
