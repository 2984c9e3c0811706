#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wzone/analytic.hpp"
#include "wzone/geometry.hpp"
#include "wzone/policy.hpp"
#include "wzone/random.hpp"
#include "wzone/sensing.hpp"
#include "wzone/simulation.hpp"
#include "wzone/zone.hpp"

namespace wzone {

struct GridSpec {
  double x_min = -20.0;
  double x_max = 20.0;
  double y_min = -20.0;
  double y_max = 20.0;
  double step = 0.5;

  void validate() const {
    for (double v : {x_min, x_max, y_min, y_max, step})
      if (!std::isfinite(v)) throw ConfigError("grid bounds must be finite");
    if (!(step > 0.0)) throw ConfigError("grid step must be > 0");
    if (x_max < x_min || y_max < y_min) throw ConfigError("grid max must be >= min");
  }

  [[nodiscard]] int nx() const { return static_cast<int>(std::floor((x_max - x_min) / step + 1e-9)) + 1; }
  [[nodiscard]] int ny() const { return static_cast<int>(std::floor((y_max - y_min) / step + 1e-9)) + 1; }
  [[nodiscard]] double x(int i) const { return x_min + i * step; }
  [[nodiscard]] double y(int j) const { return y_min + j * step; }
};

enum class HeatmapMode { analytic, monte_carlo };

struct HeatmapCell {
  double x = 0.0;
  double y = 0.0;
  double p = 0.0;   // admission probability
  int overlay = 0;  // noise-free effective zone membership
};

/// Empirical admission frequency of honest, truthful claims at `point`
/// under `policy`. Runs the same ranging, sensing, and Admit_v path as a
/// witness, without signing.
inline double simulate_admission_frequency(const Vector3& point, const ZoneConfig& zone, const Policy& policy,
                                           int samples, RandomStream& rng) {
  const DistanceGate gate = DistanceGate::for_zone(zone);
  std::vector<WitnessIdentity> ids;
  for (std::size_t i = 0; i < zone.witness_positions.size(); ++i)
    ids.push_back({"W" + std::to_string(i + 1), {}, zone.witness_positions[i]});
  int admitted = 0;
  std::vector<FeatureDescriptor> features;
  for (int s = 0; s < samples; ++s) {
    int passes = 0;
    for (const auto& w : ids) {
      const RangingResult r = range_estimate(distance(w.position, point), zone.channel, rng);
      features.clear();
      if (policy.find(RequirementKind::rf_similarity))
        features.push_back(sample_rf_feature(w, point, point, zone.channel, rng));
      const auto outcomes = evaluate_requirements(policy, r, features, gate);
      if (std::all_of(outcomes.begin(), outcomes.end(), [](const RequirementOutcome& o) { return o.satisfied; }))
        ++passes;
    }
    if (passes >= zone.quorum_k) ++admitted;
  }
  return static_cast<double>(admitted) / samples;
}

/// Admission probability over a grid, plus the noise-free effective-zone
/// overlay. Monte Carlo cells are seeded by cell index, so output does not
/// depend on `jobs`.
inline std::vector<HeatmapCell> heatmap(const ZoneConfig& zone, const GridSpec& grid, HeatmapMode mode,
                                        int samples = 10000, std::uint64_t seed = 0, int jobs = 1) {
  grid.validate();
  zone.validate();
  if (mode == HeatmapMode::monte_carlo && samples < 1) throw ConfigError("samples must be >= 1");
  const Policy policy = supply_chain_policy(zone.zone_id, zone.quorum_k, zone.witness_count, zone.interval_seconds);
  const int nx = grid.nx(), ny = grid.ny();
  std::vector<HeatmapCell> cells(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  parallel_for_index(cells.size(), jobs, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / static_cast<std::size_t>(ny));
    const int j = static_cast<int>(idx % static_cast<std::size_t>(ny));
    HeatmapCell c;
    c.x = grid.x(i);
    c.y = grid.y(j);
    const Vector3 pt{c.x, c.y, 0.0};
    if (mode == HeatmapMode::analytic) {
      c.p = admission_probability(pt, zone);
    } else {
      RandomStream rng(mix64(seed) ^ mix64(idx + 1));
      c.p = simulate_admission_frequency(pt, zone, policy, samples, rng);
    }
    c.overlay = noise_free_effective_zone(pt, zone.witness_positions, zone.d_max, zone.quorum_k) ? 1 : 0;
    cells[idx] = c;
  });
  return cells;
}

inline void write_heatmap_csv(std::ostream& out, const std::vector<HeatmapCell>& cells) {
  out << "x,y,p,overlay\n";
  for (const auto& c : cells)
    out << real_to_text(c.x) << ',' << real_to_text(c.y) << ',' << real_to_text(c.p) << ',' << c.overlay << '\n';
}

inline std::vector<HeatmapCell> read_heatmap_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "x,y,p,overlay") throw ConfigError("heatmap CSV: bad header");
  std::vector<HeatmapCell> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[4];
    for (auto& s : f)
      if (!std::getline(ss, s, ',')) throw ConfigError("heatmap CSV: short row '" + line + "'");
    HeatmapCell c;
    try {
      c.x = std::stod(f[0]);
      c.y = std::stod(f[1]);
      c.p = std::stod(f[2]);
      c.overlay = std::stoi(f[3]);
    } catch (const std::exception&) {
      throw ConfigError("heatmap CSV: bad row '" + line + "'");
    }
    cells.push_back(c);
  }
  return cells;
}

}  // namespace wzone
