#pragma once

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wzone/channel.hpp"
#include "wzone/geometry.hpp"
#include "wzone/sensing.hpp"
#include "wzone/zone.hpp"

namespace wzone {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

/// P(distance bound <= d_acc) for an honest prover at true distance d.
inline double witness_pass_probability(double d_true, const ZoneConfig& zone) {
  const double sigma = ranging_sigma(d_true, zone.channel);
  if (sigma == 0.0) return d_true <= zone.d_acc ? 1.0 : 0.0;
  return normal_cdf((zone.d_acc - d_true) / sigma);
}

/// P(rf similarity > threshold) for a truthful claim: |X_sigma| must stay
/// below (1 - threshold) times the full-scale mismatch.
inline double rf_pass_probability(const ChannelParams& ch, double threshold = 0.5) {
  const double margin = (1.0 - threshold) * kRfFullScaleDb;
  if (ch.shadow_sigma == 0.0) return margin > 0.0 ? 1.0 : 0.0;
  return 2.0 * normal_cdf(margin / ch.shadow_sigma) - 1.0;
}

/// P(at least k successes) over independent Bernoulli(p_i) (Poisson-binomial).
inline double at_least_k_probability(std::span<const double> p, int k) {
  if (k <= 0) return 1.0;
  if (k > static_cast<int>(p.size())) return 0.0;
  std::vector<double> dist(p.size() + 1, 0.0);  // dist[j] = P(j successes so far)
  dist[0] = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j > 0; --j) dist[j] = dist[j] * (1.0 - p[i]) + dist[j - 1] * p[i];
    dist[0] *= (1.0 - p[i]);
  }
  double tail = 0.0;
  for (std::size_t j = static_cast<std::size_t>(k); j < dist.size(); ++j) tail += dist[j];
  return std::clamp(tail, 0.0, 1.0);
}

inline std::vector<double> witness_pass_probabilities(const Vector3& point, const ZoneConfig& zone) {
  std::vector<double> p;
  p.reserve(zone.witness_positions.size());
  for (const auto& w : zone.witness_positions) p.push_back(witness_pass_probability(distance(point, w), zone));
  return p;
}

/// Analytic admission probability of an honest claim at `point` (range gates only).
inline double admission_probability(const Vector3& point, const ZoneConfig& zone) {
  const auto p = witness_pass_probabilities(point, zone);
  return at_least_k_probability(p, zone.quorum_k);
}

/// Analytic admission under the visual policy: range gate, rf check, and
/// per-witness detection probability, composed over the quorum.
inline double visual_admission_probability(const Vector3& point, const ZoneConfig& zone, double p_det,
                                           double rf_threshold = 0.5) {
  auto p = witness_pass_probabilities(point, zone);
  const double rf = rf_pass_probability(zone.channel, rf_threshold);
  for (auto& q : p) q *= rf * p_det;
  return at_least_k_probability(p, zone.quorum_k);
}

// ---------------------------------------------------------------------------
// Calibration of constants that reproduce the evaluation's admission rates.

inline const Vector3 kEdgePoint{9.28, 0.0, 0.0};
inline const Vector3 kBaselinePoint{5.0, 5.0, 0.0};

enum class CalibrationTarget { edge_admission, visual_admission };

inline std::string_view calibration_target_name(CalibrationTarget t) {
  return t == CalibrationTarget::edge_admission ? "edge_admission" : "visual_admission";
}

class CalibrationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct CalibrationResult {
  CalibrationTarget target = CalibrationTarget::edge_admission;
  std::string parameter;
  double value = 0.0;
  double target_value = 0.0;
  double achieved = 0.0;  // full analytic admission at the calibrated value
  double residual = 0.0;  // achieved - target_value
};

/// Closed-form d_acc for a target edge admission rate. Witnesses within
/// d_max of the edge point are treated as certain passes; the remaining
/// witnesses must share one distance and exactly one of them is needed,
/// so target = 1 - (1 - Phi((d_acc - d_far) / sigma(d_far)))^m.
inline CalibrationResult calibrate_edge(double target, ZoneConfig zone, const Vector3& edge = kEdgePoint) {
  if (!(target > 0.0 && target < 1.0))
    throw CalibrationError("edge admission target " + std::to_string(target) + " unreachable (must be in (0, 1))");
  std::vector<double> far;
  int near = 0;
  for (const auto& w : zone.witness_positions) {
    const double d = distance(edge, w);
    if (d <= zone.d_max) {
      ++near;
    } else {
      far.push_back(d);
    }
  }
  if (far.empty() || zone.quorum_k - near != 1)
    throw CalibrationError("closed form needs exactly one more witness beyond those within d_max");
  for (double d : far)
    if (std::abs(d - far.front()) > 1e-9) throw CalibrationError("closed form needs equidistant far witnesses");
  const double m = static_cast<double>(far.size());
  const double p_one = 1.0 - std::pow(1.0 - target, 1.0 / m);
  const double d_far = far.front();
  zone.d_acc = d_far + normal_quantile(p_one) * ranging_sigma(d_far, zone.channel);
  if (zone.d_acc < zone.d_max) throw CalibrationError("target unreachable: d_acc would fall below d_max");
  CalibrationResult r;
  r.target = CalibrationTarget::edge_admission;
  r.parameter = "d_acc";
  r.value = zone.d_acc;
  r.target_value = target;
  r.achieved = admission_probability(edge, zone);
  r.residual = r.achieved - target;
  return r;
}

/// Detection probability p_det giving the target visual-valid admission
/// rate, by bisection (admission is increasing in p_det).
inline CalibrationResult calibrate_visual(double target, const ZoneConfig& zone, const Vector3& prover = kBaselinePoint,
                                          double tolerance = 1e-12) {
  const double lo_val = visual_admission_probability(prover, zone, 0.0);
  const double hi_val = visual_admission_probability(prover, zone, 1.0);
  if (!(target >= lo_val && target <= hi_val))
    throw CalibrationError("visual admission target " + std::to_string(target) + " unreachable (range [" +
                           std::to_string(lo_val) + ", " + std::to_string(hi_val) + "])");
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (visual_admission_probability(prover, zone, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  CalibrationResult r;
  r.target = CalibrationTarget::visual_admission;
  r.parameter = "p_det";
  r.value = 0.5 * (lo + hi);
  r.target_value = target;
  r.achieved = visual_admission_probability(prover, zone, r.value);
  r.residual = r.achieved - target;
  return r;
}

inline CalibrationResult calibrate(CalibrationTarget t, double target, const ZoneConfig& zone) {
  return t == CalibrationTarget::edge_admission ? calibrate_edge(target, zone) : calibrate_visual(target, zone);
}

}  // namespace wzone
