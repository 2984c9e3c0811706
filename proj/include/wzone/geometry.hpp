#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wzone {

/// Raised for any invalid zone, scenario, or grid configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point in the zone frame, in meters. Witness layouts live on z = 0.
struct Vector3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vector3&, const Vector3&) = default;

  Vector3 operator-(const Vector3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vector3 operator+(const Vector3& o) const { return {x + o.x, y + o.y, z + o.z}; }

  [[nodiscard]] double norm() const { return std::sqrt(x * x + y * y + z * z); }
  [[nodiscard]] bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline double distance(const Vector3& a, const Vector3& b) { return (a - b).norm(); }

/// Half-side of the default square layout; the hexagon uses the same
/// center-to-witness distance.
inline constexpr double kDefaultHalfSide = 10.0;

/// Fixed witness positions around the zone center, ordered by polar angle
/// (counterclockwise from the +x axis). Only 4 (square) and 6 (hexagon)
/// witnesses have a defined geometry.
inline std::vector<Vector3> witness_layout(int count, double half_side = kDefaultHalfSide) {
  std::vector<Vector3> out;
  if (count == 4) {
    out = {{half_side, half_side, 0.0},
           {-half_side, half_side, 0.0},
           {-half_side, -half_side, 0.0},
           {half_side, -half_side, 0.0}};
  } else if (count == 6) {
    const double r = half_side * std::numbers::sqrt2;
    for (int i = 0; i < 6; ++i) {
      const double a = i * std::numbers::pi / 3.0;
      // Snap tiny cos/sin residues so that vertex coordinates are exact.
      double cx = r * std::cos(a);
      double cy = r * std::sin(a);
      if (std::abs(cy) < 1e-12) cy = 0.0;
      if (std::abs(cx) < 1e-12) cx = 0.0;
      out.push_back({cx, cy, 0.0});
    }
  } else {
    throw ConfigError("unsupported witness count " + std::to_string(count) +
                      " (layouts exist for 4 and 6)");
  }
  return out;
}

/// Count of witnesses whose true distance to `point` is at most `radius`.
inline int witnesses_within(const Vector3& point, std::span<const Vector3> layout, double radius) {
  return static_cast<int>(std::count_if(layout.begin(), layout.end(), [&](const Vector3& w) {
    return distance(point, w) <= radius;
  }));
}

/// Noise-free effective zone: at least k witnesses within d_max.
inline bool noise_free_effective_zone(const Vector3& point, std::span<const Vector3> layout,
                                      double d_max, int k) {
  return witnesses_within(point, layout, d_max) >= k;
}

}  // namespace wzone
