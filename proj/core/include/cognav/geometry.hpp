#pragma once

#include <algorithm>
#include <cmath>

namespace cognav {

// Right-handed world frame: +X right, +Y up, +Z forward. Headings are
// azimuths in degrees, 0 facing +Z and 90 facing +X.
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

// Distance on the ground plane; y is ignored throughout navigation scoring.
inline double ground_distance(const WorldPoint& a, const WorldPoint& b) {
  return std::hypot(b.x - a.x, b.z - a.z);
}

inline double azimuth_deg(double dx, double dz) {
  return std::atan2(dx, dz) * 180.0 / 3.14159265358979323846;
}

// Maps any angle to [0, 360).
inline double normalize_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

struct Pose {
  WorldPoint position;
  double yaw_deg = 0.0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

// Axis-aligned footprint on the ground plane.
struct Box2D {
  double x_min = 0.0;
  double x_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;

  double width() const { return x_max - x_min; }
  double depth() const { return z_max - z_min; }
  double area() const { return width() * depth(); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_z() const { return 0.5 * (z_min + z_max); }
  WorldPoint center() const { return {center_x(), 0.0, center_z()}; }

  friend bool operator==(const Box2D&, const Box2D&) = default;
};

inline double intersection_area(const Box2D& a, const Box2D& b) {
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double d = std::min(a.z_max, b.z_max) - std::max(a.z_min, b.z_min);
  if (w <= 0.0 || d <= 0.0) return 0.0;
  return w * d;
}

inline double iou(const Box2D& a, const Box2D& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

// Axis-aligned box in world coordinates.
struct Box3D {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;

  Box2D footprint() const { return {x_min, x_max, z_min, z_max}; }
  WorldPoint center() const {
    return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max), 0.5 * (z_min + z_max)};
  }

  friend bool operator==(const Box3D&, const Box3D&) = default;
};

}  // namespace cognav
