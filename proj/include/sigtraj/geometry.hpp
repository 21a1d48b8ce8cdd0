#pragma once

#include <cmath>

namespace sigtraj {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double angle() const { return std::atan2(y, x); }
  Vec2 rotated(double a) const {
    const double c = std::cos(a), s = std::sin(a);
    return {c * x - s * y, s * x + c * y};
  }
};

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Normalizes to (-pi, pi].
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a, two_pi);
  if (a <= -M_PI) a += two_pi;
  if (a > M_PI) a -= two_pi;
  return a;
}

// A node-local reference frame: origin plus heading.
struct Pose {
  Vec2 p;
  double heading = 0.0;

  // Expresses a world point in this frame.
  Vec2 to_local(const Vec2& world) const { return (world - p).rotated(-heading); }
  Vec2 to_world(const Vec2& local) const { return p + local.rotated(heading); }
};

// Rigid transform of the plane (rotation about the origin, then translation).
struct RigidTransform {
  double rotation = 0.0;
  Vec2 translation;

  Vec2 apply(const Vec2& v) const { return v.rotated(rotation) + translation; }
  double apply_heading(double h) const { return wrap_angle(h + rotation); }
};

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) return dist(p, a);
  double t = (p - a).dot(ab) / len2;
  t = std::fmin(1.0, std::fmax(0.0, t));
  return dist(p, a + ab * t);
}

}  // namespace sigtraj
