// SPDX-License-Identifier: Apache-2.0
//
// 2-D geometric kernel shared by the forward tracer and the MAP-AT core.
// Angles are radians, counter-clockwise from +x, normalized to [0, 2pi).

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace mapat {

inline constexpr double kGeomEps = 1e-9;   // point/segment coincidence, meters
inline constexpr double kParamEps = 1e-12; // intersection parameter slack
inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Thrown when a wall or map violates its invariants.
class InvalidMapError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Thrown when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend constexpr Point operator*(Point p, double s) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point, Point) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Wraps any finite angle into [0, 2pi).
double normalize_angle(double radians);

inline Point unit_vector(double azimuth) { return {std::cos(azimuth), std::sin(azimuth)}; }
inline double azimuth_of(Point direction) { return normalize_angle(std::atan2(direction.y, direction.x)); }

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct Wall {
  Point a;
  Point b;
  bool transmissive = false;

  Point direction() const { return b - a; }
  double length() const { return distance(a, b); }
  bool valid() const { return a.finite() && b.finite() && length() > kGeomEps; }

  friend bool operator==(const Wall&, const Wall&) = default;
};

// Throws InvalidMapError describing the problem when `w` is not a valid wall.
void check_wall(const Wall& w, const std::string& what = "wall");

class Ray {
public:
  Ray(Point origin, double azimuth) : origin_(origin), azimuth_(normalize_angle(azimuth)) {}

  Point origin() const { return origin_; }
  double azimuth() const { return azimuth_; }
  Point direction() const { return unit_vector(azimuth_); }
  Point at(double distance) const { return origin_ + distance * direction(); }

private:
  Point origin_;
  double azimuth_;
};

struct Hit {
  std::size_t wall = 0; // index into the wall list that was searched
  Point point;
  double distance = 0.0;
  int side = 0; // side_of(wall, ray origin)
};

// Reflection of `p` across the infinite line through `w`.
Point mirror_point(Point p, const Wall& w);

// Specular continuation of `r` at `hit`, which must lie on `w`.
Ray reflect_ray(const Ray& r, const Hit& hit, const Wall& w);

// Sign of (b - a) x (p - a); zero within kGeomEps of the wall line.
int side_of(const Wall& w, Point p);

// Intersection of a ray with one closed wall segment at distance > kGeomEps.
std::optional<Hit> intersect(const Ray& r, const Wall& w, std::size_t wall_index = 0);

// Nearest wall struck by `r`, skipping `exclude`.
std::optional<Hit> first_hit(const Ray& r, std::span<const Wall> walls,
                             std::optional<std::size_t> exclude = std::nullopt);

// Parameter t in [0, 1] along p->q where the segment meets the closed wall,
// or nullopt when they do not meet or are parallel.
std::optional<double> segment_crossing(Point p, Point q, const Wall& w);

} // namespace mapat
