// SPDX-License-Identifier: Apache-2.0

#include "mapat/geometry.hpp"

#include <algorithm>

namespace mapat {

double normalize_angle(double radians) {
  double a = std::fmod(radians, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  // fmod of a tiny negative number can round back up to exactly 2pi
  if (a >= kTwoPi) a = 0.0;
  return a;
}

void check_wall(const Wall& w, const std::string& what) {
  if (!w.a.finite() || !w.b.finite()) throw InvalidMapError(what + ": non-finite coordinate");
  if (w.length() <= kGeomEps) throw InvalidMapError(what + ": zero-length wall");
}

Point mirror_point(Point p, const Wall& w) {
  check_wall(w);
  const Point d = w.direction();
  const double t = dot(p - w.a, d) / dot(d, d);
  const Point foot = w.a + t * d;
  return 2.0 * foot - p;
}

Ray reflect_ray(const Ray& r, const Hit& hit, const Wall& w) {
  const Point d = r.direction();
  const Point e = w.direction();
  const Point n = (1.0 / norm(e)) * Point{-e.y, e.x};
  const Point reflected = d - 2.0 * dot(d, n) * n;
  return Ray(hit.point, std::atan2(reflected.y, reflected.x));
}

int side_of(const Wall& w, Point p) {
  const Point e = w.direction();
  const double c = cross(e, p - w.a);
  if (std::abs(c) < kGeomEps * norm(e)) return 0;
  return c > 0.0 ? 1 : -1;
}

std::optional<Hit> intersect(const Ray& r, const Wall& w, std::size_t wall_index) {
  const Point d = r.direction();
  const Point e = w.direction();
  const double denom = cross(d, e);
  if (std::abs(denom) < kParamEps * norm(e)) return std::nullopt;

  const Point ao = w.a - r.origin();
  const double t = cross(ao, e) / denom; // distance along the unit ray
  const double s = cross(ao, d) / denom; // fraction along the wall
  if (t <= kGeomEps) return std::nullopt;
  if (s < -kParamEps || s > 1.0 + kParamEps) return std::nullopt;

  return Hit{wall_index, w.a + std::clamp(s, 0.0, 1.0) * e, t, side_of(w, r.origin())};
}

std::optional<Hit> first_hit(const Ray& r, std::span<const Wall> walls,
                             std::optional<std::size_t> exclude) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < walls.size(); ++i) {
    if (exclude && *exclude == i) continue;
    auto h = intersect(r, walls[i], i);
    if (h && (!best || h->distance < best->distance)) best = h;
  }
  return best;
}

std::optional<double> segment_crossing(Point p, Point q, const Wall& w) {
  const Point d = q - p;
  const Point e = w.direction();
  const double denom = cross(d, e);
  if (std::abs(denom) < kParamEps * norm(d) * norm(e)) return std::nullopt;

  const Point ap = w.a - p;
  const double t = cross(ap, e) / denom;
  const double s = cross(ap, d) / denom;
  if (t < -kParamEps || t > 1.0 + kParamEps) return std::nullopt;
  if (s < -kParamEps || s > 1.0 + kParamEps) return std::nullopt;
  return std::clamp(t, 0.0, 1.0);
}

} // namespace mapat
