// SPDX-License-Identifier: Apache-2.0

#include "mapat/forward_tracer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace mapat {

namespace {

constexpr std::size_t kNoWall = static_cast<std::size_t>(-1);

struct Crossing {
  double t;
  std::size_t wall;
};

// Walls crossed strictly inside the segment p-q, ordered from p. Walls in
// `skip_*` are the ones the leg starts or ends on.
std::vector<Crossing> leg_crossings(const FloorMap& map, Point p, Point q, std::size_t skip_a,
                                    std::size_t skip_b) {
  std::vector<Crossing> out;
  const double len = distance(p, q);
  const double t_eps = kGeomEps / len;
  const auto walls = map.walls();
  for (std::size_t i = 0; i < walls.size(); ++i) {
    if (i == skip_a || i == skip_b) continue;
    auto t = segment_crossing(p, q, walls[i]);
    if (t && *t > t_eps && *t < 1.0 - t_eps) out.push_back({*t, i});
  }
  std::sort(out.begin(), out.end(), [](const Crossing& x, const Crossing& y) {
    return x.t < y.t || (x.t == y.t && x.wall < y.wall);
  });
  return out;
}

class Tracer {
public:
  Tracer(const FloorMap& map, Point bs, Point ue, const TraceParams& params)
      : map_(map), bs_(bs), ue_(ue), params_(params) {}

  std::vector<Mpc> run() {
    sequence_.clear();
    images_.assign(1, bs_);
    emit_if_valid();
    extend();
    return std::move(paths_);
  }

private:
  void extend() {
    if (static_cast<int>(sequence_.size()) >= params_.max_reflections) return;
    const auto walls = map_.walls();
    for (std::size_t i = 0; i < walls.size(); ++i) {
      if (!sequence_.empty() && sequence_.back() == i) continue;
      sequence_.push_back(i);
      images_.push_back(mirror_point(images_.back(), walls[i]));
      emit_if_valid();
      extend();
      images_.pop_back();
      sequence_.pop_back();
    }
  }

  // Unfolds the current wall sequence backwards from the UE and, if every
  // reflection point lies on its wall, checks the legs for blockage.
  void emit_if_valid() {
    const std::size_t k = sequence_.size();
    std::vector<Point> vertices(k + 2);
    vertices[0] = bs_;
    vertices[k + 1] = ue_;

    Point target = ue_;
    for (std::size_t j = k; j >= 1; --j) {
      const Wall& w = map_.wall(sequence_[j - 1]);
      const Point image = images_[j];
      if (side_of(w, image) * side_of(w, target) != -1) return;
      auto t = segment_crossing(image, target, w);
      if (!t) return;
      const Point r = image + *t * (target - image);
      vertices[j] = r;
      target = r;
    }

    std::vector<Interaction> interactions;
    int transmissions = 0;
    double length = 0.0;
    for (std::size_t leg = 0; leg <= k; ++leg) {
      const Point p = vertices[leg];
      const Point q = vertices[leg + 1];
      const double leg_len = distance(p, q);
      if (leg_len <= kGeomEps) return;
      length += leg_len;

      const std::size_t skip_a = leg == 0 ? kNoWall : sequence_[leg - 1];
      const std::size_t skip_b = leg == k ? kNoWall : sequence_[leg];
      for (const Crossing& c : leg_crossings(map_, p, q, skip_a, skip_b)) {
        if (!map_.wall(c.wall).transmissive) return;
        if (++transmissions > params_.max_transmissions) return;
        interactions.push_back({c.wall, InteractionKind::Transmission});
      }
      if (leg < k) interactions.push_back({sequence_[leg], InteractionKind::Reflection});
    }

    Mpc mpc;
    mpc.aoa_at_bs = azimuth_of(vertices[1] - vertices[0]);
    mpc.tof = length / kSpeedOfLight;
    mpc.power_dbm = -fspl_db(length, params_.frequency_hz) -
                    static_cast<double>(k) * params_.reflection_loss_db -
                    static_cast<double>(transmissions) * params_.transmission_loss_db;
    mpc.interactions = std::move(interactions);
    paths_.push_back(std::move(mpc));
  }

  const FloorMap& map_;
  Point bs_;
  Point ue_;
  const TraceParams& params_;
  std::vector<std::size_t> sequence_;
  std::vector<Point> images_;
  std::vector<Mpc> paths_;
};

} // namespace

char interaction_code(InteractionKind kind) { return kind == InteractionKind::Reflection ? 'R' : 'T'; }

void TraceParams::validate() const {
  if (max_reflections < 0 || max_transmissions < 0)
    throw PreconditionError("trace params: interaction counts must be >= 0");
  if (!(frequency_hz > 0.0)) throw PreconditionError("trace params: frequency must be > 0");
  if (!(reflection_loss_db >= 0.0) || !(transmission_loss_db >= 0.0))
    throw PreconditionError("trace params: losses must be >= 0");
}

double fspl_db(double distance_m, double frequency_hz) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz / kSpeedOfLight);
}

LosResult los_visible(const FloorMap& map, Point p, Point q) {
  if (distance(p, q) <= kGeomEps) throw PreconditionError("los_visible: endpoints coincide");
  LosResult res{true, 0};
  for (const Crossing& c : leg_crossings(map, p, q, kNoWall, kNoWall)) {
    ++res.transmissions;
    if (!map.wall(c.wall).transmissive) res.visible = false;
  }
  return res;
}

std::vector<Mpc> trace_paths(const FloorMap& map, Point bs, Point ue, const TraceParams& params) {
  params.validate();
  if (!validate_point_in_bounds(map, bs)) throw PreconditionError("trace_paths: BS outside map bounds");
  if (!validate_point_in_bounds(map, ue)) throw PreconditionError("trace_paths: UE outside map bounds");
  if (distance(bs, ue) <= kGeomEps) throw PreconditionError("trace_paths: BS and UE coincide");

  std::vector<Mpc> paths = Tracer(map, bs, ue, params).run();
  auto by_arrival = [](const Mpc& a, const Mpc& b) {
    if (a.tof != b.tof) return a.tof < b.tof;
    return a.interactions < b.interactions;
  };
  std::sort(paths.begin(), paths.end(), by_arrival);
  if (params.max_paths > 0 && paths.size() > params.max_paths) {
    // A receiver resolves the strongest paths; keep those, then restore arrival order.
    std::stable_sort(paths.begin(), paths.end(),
                     [](const Mpc& a, const Mpc& b) { return *a.power_dbm > *b.power_dbm; });
    paths.resize(params.max_paths);
    std::sort(paths.begin(), paths.end(), by_arrival);
  }
  return paths;
}

} // namespace mapat
