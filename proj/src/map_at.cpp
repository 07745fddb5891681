// SPDX-License-Identifier: Apache-2.0

#include "mapat/map_at.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <tuple>

namespace mapat {

namespace {

std::optional<Hit> next_hit(const Ray& ray, std::span<const Wall> walls, std::optional<std::size_t> exclude,
                            double min_distance) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < walls.size(); ++i) {
    if (exclude && *exclude == i) continue;
    auto h = intersect(ray, walls[i], i);
    if (!h || h->distance < min_distance) continue;
    if (!best || h->distance < best->distance) best = h;
  }
  return best;
}

struct Walker {
  const FloorMap& map;
  const MapAtParams& params;
  std::size_t mpc_index;
  std::vector<CandidateLocation>& out;
  std::vector<Interaction> trail;

  void walk(const Ray& ray, double remaining, double walked, std::optional<std::size_t> last_wall) {
    const double min_dist = last_wall ? params.min_leg_m : 0.0;
    const auto hit = next_hit(ray, map.walls(), last_wall, min_dist);

    if (!hit || hit->distance >= remaining) {
      const Point end = ray.at(remaining);
      if (validate_point_in_bounds(map, end)) out.push_back({end, mpc_index, trail, walked + remaining});
      return;
    }
    if (static_cast<int>(trail.size()) >= params.max_interactions) return;

    const double left = remaining - hit->distance;
    const double so_far = walked + hit->distance;
    const Wall& wall = map.wall(hit->wall);

    trail.push_back({hit->wall, InteractionKind::Reflection});
    walk(reflect_ray(ray, *hit, wall), left, so_far, hit->wall);
    trail.back().kind = InteractionKind::Transmission;
    walk(Ray(hit->point, ray.azimuth()), left, so_far, hit->wall);
    trail.pop_back();
  }
};

Cluster make_cluster(std::vector<CandidateLocation> members) {
  // Sorting first makes the centroid independent of candidate order.
  std::sort(members.begin(), members.end(), [](const CandidateLocation& a, const CandidateLocation& b) {
    return std::tie(a.point.x, a.point.y, a.mpc_index) < std::tie(b.point.x, b.point.y, b.mpc_index);
  });
  Point sum;
  std::set<std::size_t> mpcs;
  for (const auto& m : members) {
    sum = sum + m.point;
    mpcs.insert(m.mpc_index);
  }
  Cluster c;
  c.centroid = (1.0 / static_cast<double>(members.size())) * sum;
  c.distinct_mpc_count = mpcs.size();
  c.members = std::move(members);
  return c;
}

} // namespace

void MapAtParams::validate() const {
  if (max_interactions < 0) throw PreconditionError("map-at params: max_interactions must be >= 0");
  if (!(cluster_radius_m > 0.0)) throw PreconditionError("map-at params: cluster_radius_m must be > 0");
  if (!(min_leg_m > 0.0)) throw PreconditionError("map-at params: min_leg_m must be > 0");
}

double Cluster::mean_spread() const {
  double total = 0.0;
  for (const auto& m : members) total += distance(m.point, centroid);
  return members.empty() ? 0.0 : total / static_cast<double>(members.size());
}

std::size_t Cluster::min_mpc_index() const {
  std::size_t best = static_cast<std::size_t>(-1);
  for (const auto& m : members) best = std::min(best, m.mpc_index);
  return best;
}

std::vector<CandidateLocation> generate_candidates(const FloorMap& map, Point bs, const Mpc& mpc,
                                                   const MapAtParams& params, std::size_t mpc_index) {
  params.validate();
  if (!(mpc.tof > 0.0)) throw PreconditionError("generate_candidates: tof must be > 0");
  if (!validate_point_in_bounds(map, bs)) throw PreconditionError("generate_candidates: BS outside map bounds");

  std::vector<CandidateLocation> out;
  Walker walker{map, params, mpc_index, out, {}};
  walker.walk(Ray(bs, mpc.aoa_at_bs), kSpeedOfLight * mpc.tof, 0.0, std::nullopt);
  return out;
}

std::vector<Cluster> cluster_candidates(std::span<const CandidateLocation> candidates, const MapAtParams& params,
                                        std::size_t* distance_evaluations) {
  const std::size_t n = candidates.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  std::size_t evals = 0;
  const double r2 = params.cluster_radius_m * params.cluster_radius_m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++evals;
      const Point d = candidates[i].point - candidates[j].point;
      if (dot(d, d) <= r2) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  if (distance_evaluations) *distance_evaluations = evals;

  std::vector<std::vector<CandidateLocation>> groups;
  std::vector<std::size_t> slot(n, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(candidates[i]);
  }

  std::vector<Cluster> clusters;
  clusters.reserve(groups.size());
  for (auto& g : groups) clusters.push_back(make_cluster(std::move(g)));
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.distinct_mpc_count != b.distinct_mpc_count) return a.distinct_mpc_count > b.distinct_mpc_count;
    return std::tie(a.centroid.x, a.centroid.y) < std::tie(b.centroid.x, b.centroid.y);
  });
  return clusters;
}

PositionEstimate estimate_position(std::vector<Cluster> clusters) {
  if (clusters.empty()) throw NoCandidatesError();

  std::vector<std::size_t> order(clusters.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> spread(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) spread[i] = clusters[i].mean_spread();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Cluster& ca = clusters[a];
    const Cluster& cb = clusters[b];
    if (ca.distinct_mpc_count != cb.distinct_mpc_count) return ca.distinct_mpc_count > cb.distinct_mpc_count;
    if (spread[a] != spread[b]) return spread[a] < spread[b];
    return ca.min_mpc_index() < cb.min_mpc_index();
  });

  const Cluster& winner = clusters[order.front()];
  PositionEstimate est;
  est.point = winner.centroid;
  est.support = winner.distinct_mpc_count;
  est.tie = order.size() > 1 && clusters[order[1]].distinct_mpc_count == winner.distinct_mpc_count;
  for (const auto& c : clusters) est.n_candidates_total += c.members.size();
  est.clusters = std::move(clusters);
  return est;
}

PositionEstimate locate(const FloorMap& map, Point bs, std::span<const Mpc> mpcs, const MapAtParams& params) {
  if (mpcs.empty()) throw PreconditionError("locate: no MPCs given");
  std::vector<CandidateLocation> all;
  for (std::size_t i = 0; i < mpcs.size(); ++i) {
    auto c = generate_candidates(map, bs, mpcs[i], params, i);
    all.insert(all.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
  }
  return estimate_position(cluster_candidates(all, params));
}

} // namespace mapat
