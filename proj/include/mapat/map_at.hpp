// SPDX-License-Identifier: Apache-2.0
//
// Map-assisted localization from per-path angle of arrival and time of
// flight. Each MPC is back-propagated from the BS through the floor plan,
// branching into reflection and transmission hypotheses at every wall it
// meets. The end points of those branches are candidate locations. Nearby
// candidates are grouped, and the group backed by the most distinct MPCs
// gives the position estimate (its centroid).

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "mapat/floor_map.hpp"
#include "mapat/forward_tracer.hpp"
#include "mapat/geometry.hpp"

namespace mapat {

struct MapAtParams {
  int max_interactions = 3;
  double cluster_radius_m = 0.5;
  // Hits closer than this to the previous interaction point are ignored.
  double min_leg_m = 1e-3;

  void validate() const;
};

struct CandidateLocation {
  Point point;
  std::size_t mpc_index = 0;
  std::vector<Interaction> interactions;
  double residual_path_m = 0.0; // distance walked; equals c * tof
};

struct Cluster {
  std::vector<CandidateLocation> members;
  Point centroid;
  std::size_t distinct_mpc_count = 0;

  double mean_spread() const;          // mean member-to-centroid distance
  std::size_t min_mpc_index() const;
};

struct PositionEstimate {
  Point point;
  std::size_t support = 0;
  std::size_t n_candidates_total = 0;
  bool tie = false;
  std::vector<Cluster> clusters;
};

// No candidate location survived; the UE cannot be located from these MPCs.
class NoCandidatesError : public std::runtime_error {
public:
  NoCandidatesError() : std::runtime_error("no candidate locations") {}
};

std::vector<CandidateLocation> generate_candidates(const FloorMap& map, Point bs, const Mpc& mpc,
                                                   const MapAtParams& params = {},
                                                   std::size_t mpc_index = 0);

// Single-linkage grouping at cluster_radius_m. Ordered by descending
// distinct_mpc_count, then centroid x, then centroid y. When
// `distance_evaluations` is non-null it receives the number of pairwise
// distances computed.
std::vector<Cluster> cluster_candidates(std::span<const CandidateLocation> candidates,
                                        const MapAtParams& params = {},
                                        std::size_t* distance_evaluations = nullptr);

PositionEstimate estimate_position(std::vector<Cluster> clusters);

PositionEstimate locate(const FloorMap& map, Point bs, std::span<const Mpc> mpcs,
                        const MapAtParams& params = {});

} // namespace mapat
