// SPDX-License-Identifier: Apache-2.0
//
// Image-method forward tracer. Produces the multipath components (MPCs) a
// base station would observe from a UE: exact arrival azimuth, time of
// flight and a synthetic received power.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mapat/floor_map.hpp"
#include "mapat/geometry.hpp"

namespace mapat {

enum class InteractionKind { Reflection, Transmission };

struct Interaction {
  std::size_t wall = 0;
  InteractionKind kind = InteractionKind::Reflection;

  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

char interaction_code(InteractionKind kind); // 'R' or 'T'

struct Mpc {
  double aoa_at_bs = 0.0; // radians, [0, 2pi)
  double tof = 0.0;       // seconds
  std::optional<double> power_dbm;
  std::vector<Interaction> interactions; // ordered BS -> UE

  std::size_t n_interactions() const { return interactions.size(); }
  double path_length() const { return tof * kSpeedOfLight; }
};

struct TraceParams {
  int max_reflections = 3;
  int max_transmissions = 1;
  double frequency_hz = 28e9;
  // Synthetic loss model; only used to weight lobes.
  double reflection_loss_db = 7.0;
  double transmission_loss_db = 10.0;
  // Keep only the N strongest paths; 0 keeps all.
  std::size_t max_paths = 0;

  void validate() const;
};

// Free-space path loss in dB.
double fspl_db(double distance_m, double frequency_hz);

struct LosResult {
  bool visible = false;
  int transmissions = 0;
};

// Walls crossed by the open segment p-q. Visible when every crossed wall is
// transmissive.
LosResult los_visible(const FloorMap& map, Point p, Point q);

// Every specular path with at most max_reflections reflections and
// max_transmissions straight-through transmissions, sorted by (tof,
// interaction sequence). With max_paths set, only the strongest paths
// remain. Throws PreconditionError when bs == ue or either lies outside the
// map bounds.
std::vector<Mpc> trace_paths(const FloorMap& map, Point bs, Point ue, const TraceParams& params = {});

} // namespace mapat
