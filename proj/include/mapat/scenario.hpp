// SPDX-License-Identifier: Apache-2.0
//
// Batch scenario description (JSON):
//
//   {
//     "map": "office_map.json",   // path relative to this file, or an inline map object
//     "bs": [x, y],
//     "ues": [ { "label": "UE1", "position": [x, y] }, ... ],
//     "trace":  { "max_reflections": 3, "max_transmissions": 1, "frequency_hz": 28e9,
//                 "reflection_loss_db": 7, "transmission_loss_db": 10, "max_paths": 0 },
//     "map_at": { "max_interactions": 3, "cluster_radius_m": 0.5, "min_leg_m": 0.001 },
//     "noise":  { "sigma_t_ns": 0.25, "sigma_theta_deg": 0.5, "seed": 1 },
//     "runs": 1000
//   }
//
// Every section except "map", "bs" and "ues" is optional.

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mapat/error_model.hpp"
#include "mapat/floor_map.hpp"
#include "mapat/forward_tracer.hpp"
#include "mapat/map_at.hpp"

namespace mapat {

class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct UeSpec {
  std::string label;
  Point position;
};

struct ScenarioConfig {
  FloorMap map;
  Point bs;
  std::vector<UeSpec> ues;
  TraceParams trace_params;
  MapAtParams map_at_params;
  NoiseParams noise;
  std::size_t runs = 1000;

  const UeSpec* find_ue(std::string_view label) const;
};

// `base_dir` resolves a relative "map" path.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

} // namespace mapat
