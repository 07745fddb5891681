// SPDX-License-Identifier: Apache-2.0
//
// Floor plan: an ordered list of independent wall segments plus a bounding
// rectangle. Map files are JSON:
//
//   { "margin_m": 1.0,
//     "walls": [ { "a": [x, y], "b": [x, y], "transmissive": false }, ... ] }
//
// "margin_m" and "transmissive" are optional (defaults 1.0 and false).

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mapat/geometry.hpp"

namespace mapat {

inline constexpr double kDefaultMapMargin = 1.0;

// Malformed map text. `line` is 1-based when the locus is known.
class MapParseError : public std::runtime_error {
public:
  MapParseError(const std::string& msg, std::optional<std::size_t> line = std::nullopt);
  std::optional<std::size_t> line() const { return line_; }

private:
  std::optional<std::size_t> line_;
};

// Well-formed map text describing an invalid wall.
class MapValidationError : public InvalidMapError {
public:
  MapValidationError(const std::string& msg, std::size_t wall_index);
  std::size_t wall_index() const { return wall_index_; }

private:
  std::size_t wall_index_;
};

struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  // Closed rectangle.
  bool contains(Point p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

class FloorMap {
public:
  // Throws MapValidationError for an invalid wall, InvalidMapError for an
  // empty list or a negative margin.
  explicit FloorMap(std::vector<Wall> walls, double margin_m = kDefaultMapMargin);

  std::span<const Wall> walls() const { return walls_; }
  const Wall& wall(std::size_t i) const { return walls_.at(i); }
  std::size_t size() const { return walls_.size(); }
  const Bounds& bounds() const { return bounds_; }
  double margin() const { return margin_; }

  friend bool operator==(const FloorMap&, const FloorMap&) = default;

private:
  std::vector<Wall> walls_;
  double margin_;
  Bounds bounds_;
};

FloorMap load_map(std::string_view text);
FloorMap load_map_file(const std::filesystem::path& path);
std::string serialize_map(const FloorMap& map);

bool validate_point_in_bounds(const FloorMap& map, Point p);

} // namespace mapat
