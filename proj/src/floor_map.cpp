// SPDX-License-Identifier: Apache-2.0

#include "mapat/floor_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mapat {

namespace {

using nlohmann::json;

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

Point parse_point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw MapParseError(field + ": expected [x, y] with two numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

MapParseError::MapParseError(const std::string& msg, std::optional<std::size_t> line)
    : std::runtime_error(line ? "line " + std::to_string(*line) + ": " + msg : msg), line_(line) {}

MapValidationError::MapValidationError(const std::string& msg, std::size_t wall_index)
    : InvalidMapError("wall " + std::to_string(wall_index) + ": " + msg), wall_index_(wall_index) {}

FloorMap::FloorMap(std::vector<Wall> walls, double margin_m)
    : walls_(std::move(walls)), margin_(margin_m) {
  if (walls_.empty()) throw InvalidMapError("map has no walls");
  if (!(margin_ >= 0.0) || !std::isfinite(margin_)) throw InvalidMapError("margin must be finite and >= 0");

  for (std::size_t i = 0; i < walls_.size(); ++i) {
    const Wall& w = walls_[i];
    if (!w.a.finite() || !w.b.finite()) throw MapValidationError("non-finite coordinate", i);
    if (w.length() <= kGeomEps) throw MapValidationError("zero-length wall", i);
  }

  Bounds b{walls_[0].a.x, walls_[0].a.y, walls_[0].a.x, walls_[0].a.y};
  for (const Wall& w : walls_) {
    for (Point p : {w.a, w.b}) {
      b.min_x = std::min(b.min_x, p.x);
      b.min_y = std::min(b.min_y, p.y);
      b.max_x = std::max(b.max_x, p.x);
      b.max_y = std::max(b.max_y, p.y);
    }
  }
  bounds_ = {b.min_x - margin_, b.min_y - margin_, b.max_x + margin_, b.max_y + margin_};
}

FloorMap load_map(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw MapParseError(e.what(), line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) throw MapParseError("top level must be an object", 1);

  double margin = kDefaultMapMargin;
  if (auto it = doc.find("margin_m"); it != doc.end()) {
    if (!it->is_number()) throw MapParseError("margin_m: expected a number");
    margin = it->get<double>();
  }

  auto walls_it = doc.find("walls");
  if (walls_it == doc.end() || !walls_it->is_array()) throw MapParseError("walls: expected an array");

  std::vector<Wall> walls;
  walls.reserve(walls_it->size());
  for (std::size_t i = 0; i < walls_it->size(); ++i) {
    const json& jw = (*walls_it)[i];
    const std::string field = "walls[" + std::to_string(i) + "]";
    if (!jw.is_object()) throw MapParseError(field + ": expected an object");
    if (!jw.contains("a") || !jw.contains("b")) throw MapParseError(field + ": missing endpoint a or b");
    Wall w{parse_point(jw["a"], field + ".a"), parse_point(jw["b"], field + ".b"), false};
    if (auto t = jw.find("transmissive"); t != jw.end()) {
      if (!t->is_boolean()) throw MapParseError(field + ".transmissive: expected true or false");
      w.transmissive = t->get<bool>();
    }
    walls.push_back(w);
  }
  return FloorMap(std::move(walls), margin);
}

FloorMap load_map_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapParseError("cannot open map file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_map(buf.str());
}

std::string serialize_map(const FloorMap& map) {
  json walls = json::array();
  for (const Wall& w : map.walls()) {
    walls.push_back({{"a", {w.a.x, w.a.y}}, {"b", {w.b.x, w.b.y}}, {"transmissive", w.transmissive}});
  }
  json doc = {{"margin_m", map.margin()}, {"walls", std::move(walls)}};
  return doc.dump(2) + "\n";
}

bool validate_point_in_bounds(const FloorMap& map, Point p) { return map.bounds().contains(p); }

} // namespace mapat
