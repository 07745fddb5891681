// SPDX-License-Identifier: Apache-2.0

#include "mapat/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mapat {

namespace {

using nlohmann::json;

Point read_point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ScenarioError(field + ": expected [x, y]");
  Point p{j[0].get<double>(), j[1].get<double>()};
  if (!p.finite()) throw ScenarioError(field + ": non-finite coordinate");
  return p;
}

template <typename T>
void read_opt(const json& obj, const char* key, T& dst, const std::string& section) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    dst = it->get<T>();
  } catch (const json::exception&) {
    throw ScenarioError(section + "." + key + ": wrong type");
  }
}

const json* section(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) return nullptr;
  if (!it->is_object()) throw ScenarioError(std::string(key) + ": expected an object");
  return &*it;
}

FloorMap read_map(const json& j, const std::filesystem::path& base_dir) {
  try {
    if (j.is_string()) {
      std::filesystem::path p = j.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      return load_map_file(p);
    }
    if (j.is_object()) return load_map(j.dump());
  } catch (const std::runtime_error& e) {
    throw ScenarioError(std::string("map: ") + e.what());
  }
  throw ScenarioError("map: expected a file path or an inline map object");
}

} // namespace

const UeSpec* ScenarioConfig::find_ue(std::string_view label) const {
  for (const auto& ue : ues)
    if (ue.label == label) return &ue;
  return nullptr;
}

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("scenario: top level must be an object");
  if (!doc.contains("map")) throw ScenarioError("scenario: missing \"map\"");
  if (!doc.contains("bs")) throw ScenarioError("scenario: missing \"bs\"");

  ScenarioConfig cfg{read_map(doc["map"], base_dir), read_point(doc["bs"], "bs"), {}, {}, {}, {}, 1000};

  auto ues = doc.find("ues");
  if (ues == doc.end() || !ues->is_array() || ues->empty()) throw ScenarioError("ues: expected a non-empty array");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < ues->size(); ++i) {
    const json& u = (*ues)[i];
    const std::string field = "ues[" + std::to_string(i) + "]";
    if (!u.is_object() || !u.contains("label") || !u["label"].is_string() || !u.contains("position"))
      throw ScenarioError(field + ": expected {\"label\": string, \"position\": [x, y]}");
    UeSpec ue{u["label"].get<std::string>(), read_point(u["position"], field + ".position")};
    if (!labels.insert(ue.label).second) throw ScenarioError(field + ": duplicate label " + ue.label);
    cfg.ues.push_back(std::move(ue));
  }

  if (const json* t = section(doc, "trace")) {
    read_opt(*t, "max_reflections", cfg.trace_params.max_reflections, "trace");
    read_opt(*t, "max_transmissions", cfg.trace_params.max_transmissions, "trace");
    read_opt(*t, "frequency_hz", cfg.trace_params.frequency_hz, "trace");
    read_opt(*t, "reflection_loss_db", cfg.trace_params.reflection_loss_db, "trace");
    read_opt(*t, "transmission_loss_db", cfg.trace_params.transmission_loss_db, "trace");
    read_opt(*t, "max_paths", cfg.trace_params.max_paths, "trace");
  }
  if (const json* m = section(doc, "map_at")) {
    read_opt(*m, "max_interactions", cfg.map_at_params.max_interactions, "map_at");
    read_opt(*m, "cluster_radius_m", cfg.map_at_params.cluster_radius_m, "map_at");
    read_opt(*m, "min_leg_m", cfg.map_at_params.min_leg_m, "map_at");
  }
  if (const json* n = section(doc, "noise")) {
    double sigma_t_ns = cfg.noise.sigma_t * 1e9;
    double sigma_theta_deg = rad_to_deg(cfg.noise.sigma_theta);
    read_opt(*n, "sigma_t_ns", sigma_t_ns, "noise");
    read_opt(*n, "sigma_theta_deg", sigma_theta_deg, "noise");
    read_opt(*n, "seed", cfg.noise.seed, "noise");
    cfg.noise.sigma_t = sigma_t_ns * 1e-9;
    cfg.noise.sigma_theta = deg_to_rad(sigma_theta_deg);
  }
  if (auto r = doc.find("runs"); r != doc.end()) {
    if (!r->is_number_integer() || r->get<long long>() < 1) throw ScenarioError("runs: expected an integer >= 1");
    cfg.runs = r->get<std::size_t>();
  }

  try {
    cfg.trace_params.validate();
    cfg.map_at_params.validate();
    cfg.noise.validate();
  } catch (const PreconditionError& e) {
    throw ScenarioError(e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

} // namespace mapat
