// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mapat/error_model.hpp"
#include "mapat/floor_map.hpp"
#include "mapat/forward_tracer.hpp"
#include "mapat/gpp_measurements.hpp"
#include "mapat/map_at.hpp"
#include "mapat/scenario.hpp"

namespace py = pybind11;
using namespace mapat;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Map-assisted mmWave positioning from per-path AoA and ToF";

  py::register_exception<NoCandidatesError>(m, "NoCandidatesError", PyExc_RuntimeError);
  py::register_exception<UnreachableError>(m, "UnreachableError", PyExc_RuntimeError);
  py::register_exception<InvalidMapError>(m, "InvalidMapError", PyExc_ValueError);
  py::register_exception<MapParseError>(m, "MapParseError", PyExc_ValueError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;

  py::class_<Point>(m, "Point")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def(py::init([](const py::tuple& t) {
        if (t.size() != 2) throw py::value_error("Point needs exactly two coordinates");
        return Point{t[0].cast<double>(), t[1].cast<double>()};
      }))
      .def_readwrite("x", &Point::x)
      .def_readwrite("y", &Point::y)
      .def("__iter__", [](const Point& p) { return py::iter(py::make_tuple(p.x, p.y)); })
      .def("__repr__", [](const Point& p) { return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")"; });
  py::implicitly_convertible<py::tuple, Point>();

  py::class_<Wall>(m, "Wall")
      .def(py::init([](Point a, Point b, bool t) { return Wall{a, b, t}; }), py::arg("a"), py::arg("b"),
           py::arg("transmissive") = false)
      .def_readwrite("a", &Wall::a)
      .def_readwrite("b", &Wall::b)
      .def_readwrite("transmissive", &Wall::transmissive);

  m.def("mirror_point", &mirror_point, py::arg("p"), py::arg("wall"));
  m.def("side_of", &side_of, py::arg("wall"), py::arg("p"));

  py::class_<Bounds>(m, "Bounds")
      .def_readonly("min_x", &Bounds::min_x)
      .def_readonly("min_y", &Bounds::min_y)
      .def_readonly("max_x", &Bounds::max_x)
      .def_readonly("max_y", &Bounds::max_y);

  py::class_<FloorMap>(m, "FloorMap")
      .def(py::init<std::vector<Wall>, double>(), py::arg("walls"), py::arg("margin_m") = kDefaultMapMargin)
      .def_property_readonly("walls", [](const FloorMap& fm) { return std::vector<Wall>(fm.walls().begin(), fm.walls().end()); })
      .def_property_readonly("bounds", &FloorMap::bounds)
      .def_property_readonly("margin", &FloorMap::margin)
      .def("contains", [](const FloorMap& fm, Point p) { return validate_point_in_bounds(fm, p); })
      .def("to_json", &serialize_map);
  m.def("load_map", [](const std::string& text) { return load_map(text); }, py::arg("text"));
  m.def("load_map_file", &load_map_file, py::arg("path"));

  py::enum_<InteractionKind>(m, "InteractionKind")
      .value("REFLECTION", InteractionKind::Reflection)
      .value("TRANSMISSION", InteractionKind::Transmission);
  py::class_<Interaction>(m, "Interaction")
      .def_readonly("wall", &Interaction::wall)
      .def_readonly("kind", &Interaction::kind);

  py::class_<Mpc>(m, "Mpc")
      .def(py::init([](double aoa, double tof) {
             Mpc mpc;
             mpc.aoa_at_bs = normalize_angle(aoa);
             mpc.tof = tof;
             return mpc;
           }),
           py::arg("aoa_at_bs"), py::arg("tof"))
      .def_readwrite("aoa_at_bs", &Mpc::aoa_at_bs)
      .def_readwrite("tof", &Mpc::tof)
      .def_readwrite("power_dbm", &Mpc::power_dbm)
      .def_readonly("interactions", &Mpc::interactions)
      .def_property_readonly("n_interactions", &Mpc::n_interactions)
      .def_property_readonly("path_length", &Mpc::path_length);

  py::class_<TraceParams>(m, "TraceParams")
      .def(py::init<>())
      .def_readwrite("max_reflections", &TraceParams::max_reflections)
      .def_readwrite("max_transmissions", &TraceParams::max_transmissions)
      .def_readwrite("frequency_hz", &TraceParams::frequency_hz)
      .def_readwrite("reflection_loss_db", &TraceParams::reflection_loss_db)
      .def_readwrite("transmission_loss_db", &TraceParams::transmission_loss_db)
      .def_readwrite("max_paths", &TraceParams::max_paths);

  m.def("trace_paths", &trace_paths, py::arg("map"), py::arg("bs"), py::arg("ue"), py::arg("params") = TraceParams{});
  m.def(
      "los_visible",
      [](const FloorMap& fm, Point p, Point q) {
        const auto r = los_visible(fm, p, q);
        return py::make_tuple(r.visible, r.transmissions);
      },
      py::arg("map"), py::arg("p"), py::arg("q"));

  py::class_<MapAtParams>(m, "MapAtParams")
      .def(py::init<>())
      .def_readwrite("max_interactions", &MapAtParams::max_interactions)
      .def_readwrite("cluster_radius_m", &MapAtParams::cluster_radius_m)
      .def_readwrite("min_leg_m", &MapAtParams::min_leg_m);

  py::class_<CandidateLocation>(m, "CandidateLocation")
      .def_readonly("point", &CandidateLocation::point)
      .def_readonly("mpc_index", &CandidateLocation::mpc_index)
      .def_readonly("interactions", &CandidateLocation::interactions)
      .def_readonly("residual_path_m", &CandidateLocation::residual_path_m);

  py::class_<Cluster>(m, "Cluster")
      .def_readonly("members", &Cluster::members)
      .def_readonly("centroid", &Cluster::centroid)
      .def_readonly("distinct_mpc_count", &Cluster::distinct_mpc_count);

  py::class_<PositionEstimate>(m, "PositionEstimate")
      .def_readonly("point", &PositionEstimate::point)
      .def_readonly("support", &PositionEstimate::support)
      .def_readonly("n_candidates_total", &PositionEstimate::n_candidates_total)
      .def_readonly("tie", &PositionEstimate::tie)
      .def_readonly("clusters", &PositionEstimate::clusters);

  m.def(
      "generate_candidates",
      [](const FloorMap& fm, Point bs, const Mpc& mpc, const MapAtParams& p) {
        return generate_candidates(fm, bs, mpc, p);
      },
      py::arg("map"), py::arg("bs"), py::arg("mpc"), py::arg("params") = MapAtParams{});
  m.def(
      "cluster_candidates",
      [](const std::vector<CandidateLocation>& c, const MapAtParams& p) { return cluster_candidates(c, p); },
      py::arg("candidates"), py::arg("params") = MapAtParams{});
  m.def(
      "locate",
      [](const FloorMap& fm, Point bs, const std::vector<Mpc>& mpcs, const MapAtParams& p) {
        return locate(fm, bs, mpcs, p);
      },
      py::arg("map"), py::arg("bs"), py::arg("mpcs"), py::arg("params") = MapAtParams{});

  py::class_<NoiseParams>(m, "NoiseParams")
      .def(py::init<>())
      .def_readwrite("sigma_t", &NoiseParams::sigma_t)
      .def_readwrite("sigma_theta", &NoiseParams::sigma_theta)
      .def_readwrite("seed", &NoiseParams::seed);

  py::class_<ErrorStats>(m, "ErrorStats")
      .def_readonly("mean_m", &ErrorStats::mean_m)
      .def_readonly("std_m", &ErrorStats::std_m)
      .def_readonly("rms_m", &ErrorStats::rms_m)
      .def_readonly("samples", &ErrorStats::samples)
      .def_readonly("outages", &ErrorStats::outages)
      .def_readonly("per_sample_errors", &ErrorStats::per_sample_errors)
      .def_property_readonly("outage_rate", &ErrorStats::outage_rate);

  m.def("theoretical_mean_error", &theoretical_mean_error, py::arg("r"), py::arg("noise") = NoiseParams{});
  m.def(
      "monte_carlo_locate",
      [](const FloorMap& fm, Point bs, Point ue, const TraceParams& tp, const MapAtParams& mp, const NoiseParams& np,
         std::size_t runs, bool keep_samples, unsigned threads) {
        py::gil_scoped_release release;
        return monte_carlo_locate(fm, bs, ue, tp, mp, np, runs, {keep_samples, threads});
      },
      py::arg("map"), py::arg("bs"), py::arg("ue"), py::arg("trace_params") = TraceParams{},
      py::arg("map_at_params") = MapAtParams{}, py::arg("noise") = NoiseParams{}, py::arg("runs") = 1000,
      py::arg("keep_samples") = false, py::arg("threads") = 1);

  auto g = m.def_submodule("gpp", "3GPP report resolutions and spatial lobes");
  g.attr("TS") = gpp::kTs;
  g.def("ta_min_distance", &gpp::ta_min_distance, py::arg("mu"));
  g.def("rstd_resolution", &gpp::rstd_resolution, py::arg("rstd_s"));
  g.def("utdoa_resolution", &gpp::utdoa_resolution);
  g.def(
      "absolute_delays",
      [](double rtt, const std::vector<double>& rel) { return gpp::absolute_delays(rtt, rel); },
      py::arg("ta_rtt_s"), py::arg("relative_delays_s"));
  g.def("quantize_delay", &gpp::quantize_delay, py::arg("delay_s"), py::arg("resolution_m"));

  py::class_<gpp::Lobe>(g, "Lobe")
      .def_readonly("mean_angle", &gpp::Lobe::mean_angle)
      .def_readonly("total_power_db", &gpp::Lobe::total_power_db)
      .def_readonly("first_index", &gpp::Lobe::first_index)
      .def_readonly("count", &gpp::Lobe::count);
  g.def(
      "extract_lobes",
      [](const std::vector<double>& azimuths, const std::vector<double>& powers_db, double threshold_db) {
        if (azimuths.size() != powers_db.size()) throw py::value_error("azimuths and powers_db differ in length");
        std::vector<gpp::ProfileSample> s;
        for (std::size_t i = 0; i < azimuths.size(); ++i) s.push_back({azimuths[i], powers_db[i]});
        return gpp::extract_lobes(gpp::PowerAngleProfile(std::move(s)), threshold_db);
      },
      py::arg("azimuths"), py::arg("powers_db"), py::arg("threshold_db") = 10.0);
}
