// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mapat/error_model.hpp"
#include "mapat/gpp_measurements.hpp"
#include "mapat/map_at.hpp"
#include "mapat/scenario.hpp"
#include "test_support.hpp"

using namespace mapat;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

FloorMap open_space() { return FloorMap({{{-100, -100}, {-99, -100}, false}}, 200.0); }

TraceParams los_only() {
  TraceParams tp;
  tp.max_reflections = 0;
  tp.max_transmissions = 0;
  return tp;
}

Mpc make_mpc(double aoa, double length) {
  Mpc m;
  m.aoa_at_bs = normalize_angle(aoa);
  m.tof = length / kSpeedOfLight;
  return m;
}

// Monte Carlo results shared by criteria 1 and 2.
struct LosRun {
  double r;
  double paper_cm;
  ErrorStats stats;
};
std::vector<LosRun> g_los_runs;
double g_los_seconds = 0.0;

Outcome criterion1() {
  Outcome o;
  const NoiseParams noise;
  const std::size_t runs = 1'000'000;
  const auto t0 = Clock::now();
  for (auto [r, paper] : {std::pair{5.0, 7.56}, {10.0, 10.18}, {20.0, 16.26}}) {
    NoiseParams np = noise;
    np.seed = 1000 + static_cast<std::uint64_t>(r);
    const auto st = monte_carlo_locate(open_space(), {0, 0}, {r, 0}, los_only(), {}, np, runs, {false, 0});
    g_los_runs.push_back({r, paper, st});
    const double mc_cm = 100.0 * st.mean_m;
    const double quad_cm = 100.0 * theoretical_mean_error(r, noise);
    o.check(st.samples == runs, fmt("r=%g outages=%zu", r, st.outages));
    o.check(std::abs(mc_cm - paper) <= 0.03 * paper, fmt("r=%g MC %.4f cm vs %.2f", r, mc_cm, paper));
    o.check(std::abs(quad_cm - paper) <= 0.015 * paper, fmt("quad %.4f cm", quad_cm));
  }
  g_los_seconds = seconds_since(t0);
  o.check(g_los_seconds <= 120.0, fmt("%.1f s for 3e6 runs", g_los_seconds));
  return o;
}

Outcome criterion2() {
  Outcome o;
  if (g_los_runs.empty()) {
    o.check(false, "criterion 1 did not run");
    return o;
  }
  const NoiseParams noise;
  for (const auto& run : g_los_runs) {
    const double emp = run.stats.rms_m * run.stats.rms_m;
    const double a = run.r * noise.sigma_theta, b = kSpeedOfLight * noise.sigma_t;
    const double want = a * a + b * b;
    o.check(std::abs(emp / want - 1.0) <= 0.01, fmt("r=%g E[e^2] %.6g vs %.6g m^2 (%+.3f%%)", run.r, emp, want,
                                                    100.0 * (emp / want - 1.0)));
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::mt19937_64 gen(3003);
  TraceParams tp;
  tp.max_reflections = 2;
  tp.max_transmissions = 1;
  MapAtParams mp;
  mp.max_interactions = 3;
  const int wanted = 200;
  int qualifying = 0, recovered = 0, merged_ghost = 0, ghost_tie = 0, other = 0;
  std::map<std::size_t, int> sizes;
  for (int trial = 0; qualifying < wanted; ++trial) {
    const FloorMap map = testing::random_map(gen, 4 + trial % 17);
    const Point bs = testing::random_free_point(gen, map);
    const Point ue = testing::random_free_point(gen, map);
    const auto mpcs = trace_paths(map, bs, ue, tp);
    if (mpcs.size() < 2) continue;
    ++qualifying;
    ++sizes[map.size()];
    const auto est = locate(map, bs, mpcs, mp);
    const Cluster& win = est.clusters.front();
    const bool within = distance(est.point, ue) <= 1e-6;
    bool one_each = win.members.size() == mpcs.size() && win.distinct_mpc_count == mpcs.size();
    if (within && one_each) {
      ++recovered;
    } else if (!within && est.tie) {
      ++ghost_tie;
    } else if (win.members.size() > win.distinct_mpc_count) {
      ++merged_ghost;
    } else {
      ++other;
    }
  }
  o.check(sizes.begin()->first == 4 && sizes.rbegin()->first == 20, fmt("%zu wall counts 4-20", sizes.size()));
  o.check(recovered == qualifying, fmt("recovered %d/%d (mirror ghost within radius %d, equal-support ghost tie %d, "
                                       "other %d)",
                                       recovered, qualifying, merged_ghost, ghost_tie, other));
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 gen(4004);
  std::uniform_real_distribution<double> ang(0, kTwoPi), len(1, 80);
  std::size_t max_seen_ratio_num = 0;
  int scenarios = 0;
  bool bound_ok = true;
  for (int trial = 0; trial < 500; ++trial) {
    const FloorMap map = testing::random_map(gen, 4 + trial % 17);
    const Point bs = testing::random_free_point(gen, map);
    MapAtParams mp;
    mp.max_interactions = trial % 6;
    const std::size_t cap = std::size_t{1} << mp.max_interactions;
    std::vector<Mpc> mpcs;
    for (int m = 0; m < 1 + trial % 5; ++m) mpcs.push_back(make_mpc(ang(gen), len(gen)));
    std::size_t total = 0;
    for (std::size_t i = 0; i < mpcs.size(); ++i) {
      const std::size_t n = generate_candidates(map, bs, mpcs[i], mp, i).size();
      bound_ok = bound_ok && n <= cap;
      max_seen_ratio_num = std::max(max_seen_ratio_num, n * 1000 / cap);
      total += n;
    }
    bound_ok = bound_ok && total <= cap * mpcs.size();
    ++scenarios;
  }
  o.check(bound_ok, fmt("%d random scenarios within 2^k per MPC and 2^k*M total (max fill %.3f)", scenarios,
                        static_cast<double>(max_seen_ratio_num) / 1000.0));

  // Corridor y=0..4 between outer walls y=-3 and y=7; every branch spends
  // exactly two interactions and stops before a third wall.
  const FloorMap corridor({{{-10, -3}, {10, -3}, false},
                           {{-10, 0}, {10, 0}, false},
                           {{-10, 4}, {10, 4}, false},
                           {{-10, 7}, {10, 7}, false}},
                          5.0);
  MapAtParams k2;
  k2.max_interactions = 2;
  std::vector<Mpc> mpcs;
  for (double deg : {75.0, 80.0, 85.0}) mpcs.push_back(make_mpc(deg_to_rad(deg), 8.0 / std::sin(deg_to_rad(deg))));
  std::size_t total = 0;
  bool each = true;
  for (std::size_t i = 0; i < mpcs.size(); ++i) {
    const std::size_t n = generate_candidates(corridor, {0, 1}, mpcs[i], k2, i).size();
    each = each && n == 4;
    total += n;
  }
  o.check(each && total == 12, fmt("corridor k=2: %zu candidates = 2^2 * 3", total));
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 gen(5005);
  std::uniform_real_distribution<double> u(0, 1), ang(0, kTwoPi);
  const std::pair<double, double> perturbations[] = {
      {0.25e-9, deg_to_rad(0.5)}, {-0.4e-9, deg_to_rad(0.3)}, {0.1e-9, deg_to_rad(-0.8)}, {-0.05e-9, deg_to_rad(-0.2)}};
  int cases = 0;
  double worst = 0.0;
  while (cases < 1000) {
    // random rigid placement of a 40 m wall with BS and UE on one side
    const double th = ang(gen);
    const Point origin{40 * u(gen) - 20, 40 * u(gen) - 20};
    const Point t = unit_vector(th), n{-t.y, t.x};
    auto place = [&](double along, double off) { return origin + along * t + off * n; };
    const Wall wall{place(-20, 0), place(20, 0), false};
    const Point bs = place(16 * u(gen) - 8, 0.5 + 9.5 * u(gen));
    const Point ue = place(16 * u(gen) - 8, 0.5 + 9.5 * u(gen));
    if (distance(bs, ue) < 0.5) continue;
    const FloorMap map({wall}, 30.0);
    TraceParams tp;
    tp.max_reflections = 1;
    tp.max_transmissions = 0;
    const auto paths = trace_paths(map, bs, ue, tp);
    if (paths.size() != 2 || paths[1].n_interactions() != 1) continue;

    const auto [dt, dth] = perturbations[cases % 4];
    const Mpc& truth = paths[1];
    Mpc noisy = truth;
    noisy.tof += dt;
    noisy.aoa_at_bs = normalize_angle(truth.aoa_at_bs + dth);
    MapAtParams mp;
    mp.max_interactions = 1;
    const auto cands = generate_candidates(map, bs, noisy, mp);
    const CandidateLocation* refl = nullptr;
    for (const auto& c : cands)
      if (c.interactions.size() == 1 && c.interactions[0].kind == InteractionKind::Reflection) refl = &c;
    if (!refl) continue;

    // LOS path of the same length with the same perturbations, in closed form
    const double len = truth.path_length(), dl = kSpeedOfLight * dt;
    const double los_err = std::hypot((len + dl) * std::cos(dth) - len, (len + dl) * std::sin(dth));
    worst = std::max(worst, std::abs(distance(refl->point, ue) - los_err));
    ++cases;
  }
  o.check(worst <= 1e-6, fmt("%d cases, max |reflected - LOS| = %.3g m", cases, worst));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const double r = 10.0;
  const std::size_t runs = 100'000;
  const Point ue{r, 0};
  double base_x = 0.0, base_y = 0.0;
  for (std::size_t n : {1, 2, 4, 8}) {
    const std::vector<Mpc> mpcs(n, make_mpc(0.0, r));
    NoiseParams np;
    np.seed = 6006;
    const auto st = monte_carlo_locate_mpcs(open_space(), {0, 0}, ue, mpcs, {}, np, runs, {true, 0});
    double sx = 0, sy = 0, sxx = 0, syy = 0;
    for (const Point& d : st.per_sample_offsets) {
      sx += d.x;
      sy += d.y;
      sxx += d.x * d.x;
      syy += d.y * d.y;
    }
    const double m = static_cast<double>(st.per_sample_offsets.size());
    const double vx = (sxx - sx * sx / m) / (m - 1), vy = (syy - sy * sy / m) / (m - 1);
    if (n == 1) {
      base_x = vx;
      base_y = vy;
    }
    const double rx = vx * n / base_x, ry = vy * n / base_y;
    o.check(st.outages == 0 && std::abs(rx - 1) <= 0.1 && std::abs(ry - 1) <= 0.1,
            fmt("N=%zu var*N/var1 radial %.4f tangential %.4f", n, rx, ry));
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  using namespace gpp;
  auto near = [&](double got, double want, const char* what) {
    o.check(std::abs(got - want) <= 0.01, fmt("%s %.4f", what, got));
  };
  near(ta_min_distance(2), 19.53, "TA mu=2");
  near(ta_min_distance(5), 2.44, "TA mu=5");
  near(rstd_resolution(1000 * kTs), 4.88, "RSTD fine");
  near(rstd_resolution(5000 * kTs), 9.76, "RSTD coarse");
  near(utdoa_resolution(), 19.51, "UTDOA");
  const bool boundary = rstd_resolution(4096 * kTs) == 0.5 * kReportingSpeedOfLight * kTs &&
                        rstd_resolution(std::nextafter(4096 * kTs, 1.0)) == kReportingSpeedOfLight * kTs;
  o.check(boundary, "4096 Ts inclusive");
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 gen(8008);
  std::uniform_real_distribution<double> thr(1.0, 30.0);
  std::bernoulli_distribution force_seam(0.5);
  int lobes = 0, seams = 0, mismatched = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const bool circular = trial % 2 == 0;
    auto profile = testing::random_profile(gen, circular);
    if (circular && force_seam(gen)) {
      // put the peak on both ends of the sweep so a lobe straddles the seam
      std::vector<gpp::ProfileSample> s(profile.samples().begin(), profile.samples().end());
      s.front().power_db = 0.5;
      s.back().power_db = 0.5;
      profile = gpp::PowerAngleProfile(std::move(s));
    }
    const double t = thr(gen);
    const auto got = gpp::extract_lobes(profile, t);
    const auto want = testing::brute_force_lobes(profile, t);
    if (got.size() != want.size()) ++mismatched;
    for (const auto& lobe : got) {
      const auto members = testing::lobe_members(lobe, profile.size());
      const auto it = std::find_if(want.begin(), want.end(), [&](const auto& w) { return w.members == members; });
      if (it == want.end()) {
        ++mismatched;
        continue;
      }
      worst = std::max(worst, testing::angle_gap(lobe.mean_angle, it->mean_angle));
      ++lobes;
      if (lobe.first_index + lobe.count > profile.size()) ++seams;
    }
  }
  o.check(mismatched == 0, fmt("%d lobes matched by membership", lobes));
  o.check(worst <= 1e-12, fmt("max angle diff %.3g rad", worst));
  o.check(seams > 0, fmt("%d seam-wrapping lobes", seams));
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 gen(9009);
  TraceParams tp;
  tp.max_reflections = 3;
  tp.max_transmissions = 1;
  tp.max_paths = 4;
  MapAtParams mp;
  mp.max_interactions = 3;
  for (;;) {
    const FloorMap map = testing::random_map(gen, 20);
    const Point bs = testing::random_free_point(gen, map);
    const Point ue = testing::random_free_point(gen, map);
    const auto mpcs = trace_paths(map, bs, ue, tp);
    if (mpcs.size() < 4) continue;

    const int reps = 2000;
    std::size_t sink = 0;
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i)
      for (std::size_t m = 0; m < mpcs.size(); ++m) sink += generate_candidates(map, bs, mpcs[m], mp, m).size();
    const double per_mpc_ms = 1e3 * seconds_since(t0) / (reps * static_cast<double>(mpcs.size()));
    t0 = Clock::now();
    for (int i = 0; i < reps; ++i) sink += locate(map, bs, mpcs, mp).support;
    const double locate_ms = 1e3 * seconds_since(t0) / reps;
    o.check(sink > 0 && per_mpc_ms <= 1.0, fmt("generate_candidates %.2f us/MPC", 1e3 * per_mpc_ms));
    o.check(locate_ms <= 5.0, fmt("locate(4 MPCs) %.2f us", 1e3 * locate_ms));
    return o;
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string f; std::getline(in, f, sep);) out.push_back(f);
  return out;
}

Outcome criterion10() {
  Outcome o;
  const std::string scen = std::string(MAPAT_DATA_DIR) + "/office_scenario.json";
  const auto csv_path = std::filesystem::temp_directory_path() / "mapat_acceptance_office.csv";
  std::ostringstream out, err;
  const int code = cli::run({"montecarlo", scen, "--out", csv_path.string()}, out, err);
  o.check(code == cli::kOk, fmt("montecarlo exit %d", code));
  std::printf("%s", out.str().c_str());

  const ScenarioConfig cfg = load_scenario_file(scen);
  std::ifstream in(csv_path);
  std::string line;
  std::getline(in, line);
  struct Bin {
    const char* name;
    double lo, hi;
    std::vector<double> measured, theory;
  };
  Bin bins[] = {{"< 10 m", 0, 10, {}, {}}, {"10 - 35 m", 10, 35, {}, {}}, {"all", 0, INFINITY, {}, {}}};
  int nlos_rows = 0, nlos_sane = 0;
  while (std::getline(in, line)) {
    const auto f = split(line, ',');
    if (f.size() != 8) {
      o.check(false, "malformed CSV row");
      continue;
    }
    const double d = std::stod(f[1]);
    if (f[2] == "NLOS") {
      ++nlos_rows;
      if (f[5] == "NA" || std::isfinite(std::stod(f[5]))) ++nlos_sane;
      continue;
    }
    for (Bin& b : bins) {
      if (d < b.lo || d >= b.hi) continue;
      b.measured.push_back(std::stod(f[5]));
      b.theory.push_back(100.0 * theoretical_mean_error(d, cfg.noise));
    }
  }
  std::filesystem::remove(csv_path);
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  for (const Bin& b : bins) {
    if (b.measured.empty()) {
      o.check(false, fmt("LOS bin %s empty", b.name));
      continue;
    }
    const double m = mean(b.measured), t = mean(b.theory);
    o.check(std::abs(m / t - 1.0) <= 0.4, fmt("LOS %s: %.2f cm vs theory %.2f (%+.0f%%)", b.name, m, t,
                                              100.0 * (m / t - 1.0)));
  }
  o.check(nlos_rows > 0 && nlos_sane == nlos_rows, fmt("%d NLOS rows reported", nlos_rows));
  return o;
}

} // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"theoretical error reproduction", criterion1},
      {"second-moment identity", criterion2},
      {"zero-noise round trip", criterion3},
      {"candidate-count bound", criterion4},
      {"mirror-length invariance", criterion5},
      {"variance reduction 1/N", criterion6},
      {"quantization constants", criterion7},
      {"lobe mean-angle oracle", criterion8},
      {"performance envelope", criterion9},
      {"office scenario smoke", criterion10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %2zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
