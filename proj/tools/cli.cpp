// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mapat/error_model.hpp"
#include "mapat/forward_tracer.hpp"
#include "mapat/gpp_measurements.hpp"
#include "mapat/map_at.hpp"
#include "mapat/scenario.hpp"

namespace mapat::cli {

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

unsigned thread_cap() {
  const char* env = std::getenv("MAPAT_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  return (end && *end == '\0') ? static_cast<unsigned>(v) : 0;
}

std::string interaction_string(const std::vector<Interaction>& seq) {
  std::string s;
  for (const auto& it : seq) {
    if (!s.empty()) s += '|';
    s += interaction_code(it.kind);
    s += std::to_string(it.wall);
  }
  return s;
}

struct LocateArgs {
  std::string scenario;
  std::string label;
  bool noise = true;
  std::optional<std::uint64_t> seed;
};

int cmd_trace(const std::string& scenario_path, const std::string& label, std::ostream& out, std::ostream& err) {
  const ScenarioConfig cfg = load_scenario_file(scenario_path);
  const UeSpec* ue = cfg.find_ue(label);
  if (!ue) {
    err << "error: unknown UE label '" << label << "'\n";
    return kUsage;
  }
  const auto paths = trace_paths(cfg.map, cfg.bs, ue->position, cfg.trace_params);
  out << "aoa_deg,tof_ns,path_length_m,n_interactions,interactions,power_dbm\n";
  for (const Mpc& m : paths) {
    out << fixed(rad_to_deg(m.aoa_at_bs), 6) << ',' << fixed(m.tof * 1e9, 6) << ',' << fixed(m.path_length(), 6)
        << ',' << m.n_interactions() << ',' << interaction_string(m.interactions) << ','
        << (m.power_dbm ? fixed(*m.power_dbm, 3) : std::string("NA")) << '\n';
  }
  if (paths.empty()) {
    err << "warning: UE '" << label << "' unreachable: no propagation paths\n";
    return kDomain;
  }
  return kOk;
}

int cmd_locate(const LocateArgs& a, std::ostream& out, std::ostream& err) {
  const ScenarioConfig cfg = load_scenario_file(a.scenario);
  const UeSpec* ue = cfg.find_ue(a.label);
  if (!ue) {
    err << "error: unknown UE label '" << a.label << "'\n";
    return kUsage;
  }
  auto mpcs = trace_paths(cfg.map, cfg.bs, ue->position, cfg.trace_params);
  if (mpcs.empty()) {
    err << "error: UE '" << a.label << "' unreachable: no propagation paths\n";
    return kDomain;
  }
  if (a.noise) {
    NoiseParams noise = cfg.noise;
    if (a.seed) noise.seed = *a.seed;
    for (std::size_t i = 0; i < mpcs.size(); ++i) {
      RngStream rng(noise.seed, 0, static_cast<std::uint32_t>(i));
      mpcs[i] = add_noise(mpcs[i], noise, rng);
    }
  }

  PositionEstimate est;
  try {
    est = locate(cfg.map, cfg.bs, mpcs, cfg.map_at_params);
  } catch (const NoCandidatesError&) {
    err << "error: no candidate locations for UE '" << a.label << "'\n";
    return kDomain;
  }
  out << "ue: " << a.label << '\n'
      << "mpcs: " << mpcs.size() << '\n'
      << "estimate_m: " << fixed(est.point.x, 6) << ' ' << fixed(est.point.y, 6) << '\n'
      << "truth_m: " << fixed(ue->position.x, 6) << ' ' << fixed(ue->position.y, 6) << '\n'
      << "error_cm: " << fixed(100.0 * distance(est.point, ue->position), 6) << '\n'
      << "support: " << est.support << '\n'
      << "candidates: " << est.n_candidates_total << '\n'
      << "tie: " << (est.tie ? "true" : "false") << '\n';
  return kOk;
}

struct UeResult {
  std::string label;
  double distance_m;
  bool los;
  std::size_t n_mpcs;
  ErrorStats stats;
};

void print_summary(const std::vector<UeResult>& results, std::ostream& out) {
  struct Bin {
    const char* name;
    double lo, hi;
  };
  const Bin bins[] = {{"< 10 m", 0.0, 10.0}, {"10 - 35 m", 10.0, 35.0}, {"all", 0.0, INFINITY}};

  auto mean_std = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    const double sd = v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : NAN;
    return std::pair{m, sd};
  };
  auto cell = [](double v, int p) { return std::isnan(v) ? std::string("-") : fixed(v, p); };

  char line[256];
  std::snprintf(line, sizeof line, "%-11s %-13s %9s %9s %-6s %11s %12s\n", "distance", "UE locations", "mu_d(m)",
                "sigma_d(m)", "link", "mu_eps(cm)", "sigma_eps(cm)");
  out << line;
  for (const Bin& bin : bins) {
    for (bool los : {true, false}) {
      std::vector<double> dist, err;
      for (const auto& r : results) {
        if (r.los != los || r.distance_m < bin.lo || r.distance_m >= bin.hi || r.stats.samples == 0) continue;
        dist.push_back(r.distance_m);
        err.push_back(100.0 * r.stats.mean_m);
      }
      if (dist.empty()) continue;
      const auto [md, sd] = mean_std(dist);
      const auto [me, se] = mean_std(err);
      std::snprintf(line, sizeof line, "%-11s %-13zu %9s %9s %-6s %11s %12s\n", bin.name, dist.size(),
                    cell(md, 2).c_str(), cell(sd, 2).c_str(), los ? "LOS" : "NLOS", cell(me, 2).c_str(),
                    cell(se, 2).c_str());
      out << line;
    }
  }
}

int cmd_montecarlo(const std::string& scenario_path, std::optional<std::size_t> runs_override,
                   std::optional<std::uint64_t> seed, const std::string& out_path, std::ostream& out,
                   std::ostream& err) {
  ScenarioConfig cfg = load_scenario_file(scenario_path);
  if (seed) cfg.noise.seed = *seed;
  const std::size_t runs = runs_override.value_or(cfg.runs);
  if (runs == 0) {
    err << "error: --runs must be >= 1\n";
    return kUsage;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "error: cannot write '" << out_path << "'\n";
      return kUsage;
    }
  }

  MonteCarloOptions opts;
  opts.threads = thread_cap();

  std::vector<UeResult> results;
  for (const UeSpec& ue : cfg.ues) {
    const LosResult sight = los_visible(cfg.map, cfg.bs, ue.position);
    // LOS in the table sense: nothing at all between BS and UE.
    UeResult r{ue.label, distance(cfg.bs, ue.position), sight.visible && sight.transmissions == 0, 0, {}};
    const auto mpcs = trace_paths(cfg.map, cfg.bs, ue.position, cfg.trace_params);
    r.n_mpcs = mpcs.size();
    if (mpcs.empty()) {
      err << "warning: UE '" << ue.label << "' unreachable: no propagation paths\n";
      r.stats.outages = runs;
    } else {
      r.stats = monte_carlo_locate_mpcs(cfg.map, cfg.bs, ue.position, mpcs, cfg.map_at_params, cfg.noise, runs, opts);
    }
    results.push_back(std::move(r));
  }

  std::ostringstream csv;
  csv << "label,distance_m,link_type,n_mpcs,runs,mean_error_cm,std_error_cm,outage_rate\n";
  for (const auto& r : results) {
    const bool have = r.stats.samples > 0;
    csv << r.label << ',' << fixed(r.distance_m, 3) << ',' << (r.los ? "LOS" : "NLOS") << ',' << r.n_mpcs << ','
        << r.stats.runs() << ',' << (have ? fixed(100.0 * r.stats.mean_m, 4) : "NA") << ','
        << (r.stats.samples > 1 ? fixed(100.0 * r.stats.std_m, 4) : "NA") << ','
        << fixed(r.stats.outage_rate(), 4) << '\n';
  }
  if (file.is_open()) {
    file << csv.str();
    if (!file.flush()) {
      err << "error: failed writing '" << out_path << "'\n";
      return kUsage;
    }
  } else {
    out << csv.str() << '\n';
  }
  print_summary(results, out);
  return kOk;
}

int cmd_quantize(std::optional<int> mu, std::optional<double> rstd_ts, bool utdoa, std::ostream& out,
                 std::ostream& err) {
  const int chosen = (mu ? 1 : 0) + (rstd_ts ? 1 : 0) + (utdoa ? 1 : 0);
  if (chosen != 1) {
    err << "error: give exactly one of --mu, --rstd-ts, --utdoa\n";
    return kUsage;
  }
  double meters = 0.0;
  try {
    if (mu) meters = gpp::ta_min_distance(*mu);
    else if (rstd_ts) meters = gpp::rstd_resolution(*rstd_ts * gpp::kTs);
    else meters = gpp::utdoa_resolution();
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  out << fixed(meters, 2) << " m\n";
  return kOk;
}

int cmd_lobes(const std::string& path, double threshold_db, std::ostream& out, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open '" << path << "'\n";
    return kUsage;
  }
  std::optional<gpp::PowerAngleProfile> profile;
  try {
    profile.emplace(gpp::read_profile_csv(in));
  } catch (const std::runtime_error& e) {
    err << path << ": " << e.what() << '\n';
    return kUsage;
  }
  out << "mean_angle_deg,total_power_db,members\n";
  for (const auto& lobe : gpp::extract_lobes(*profile, threshold_db)) {
    double deg = rad_to_deg(lobe.mean_angle);
    if (deg >= 359.995) deg = 0.0; // would print as 360.00
    out << fixed(deg, 2) << ',' << fixed(lobe.total_power_db, 2) << ',' << lobe.count << '\n';
  }
  return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Map-assisted mmWave positioning from per-path AoA and ToF"};
  app.require_subcommand(1);

  std::string scenario, label;
  auto* trace = app.add_subcommand("trace", "List the propagation paths between the BS and one UE (CSV)");
  trace->add_option("scenario", scenario, "Scenario JSON file")->required();
  trace->add_option("ue", label, "UE label")->required();

  LocateArgs loc;
  std::uint64_t loc_seed = 0;
  auto* locate_cmd = app.add_subcommand("locate", "Estimate one UE position from its traced MPCs");
  locate_cmd->add_option("scenario", loc.scenario, "Scenario JSON file")->required();
  locate_cmd->add_option("ue", loc.label, "UE label")->required();
  locate_cmd->add_flag("--noise,!--no-noise", loc.noise, "Perturb AoA/ToF with the scenario noise (default on)");
  auto* loc_seed_opt = locate_cmd->add_option("--seed", loc_seed, "Override the scenario seed");

  std::string mc_scenario, mc_out;
  std::size_t mc_runs = 0;
  std::uint64_t mc_seed = 0;
  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo error statistics for every UE");
  mc->add_option("scenario", mc_scenario, "Scenario JSON file")->required();
  auto* mc_runs_opt = mc->add_option("--runs", mc_runs, "Runs per UE (default: scenario value)");
  auto* mc_seed_opt = mc->add_option("--seed", mc_seed, "Override the scenario seed");
  mc->add_option("--out", mc_out, "Per-UE CSV output path (default: standard output)");

  int q_mu = 0;
  double q_rstd = 0.0;
  bool q_utdoa = false;
  auto* quant = app.add_subcommand("quantize", "Distance resolution of 3GPP timing reports");
  auto* mu_opt = quant->add_option("--mu", q_mu, "TA minimum distance for SCS exponent mu (0-5)");
  auto* rstd_opt = quant->add_option("--rstd-ts", q_rstd, "RSTD resolution at this RSTD, in Ts");
  auto* utdoa_opt = quant->add_flag("--utdoa", q_utdoa, "UTDOA resolution");
  mu_opt->excludes(rstd_opt)->excludes(utdoa_opt);
  rstd_opt->excludes(utdoa_opt);

  std::string profile_path;
  double threshold_db = 10.0;
  auto* lobes = app.add_subcommand("lobes", "Spatial lobes of a power-angle profile CSV");
  lobes->add_option("profile", profile_path, "CSV with header azimuth_deg,power_db")->required();
  lobes->add_option("--threshold-db", threshold_db, "Threshold below the peak, dB")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*trace) return cmd_trace(scenario, label, out, err);
    if (*locate_cmd) {
      if (*loc_seed_opt) loc.seed = loc_seed;
      return cmd_locate(loc, out, err);
    }
    if (*mc) {
      return cmd_montecarlo(mc_scenario, *mc_runs_opt ? std::optional<std::size_t>(mc_runs) : std::nullopt,
                            *mc_seed_opt ? std::optional<std::uint64_t>(mc_seed) : std::nullopt, mc_out, out, err);
    }
    if (*quant) {
      return cmd_quantize(*mu_opt ? std::optional<int>(q_mu) : std::nullopt,
                          *rstd_opt ? std::optional<double>(q_rstd) : std::nullopt, q_utdoa, out, err);
    }
    if (*lobes) return cmd_lobes(profile_path, threshold_db, out, err);
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnreachableError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const NoCandidatesError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

} // namespace mapat::cli
