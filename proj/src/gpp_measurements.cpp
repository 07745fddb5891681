// SPDX-License-Identifier: Apache-2.0

#include "mapat/gpp_measurements.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mapat::gpp {

double ta_min_distance(int mu) {
  if (mu < 0 || mu > 5) throw PreconditionError("ta_min_distance: mu must be in [0, 5]");
  return 78.12 / static_cast<double>(1 << mu);
}

double rstd_resolution(double rstd_s) {
  if (!(rstd_s >= 0.0) || rstd_s > kRstdMaxTs * kTs) throw PreconditionError("rstd_resolution: RSTD not reportable");
  const double ts_m = kReportingSpeedOfLight * kTs;
  return rstd_s <= kRstdFineLimitTs * kTs ? 0.5 * ts_m : ts_m;
}

double utdoa_resolution() { return kReportingSpeedOfLight * 2.0 * kTs; }

std::vector<double> absolute_delays(double ta_rtt_s, std::span<const double> relative_delays_s) {
  if (!(ta_rtt_s > 0.0)) throw PreconditionError("absolute_delays: TA round trip must be > 0");
  std::vector<double> out;
  out.reserve(relative_delays_s.size());
  for (double rel : relative_delays_s) {
    if (!(rel >= 0.0)) throw PreconditionError("absolute_delays: negative relative delay");
    out.push_back(0.5 * ta_rtt_s + rel);
  }
  return out;
}

double quantize_delay(double delay_s, double resolution_m) {
  if (!(delay_s >= 0.0)) throw PreconditionError("quantize_delay: delay must be >= 0");
  if (!(resolution_m > 0.0)) throw PreconditionError("quantize_delay: resolution must be > 0");
  const double quantum = resolution_m / kReportingSpeedOfLight;
  return std::floor(delay_s / quantum + 0.5) * quantum;
}

PowerAngleProfile::PowerAngleProfile(std::vector<ProfileSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw PreconditionError("power-angle profile is empty");
  for (const auto& s : samples_) {
    if (!std::isfinite(s.azimuth) || !std::isfinite(s.power_db))
      throw PreconditionError("power-angle profile has a non-finite value");
  }
  if (samples_.size() == 1) return;

  step_ = samples_[1].azimuth - samples_[0].azimuth;
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    const double d = samples_[i].azimuth - samples_[i - 1].azimuth;
    if (!(d > 0.0)) throw PreconditionError("power-angle profile azimuths must be strictly increasing");
    if (std::abs(d - step_) > 1e-9) throw PreconditionError("power-angle profile spacing is not uniform");
  }
  if (samples_.back().azimuth - samples_.front().azimuth >= kTwoPi)
    throw PreconditionError("power-angle profile spans 2 pi or more");
  circular_ = std::abs(static_cast<double>(samples_.size()) * step_ - kTwoPi) <= 1e-9 * samples_.size();
}

PowerAngleProfile read_profile_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + msg);
  };

  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  };

  if (!std::getline(in, line)) {
    line_no = 1;
    fail("missing header");
  }
  ++line_no;
  if (strip(line) != "azimuth_deg,power_db") fail("expected header 'azimuth_deg,power_db'");

  std::vector<ProfileSample> samples;
  double prev_deg = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      fail("expected two comma-separated fields");
    double az = 0.0, pw = 0.0;
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma), p = line.substr(comma + 1);
      az = std::stod(a, &used);
      if (used != a.size()) fail("azimuth_deg is not a number");
      pw = std::stod(p, &used);
      if (used != p.size()) fail("power_db is not a number");
    } catch (const std::logic_error&) {
      fail("field is not a number");
    }
    if (!std::isfinite(az) || !std::isfinite(pw)) fail("non-finite value");
    if (!samples.empty() && !(az > prev_deg)) fail("azimuth_deg must be strictly increasing");
    prev_deg = az;
    samples.push_back({deg_to_rad(az), pw});
  }
  if (samples.empty()) fail("no samples");
  try {
    return PowerAngleProfile(std::move(samples));
  } catch (const PreconditionError& e) {
    throw std::runtime_error(e.what());
  }
}

std::vector<Lobe> extract_lobes(const PowerAngleProfile& profile, double threshold_db) {
  const auto samples = profile.samples();
  const std::size_t n = samples.size();
  double peak = samples[0].power_db;
  for (const auto& s : samples) peak = std::max(peak, s.power_db);
  const double floor_db = peak - threshold_db;

  std::vector<bool> above(n);
  for (std::size_t i = 0; i < n; ++i) above[i] = samples[i].power_db >= floor_db;

  // Runs as (start, count). On a closed sweep a run ending at n-1 joins one
  // starting at 0.
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < n;) {
    if (!above[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && above[j]) ++j;
    runs.emplace_back(i, j - i);
    i = j;
  }
  if (profile.circular() && runs.size() > 1 && runs.front().first == 0 &&
      runs.back().first + runs.back().second == n) {
    runs.back().second += runs.front().second;
    runs.erase(runs.begin());
  }

  std::vector<Lobe> lobes;
  lobes.reserve(runs.size());
  for (const auto& [start, count] : runs) {
    double re = 0.0, im = 0.0, total = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const ProfileSample& s = samples[(start + k) % n];
      const double p = std::pow(10.0, s.power_db / 10.0);
      re += p * std::cos(s.azimuth);
      im += p * std::sin(s.azimuth);
      total += p;
    }
    lobes.push_back({normalize_angle(std::atan2(im, re)), 10.0 * std::log10(total), start, count});
  }
  std::stable_sort(lobes.begin(), lobes.end(),
                   [](const Lobe& a, const Lobe& b) { return a.total_power_db > b.total_power_db; });
  return lobes;
}

} // namespace mapat::gpp
