// SPDX-License-Identifier: Apache-2.0
//
// 3GPP positioning report arithmetic (timing advance, RSTD, UTDOA, relative
// path delays) and spatial-lobe extraction from an azimuth power sweep.

#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <vector>

#include "mapat/geometry.hpp"

namespace mapat::gpp {

// Basic time unit, seconds.
inline constexpr double kTs = 32.522e-9;
// Meters-per-second used by the reporting tables when converting Ts to
// distance (9.76 m per Ts, 19.51 m per 2 Ts).
inline constexpr double kReportingSpeedOfLight = 3.0e8;
inline constexpr double kRstdFineLimitTs = 4096.0;
inline constexpr double kRstdMaxTs = 15391.0;

// Minimum reportable one-way distance for SCS exponent mu in [0, 5]:
// 78.12 / 2^mu meters.
double ta_min_distance(int mu);

// Distance resolution of an RSTD report: 0.5 Ts up to and including
// 4096 Ts, 1 Ts up to 15391 Ts. Throws PreconditionError outside [0, 15391 Ts].
double rstd_resolution(double rstd_s);

// 2 Ts expressed in meters.
double utdoa_resolution();

// Absolute arrival times from the TA round trip and per-path relative
// delays: rtt / 2 + relative[i].
std::vector<double> absolute_delays(double ta_rtt_s, std::span<const double> relative_delays_s);

// Nearest multiple of resolution_m / c, ties rounding up.
double quantize_delay(double delay_s, double resolution_m);

struct ProfileSample {
  double azimuth = 0.0; // radians
  double power_db = 0.0;
};

class PowerAngleProfile {
public:
  // Azimuths must be strictly increasing, uniformly spaced (within 1e-9 rad)
  // and span less than 2 pi.
  explicit PowerAngleProfile(std::vector<ProfileSample> samples);

  std::span<const ProfileSample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double angular_step() const { return step_; }
  // True when the sweep closes on itself (n * step == 2 pi), so the first
  // and last samples are neighbours.
  bool circular() const { return circular_; }

private:
  std::vector<ProfileSample> samples_;
  double step_ = 0.0;
  bool circular_ = false;
};

// CSV with header `azimuth_deg,power_db`. Throws std::runtime_error with a
// 1-based line number on malformed input.
PowerAngleProfile read_profile_csv(std::istream& in);

struct Lobe {
  double mean_angle = 0.0; // radians, [0, 2pi)
  double total_power_db = 0.0;
  std::size_t first_index = 0; // members are first_index .. first_index + count - 1 (mod n)
  std::size_t count = 0;
};

// Contiguous runs of samples within threshold_db of the peak. Each lobe's
// mean angle is the argument of the linear-power-weighted phasor sum.
// Ordered by descending total power.
std::vector<Lobe> extract_lobes(const PowerAngleProfile& profile, double threshold_db = 10.0);

} // namespace mapat::gpp
