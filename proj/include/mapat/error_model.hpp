// SPDX-License-Identifier: Apache-2.0
//
// Measurement noise, the closed-form error statistics of a single
// candidate location, and the Monte Carlo harness.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mapat/floor_map.hpp"
#include "mapat/forward_tracer.hpp"
#include "mapat/map_at.hpp"
#include "mapat/rng.hpp"

namespace mapat {

struct NoiseParams {
  double sigma_t = 0.25e-9;                // seconds
  double sigma_theta = deg_to_rad(0.5);    // radians
  std::uint64_t seed = 1;

  void validate() const;
};

// Zero-mean Gaussian perturbation of tof and aoa. A perturbed tof <= 0 is
// redrawn.
Mpc add_noise(const Mpc& mpc, const NoiseParams& params, RngStream& rng);

struct ChiMoments {
  double mean = 0.0;
  double second_moment = 0.0;
};

// First and second moments of sqrt(X^2 + Y^2) for independent
// X ~ N(0, sigma_x^2), Y ~ N(0, sigma_y^2), by trapezoidal quadrature of the
// polar form (spectrally accurate for the periodic integrand).
ChiMoments generalized_chi_moments(double sigma_x, double sigma_y);

// Mean candidate-location error for a path of length r: angular error
// r * sigma_theta and range error c * sigma_t combine orthogonally.
double theoretical_mean_error(double r, const NoiseParams& params);

struct ErrorStats {
  double mean_m = 0.0;
  double std_m = 0.0; // sample standard deviation, 0 for a single sample
  double rms_m = 0.0;
  std::size_t samples = 0;
  std::size_t outages = 0;
  std::vector<double> per_sample_errors; // filled when requested
  std::vector<Point> per_sample_offsets; // estimate - truth, when requested

  std::size_t runs() const { return samples + outages; }
  double outage_rate() const { return runs() ? static_cast<double>(outages) / static_cast<double>(runs()) : 0.0; }
};

struct MonteCarloOptions {
  bool keep_samples = false;
  unsigned threads = 1; // 0 = hardware concurrency
};

// The ground-truth paths produced no MPC at all.
class UnreachableError : public std::runtime_error {
public:
  UnreachableError() : std::runtime_error("UE unreachable: no propagation paths") {}
};

// Perturbs `mpcs` independently per run (substream (seed, run, mpc index)),
// locates, and accumulates |estimate - truth| over runs that produced an
// estimate. Failed runs are counted as outages.
ErrorStats monte_carlo_locate_mpcs(const FloorMap& map, Point bs, Point ue_truth, std::span<const Mpc> mpcs,
                                   const MapAtParams& map_at_params, const NoiseParams& noise, std::size_t runs,
                                   const MonteCarloOptions& options = {});

// Traces the ground-truth MPCs first. Throws UnreachableError when there are none.
ErrorStats monte_carlo_locate(const FloorMap& map, Point bs, Point ue_truth, const TraceParams& trace_params,
                              const MapAtParams& map_at_params, const NoiseParams& noise, std::size_t runs,
                              const MonteCarloOptions& options = {});

} // namespace mapat
