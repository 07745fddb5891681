// SPDX-License-Identifier: Apache-2.0

#include "mapat/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>

namespace mapat {

void NoiseParams::validate() const {
  if (!(sigma_t >= 0.0) || !(sigma_theta >= 0.0)) throw PreconditionError("noise params: sigmas must be >= 0");
}

Mpc add_noise(const Mpc& mpc, const NoiseParams& params, RngStream& rng) {
  Mpc out = mpc;
  if (params.sigma_t > 0.0) {
    do {
      out.tof = mpc.tof + params.sigma_t * rng.normal();
    } while (out.tof <= 0.0);
  }
  if (params.sigma_theta > 0.0) out.aoa_at_bs = normalize_angle(mpc.aoa_at_bs + params.sigma_theta * rng.normal());
  return out;
}

ChiMoments generalized_chi_moments(double sigma_x, double sigma_y) {
  if (!(sigma_x >= 0.0) || !(sigma_y >= 0.0)) throw PreconditionError("generalized_chi_moments: sigmas must be >= 0");
  const double hi = std::max(sigma_x, sigma_y);
  const double lo = std::min(sigma_x, sigma_y);
  const double second = sigma_x * sigma_x + sigma_y * sigma_y;
  if (hi == 0.0) return {0.0, 0.0};
  // Below this ratio the trapezoid would need > 2^22 nodes; the half-normal
  // limit is then exact to within ~ratio^2.
  if (lo / hi < 1e-6) return {hi * std::sqrt(2.0 / std::numbers::pi), second};

  // Polar form with q(phi) = cos^2/(2 sx^2) + sin^2/(2 sy^2):
  //   E[R]   = 1/(2 pi sx sy) * int sqrt(pi) / (4 q^1.5) dphi
  //   E[R^2] = 1/(2 pi sx sy) * int 1 / (2 q^2) dphi
  const double ax = 0.5 / (sigma_x * sigma_x);
  const double ay = 0.5 / (sigma_y * sigma_y);
  auto integrate = [&](int n) {
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / n;
      const double c = std::cos(phi), s = std::sin(phi);
      const double q = ax * c * c + ay * s * s;
      m1 += std::sqrt(std::numbers::pi) / (4.0 * q * std::sqrt(q));
      m2 += 1.0 / (2.0 * q * q);
    }
    const double scale = (2.0 * std::numbers::pi / n) / (2.0 * std::numbers::pi * sigma_x * sigma_y);
    return ChiMoments{m1 * scale, m2 * scale};
  };

  ChiMoments prev = integrate(64);
  for (int n = 128; n <= (1 << 22); n *= 2) {
    const ChiMoments cur = integrate(n);
    if (std::abs(cur.mean - prev.mean) <= 1e-14 * cur.mean &&
        std::abs(cur.second_moment - prev.second_moment) <= 1e-14 * cur.second_moment)
      return cur;
    prev = cur;
  }
  return prev;
}

double theoretical_mean_error(double r, const NoiseParams& params) {
  if (!(r > 0.0)) throw PreconditionError("theoretical_mean_error: r must be > 0");
  params.validate();
  return generalized_chi_moments(r * params.sigma_theta, kSpeedOfLight * params.sigma_t).mean;
}

ErrorStats monte_carlo_locate_mpcs(const FloorMap& map, Point bs, Point ue_truth, std::span<const Mpc> mpcs,
                                   const MapAtParams& map_at_params, const NoiseParams& noise, std::size_t runs,
                                   const MonteCarloOptions& options) {
  if (runs == 0) throw PreconditionError("monte_carlo_locate: runs must be >= 1");
  if (mpcs.empty()) throw UnreachableError();
  noise.validate();
  map_at_params.validate();

  std::vector<std::optional<Point>> estimates(runs);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<Mpc> noisy(mpcs.size());
    for (std::size_t run = begin; run < end; ++run) {
      for (std::size_t i = 0; i < mpcs.size(); ++i) {
        RngStream rng(noise.seed, run, static_cast<std::uint32_t>(i));
        noisy[i] = add_noise(mpcs[i], noise, rng);
      }
      try {
        estimates[run] = locate(map, bs, noisy, map_at_params).point;
      } catch (const NoCandidatesError&) {
        estimates[run].reset();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, runs));
  if (threads <= 1) {
    run_range(0, runs);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (runs + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(runs, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
  }

  // Merge strictly in run order so the result does not depend on threading.
  ErrorStats stats;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& e : estimates) {
    if (!e) {
      ++stats.outages;
      continue;
    }
    const Point offset = *e - ue_truth;
    const double err = norm(offset);
    sum += err;
    sum_sq += err * err;
    ++stats.samples;
    if (options.keep_samples) {
      stats.per_sample_errors.push_back(err);
      stats.per_sample_offsets.push_back(offset);
    }
  }
  if (stats.samples == 0) return stats;

  const double n = static_cast<double>(stats.samples);
  stats.mean_m = sum / n;
  stats.rms_m = std::sqrt(sum_sq / n);
  if (stats.samples > 1) {
    double dev = 0.0;
    for (const auto& e : estimates) {
      if (!e) continue;
      const double d = norm(*e - ue_truth) - stats.mean_m;
      dev += d * d;
    }
    stats.std_m = std::sqrt(dev / (n - 1.0));
  }
  return stats;
}

ErrorStats monte_carlo_locate(const FloorMap& map, Point bs, Point ue_truth, const TraceParams& trace_params,
                              const MapAtParams& map_at_params, const NoiseParams& noise, std::size_t runs,
                              const MonteCarloOptions& options) {
  if (runs == 0) throw PreconditionError("monte_carlo_locate: runs must be >= 1");
  const auto mpcs = trace_paths(map, bs, ue_truth, trace_params);
  if (mpcs.empty()) throw UnreachableError();
  return monte_carlo_locate_mpcs(map, bs, ue_truth, mpcs, map_at_params, noise, runs, options);
}

} // namespace mapat
