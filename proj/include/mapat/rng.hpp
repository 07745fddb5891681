// SPDX-License-Identifier: Apache-2.0
//
// Philox4x32-10 counter-based generator (Salmon et al., Random123). Each
// (seed, run, stream) triple addresses an independent substream, so Monte
// Carlo runs give bit-identical draws whether executed serially or in
// parallel.

#pragma once

#include <array>
#include <cstdint>

namespace mapat {

using Philox4x32 = std::array<std::uint32_t, 4>;

// One Philox4x32-10 block.
Philox4x32 philox4x32_10(Philox4x32 counter, std::array<std::uint32_t, 2> key);

class RngStream {
public:
  static constexpr int kVersion = 1;

  RngStream(std::uint64_t seed, std::uint64_t run, std::uint32_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

private:
  std::array<std::uint32_t, 2> key_;
  Philox4x32 counter_;
  Philox4x32 block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace mapat
