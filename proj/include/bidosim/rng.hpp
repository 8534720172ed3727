#pragma once

// Counter-based Gaussian draws. Every random number in the library is a pure
// function of (master seed, replica, purpose, mode, step), so trajectories are
// bit-reproducible no matter how replicas are scheduled across threads.
//
// The generator is Philox4x32-10 (Salmon et al., SC'11) with the purpose tag
// folded into the key via splitmix64, and Box-Muller on top.

#include <array>
#include <cmath>
#include <cstdint>

namespace bidosim {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
    const std::array<std::uint32_t, 4> nxt{
        static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
        static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
        static_cast<std::uint32_t>(p0)};
    ctr = nxt;
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

}  // namespace detail

// Draw purposes keep statistically independent sub-streams apart.
enum class DrawPurpose : std::uint32_t {
  ou_increment = 1,      // exact OU update used by the IMEX step and convolution
  wiener_increment = 2,  // plain Brownian increments (explicit EM scheme)
  initial_data = 3,
  probe = 4,             // deterministic random probes (constant estimation etc.)
};

struct NoiseStream {
  std::uint64_t master_seed = 0;
  std::uint32_t replica = 0;
};

// One N(0,1) variate, keyed by the full draw coordinates.
inline double normal_draw(const NoiseStream& s, DrawPurpose purpose,
                          std::uint32_t mode, std::uint64_t step) {
  const std::uint64_t key64 = detail::splitmix64(
      s.master_seed ^ (0xA24BAED4963EE407ull *
                       (static_cast<std::uint64_t>(purpose) + 1)));
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(key64),
                                         static_cast<std::uint32_t>(key64 >> 32)};
  const std::array<std::uint32_t, 4> ctr{
      s.replica, mode, static_cast<std::uint32_t>(step),
      static_cast<std::uint32_t>(step >> 32)};
  const auto r = detail::philox4x32(ctr, key);

  // Box-Muller; u1 in (0,1], u2 in [0,1).
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace bidosim
