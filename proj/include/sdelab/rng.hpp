#pragma once

#include <cmath>
#include <cstdint>
#include <array>

namespace sdelab {

// Philox4x64-10 counter-based generator (Salmon et al. construction, same
// constants and round function as numpy.random.Philox).
//
// Stream discipline used throughout the project, documented here so other
// implementations can reproduce draws bit-exactly:
//   key     = (seed, 0x7364656c61623031)            # second word is a domain tag
//   counter = (block, step, path, lane)
// where `block` indexes successive 4x64 outputs within one (path, step, lane)
// stream and the remaining words identify the stream. Lane 0 carries the noise
// draws, lane 1 the step-uniform U_k. Uniform doubles are ((x >> 11) + 0.5) *
// 2^-53, in the open interval (0,1); Gaussians are Box-Muller pairs.
struct Philox4x64 {
  static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kM1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73Bull;

  static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                            std::array<std::uint64_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      unsigned __int128 p0 = static_cast<unsigned __int128>(kM0) * ctr[0];
      unsigned __int128 p1 = static_cast<unsigned __int128>(kM1) * ctr[2];
      std::array<std::uint64_t, 4> out;
      out[0] = static_cast<std::uint64_t>(p1 >> 64) ^ ctr[1] ^ key[0];
      out[1] = static_cast<std::uint64_t>(p1);
      out[2] = static_cast<std::uint64_t>(p0 >> 64) ^ ctr[3] ^ key[1];
      out[3] = static_cast<std::uint64_t>(p0);
      ctr = out;
    }
    return ctr;
  }
};

inline constexpr std::uint64_t kStreamDomainTag = 0x7364656c61623031ull;  // "sdelab01"

// Stateless stream of uniforms/gaussians for one (seed, path, step, lane).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint64_t lane)
      : key_{seed, kStreamDomainTag}, base_{0, step, path, lane} {}

  std::uint64_t raw(std::uint64_t i) const {
    auto ctr = base_;
    ctr[0] = i / 4;
    auto out = Philox4x64::block(ctr, key_);
    return out[i % 4];
  }

  // open-interval uniform in (0,1)
  double uniform(std::uint64_t i) const {
    return (static_cast<double>(raw(i) >> 11) + 0.5) * 0x1p-53;
  }

  // Box-Muller pair from uniforms (2j, 2j+1); returns the first/second
  // component depending on parity of i. Draw index i consumes uniform i.
  double gaussian(std::uint64_t i) const {
    std::uint64_t j = i / 2;
    double u1 = uniform(2 * j);
    double u2 = uniform(2 * j + 1);
    double r = std::sqrt(-2.0 * std::log(u1));
    double ang = 6.283185307179586476925286766559 * u2;
    return (i % 2 == 0) ? r * std::cos(ang) : r * std::sin(ang);
  }

 private:
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> base_;
};

}  // namespace sdelab
