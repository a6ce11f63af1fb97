#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace spreadopt {

/// Philox4x32-10 counter-based generator (the D.E. Shaw construction): a
/// 10-round bijective mix of a 128-bit counter under a 64-bit key. Stateless,
/// so the stream position (path, step) is O(1)-addressable and simulation
/// results cannot depend on scheduling order.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> x,
                                            std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * x[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * x[2];
      x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k[1],
           static_cast<std::uint32_t>(p0)};
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return x;
  }
};

struct NormalPair {
  double first = 0.0;
  double second = 0.0;
};

/// Per-path substream of standard normals and uniforms, addressed by
/// (seed, path, step): key = seed, counter = (path, step). One Philox block
/// yields two 53-bit uniforms, hence one Box-Muller pair per step.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        path_(path) {}

  /// Step index reserved for the initial-condition draw.
  static constexpr std::uint64_t kInitStep = ~std::uint64_t{0};

  /// Two independent uniforms; first in (0, 1], second in [0, 1).
  std::array<double, 2> uniforms(std::uint64_t step) const {
    const auto w = Philox4x32::block(
        {static_cast<std::uint32_t>(path_),
         static_cast<std::uint32_t>(path_ >> 32),
         static_cast<std::uint32_t>(step),
         static_cast<std::uint32_t>(step >> 32)},
        key_);
    const std::uint64_t x0 = w[0] | (std::uint64_t{w[1]} << 32);
    const std::uint64_t x1 = w[2] | (std::uint64_t{w[3]} << 32);
    // (x >> 11) keeps 53 bits; +1 shifts the first into (0,1] so log is safe.
    return {((x0 >> 11) + 1) * 0x1.0p-53, (x1 >> 11) * 0x1.0p-53};
  }

  /// The (eps, eta) standard-normal pair driving one simulation step.
  NormalPair step_normals(std::uint64_t step) const {
    const auto u = uniforms(step);
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 2.0 * std::numbers::pi * u[1];
    return {r * std::cos(angle), r * std::sin(angle)};
  }

  /// Standard normal for the stationary initial-spread draw; its substream
  /// never collides with step indices.
  double initial_normal() const { return step_normals(kInitStep).first; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t path_;
};

}  // namespace spreadopt
