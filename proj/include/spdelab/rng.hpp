// Philox4x32-10 counter-based generator. A stream is addressed by
// (seed, replica, role); draws depend only on that address and the draw
// index, never on thread scheduling.
#pragma once

#include <array>
#include <cstdint>

namespace spdelab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

enum class StreamRole : std::uint32_t {
  Path = 1,      // primary path/field normals
  Nugget = 2,    // high-frequency remainder
  Config = 3,    // random configurations
  Auxiliary = 4,
};

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t replica, StreamRole role);

  // Uniform on the open interval (0, 1), 53 random bits.
  double uniform();
  // Standard normal by the Box-Muller transform on one block's two uniforms.
  double normal();
  std::uint64_t draws() const { return block_; }

 private:
  void refill();
  PhiloxKey key_;
  std::uint32_t role_;
  std::uint64_t replica_;
  std::uint64_t block_ = 0;
  double u_[2]{};
  double z_[2]{};
  int u_left_ = 0, z_left_ = 0;
};

}  // namespace spdelab
