#include "spdelab/rng.hpp"

#include <cmath>
#include <numbers>

namespace spdelab {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

double to_unit(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
  return (static_cast<double>(bits) + 0.5) * 0x1p-53;
}
}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  for (int r = 0; r < 10; ++r) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t replica, StreamRole role)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      role_(static_cast<std::uint32_t>(role)),
      replica_(replica) {}

void NormalStream::refill() {
  // counter words: block index, role, replica (low, high)
  const PhiloxCounter ctr{static_cast<std::uint32_t>(block_), role_ ^ static_cast<std::uint32_t>(block_ >> 32) << 8,
                          static_cast<std::uint32_t>(replica_), static_cast<std::uint32_t>(replica_ >> 32)};
  const auto w = philox4x32_10(ctr, key_);
  ++block_;
  u_[0] = to_unit(w[0], w[1]);
  u_[1] = to_unit(w[2], w[3]);
}

double NormalStream::uniform() {
  if (u_left_ == 0) {
    refill();
    u_left_ = 2;
  }
  return u_[2 - u_left_--];
}

double NormalStream::normal() {
  if (z_left_ == 0) {
    refill();
    const double r = std::sqrt(-2.0 * std::log(u_[0]));
    const double a = 2.0 * std::numbers::pi * u_[1];
    z_[0] = r * std::cos(a);
    z_[1] = r * std::sin(a);
    z_left_ = 2;
  }
  return z_[2 - z_left_--];
}

}  // namespace spdelab
