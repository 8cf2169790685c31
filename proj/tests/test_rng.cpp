#include <doctest.h>

#include <cmath>

#include "spdelab/rng.hpp"

using namespace spdelab;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  // Published reference vectors for the 10-round generator.
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are addressed by seed, replica and role") {
  NormalStream a(1, 2, StreamRole::Path), b(1, 2, StreamRole::Path);
  NormalStream c(1, 3, StreamRole::Path), d(1, 2, StreamRole::Nugget), e(2, 2, StreamRole::Path);
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    const double y = c.normal(), z = d.normal(), w = e.normal();
    CHECK(x != y);
    CHECK(x != z);
    CHECK(x != w);
  }
}

TEST_CASE("uniforms lie strictly inside (0,1); normals have unit variance") {
  NormalStream s(9, 0, StreamRole::Auxiliary);
  int outside = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    if (!(u > 0.0 && u < 1.0)) ++outside;
  }
  CHECK(outside == 0);
  const int N = 200000;
  double m = 0.0, v = 0.0;
  for (int i = 0; i < N; ++i) {
    const double z = s.normal();
    m += z, v += z * z;
  }
  m /= N, v /= N;
  CHECK(std::fabs(m) < 5.0 / std::sqrt(N));
  CHECK(std::fabs(v - 1.0) < 5.0 * std::sqrt(2.0 / N));
}
