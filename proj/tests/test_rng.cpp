#include <doctest.h>

#include <set>

#include "sdelab/rng.hpp"

using namespace sdelab;

// Known-answer vectors for the raw Philox4x64-10 bijection; frozen from an
// independent implementation of the same construction.
TEST_CASE("philox 4x64-10 known answers") {
  auto out = Philox4x64::block({1, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x02f4ba6408e4d89bull);
  CHECK(out[1] == 0x3dd62b0b9ca8c5b2ull);
  CHECK(out[2] == 0x1c8667a55d902e79ull);
  CHECK(out[3] == 0x907d7a052fd5b4dcull);

  out = Philox4x64::block({2, 2, 3, 4}, {5, 6});
  CHECK(out[0] == 0x92ab6a0e75619263ull);
  CHECK(out[1] == 0xd8ff75bdc6bf8f60ull);
  CHECK(out[2] == 0x450e124938725640ull);
  CHECK(out[3] == 0x94eb1a7cffd20cbbull);

  const std::uint64_t full = ~0ull;
  out = Philox4x64::block({0, 0, 0, 0}, {full, full});
  CHECK(out[0] == 0x44b7493d1acfc229ull);
  CHECK(out[1] == 0x6636af8e997921ddull);
  CHECK(out[2] == 0x3f73e132b5b3780eull);
  CHECK(out[3] == 0x605644dde03b01b1ull);

  out = Philox4x64::block({0x243f6a8885a308d4ull, 0x13198a2e03707344ull, 0xa4093822299f31d0ull,
                           0x082efa98ec4e6c89ull},
                          {0x452821e638d01377ull, 0xbe5466cf34e90c6cull});
  CHECK(out[0] == 0x4c8e672094922aa3ull);
  CHECK(out[1] == 0x527061cd2884102aull);
  CHECK(out[2] == 0xf4c265b2d783d553ull);
  CHECK(out[3] == 0x0556e76cb0298c8dull);
}

TEST_CASE("counter streams are stateless and disjoint") {
  CounterStream s(42, 7, 3, 0);
  // order independence
  const double u5 = s.uniform(5);
  const double u0 = s.uniform(0);
  CHECK(s.uniform(5) == u5);
  CHECK(s.uniform(0) == u0);

  // distinct (path, step, lane) coordinates give distinct raw words
  std::set<std::uint64_t> words;
  for (std::uint64_t path = 0; path < 4; ++path)
    for (std::uint64_t step = 0; step < 4; ++step)
      for (std::uint64_t lane = 0; lane < 2; ++lane)
        words.insert(CounterStream(42, path, step, lane).raw(0));
  CHECK(words.size() == 32);

  // seed changes everything
  CHECK(CounterStream(43, 7, 3, 0).raw(0) != CounterStream(42, 7, 3, 0).raw(0));
}

TEST_CASE("uniforms live in the open unit interval") {
  CounterStream s(1, 0, 0, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform(static_cast<std::uint64_t>(i));
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("box-muller pairs have gaussian moments") {
  CounterStream s(11, 2, 5, 0);
  const int n = 50000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = s.gaussian(static_cast<std::uint64_t>(i));
    m1 += g;
    m2 += g * g;
    m4 += g * g * g * g;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  CHECK(std::abs(m1) < 0.02);
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.03));
  CHECK(m4 == doctest::Approx(3.0).epsilon(0.08));
}
