#include "doctest.h"
#include "sentmark/prng.hpp"

#include <cmath>

using namespace sentmark;

// Golden vectors recorded from an independent reference implementation of
// the documented scheme before this library was written; they keep ports in
// other languages bit-compatible.

TEST_CASE("splitmix64 published seed-0 vector") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
  CHECK(rng.next() == 0xF88BB8A8724C81ECULL);
}

TEST_CASE("splitmix64 seed-42 stream") {
  SplitMix64 rng(42);
  CHECK(rng.next() == 0xBDD732262FEB6E95ULL);
  CHECK(rng.next() == 0x28EFE333B266F103ULL);
  CHECK(rng.next() == 0x47526757130F9F52ULL);
}

TEST_CASE("mix64 single-step values") {
  CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(mix64(1) == 0x910A2DEC89025CC1ULL);
  CHECK(mix64(10737418235ULL) == 0x296C477AE69F84C7ULL);  // 5 * 2147483647
  CHECK(mix64(0x636261) == 0xCCAEB5936D6F4E91ULL);        // packed "abc"
  CHECK(mask_seed(10737418235ULL) == 0xB5E3DF3350C08379ULL);
}

TEST_CASE("uniform doubles stay in [0,1) and match the reference") {
  SplitMix64 rng(7);
  CHECK(rng.next_double() == doctest::Approx(0.38982974839127149).epsilon(1e-15));
  CHECK(rng.next_double() == doctest::Approx(0.016788294528156111).epsilon(1e-15));
  CHECK(rng.next_double() == doctest::Approx(0.90076068060688341).epsilon(1e-15));
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian stream matches the reference values") {
  GaussianStream gauss(1);
  const double expected[6] = {-0.028249746095854695, -1.065617648414326,
                              -0.2279195228676347,   0.083094168471500904,
                              0.10309095168573973,   -1.2696620408584176};
  for (double e : expected) {
    CHECK(gauss.next() == doctest::Approx(e).epsilon(1e-14));
  }
}

TEST_CASE("gaussian stream has the right moments") {
  GaussianStream gauss(2024);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = gauss.next();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("fisher-yates golden order") {
  const auto order = shuffled_indices(8, mask_seed(10737418235ULL));
  const std::vector<std::uint32_t> expected = {7, 0, 3, 6, 2, 4, 5, 1};
  CHECK(order == expected);
}

TEST_CASE("shuffle is a permutation") {
  const auto order = shuffled_indices(1000, 99);
  std::vector<bool> seen(1000, false);
  for (std::uint32_t id : order) {
    CHECK(!seen[id]);
    seen[id] = true;
  }
}

TEST_CASE("round_half_up") {
  CHECK(round_half_up(2.0) == 2);
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(2.4999) == 2);
  CHECK(round_half_up(0.5) == 1);
  CHECK(round_half_up(-0.5) == 0);
}

TEST_CASE("hash_bytes is stable and input-sensitive") {
  CHECK(hash_bytes("abc") == hash_bytes("abc"));
  CHECK(hash_bytes("abc") != hash_bytes("abd"));
  CHECK(hash_bytes("") != hash_bytes("a"));
}
