#include <doctest.h>

#include <cmath>
#include <string_view>
#include <vector>

#include "appsteg/payload.hpp"
#include "appsteg/prng.hpp"

using namespace appsteg;

namespace {
std::uint64_t fnv(std::string_view s) { return fnv1a64(to_bytes(s)); }
}  // namespace

TEST_CASE("xorshift64* matches reference outputs for seed 1") {
  Prng p(1);
  CHECK(p.next() == 0x47e4ce4b896cdd1dULL);
  CHECK(p.next() == 0xabcfa6a8e079651dULL);
  CHECK(p.next() == 0xb9d10d8feb731f57ULL);
}

TEST_CASE("zero seed is replaced") {
  Prng a(0), b(Prng::kZeroSeedReplacement);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv("") == 0xcbf29ce484222325ULL);
  CHECK(fnv("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv("password") == 0x4b1a493507b3a318ULL);
}

TEST_CASE("password seeding") {
  CHECK_THROWS_AS(prng_from_password(Bytes{}), std::invalid_argument);
  Prng a = prng_from_password(to_bytes("pw"));
  Prng b(fnv("pw"));
  CHECK(a.next() == b.next());
}

TEST_CASE("uniform stays in range and is roughly flat") {
  Prng p(42);
  std::vector<int> counts(7);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = p.uniform(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  CHECK(chi2 < 22.5);  // 6 dof, p ~ 0.001
  CHECK(p.uniform(1) == 0);
}

TEST_CASE("uniform01 and normal moments") {
  Prng p(7);
  double s = 0, s2 = 0, u = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = p.normal();
    s += x;
    s2 += x * x;
    const double v = p.uniform01();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    u += v;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(u / n - 0.5) < 0.005);
}

TEST_CASE("mix_seed separates streams") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(5, 9) == mix_seed(5, 9));
}
