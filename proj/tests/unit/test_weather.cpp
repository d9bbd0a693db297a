/* Copyright 2026 The RAHC Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "../common/test.hpp"

#include <map>
#include <set>

#include "rahc/error.hpp"
#include "rahc/seed.hpp"
#include "rahc/weather.hpp"

using namespace rahc;

TEST_SUITE("weather") {
  TEST_CASE("enumerate_codes covers the 31 nonzero codes by multiplicity") {
    const auto codes = enumerate_codes();
    REQUIRE(codes.size() == 31);
    std::map<int, int> hist;
    for (auto c : codes) hist[c.popcount()]++;
    CHECK(hist == std::map<int, int>{{1, 5}, {2, 10}, {3, 10}, {4, 5}, {5, 1}});
    CHECK(codes.front().str() == "00001");
    CHECK(codes.back().str() == "11111");
    for (std::size_t i = 1; i < codes.size(); ++i) CHECK(codes[i - 1] < codes[i]);
  }

  TEST_CASE("bitstrings round-trip") {
    for (int v = 0; v < 32; ++v) {
      const WeatherCode c(v);
      CHECK(WeatherCode::parse(c.str()) == c);
      CHECK(c.str().size() == 5);
    }
    CHECK(WeatherCode::parse("10010").value() == 18);
  }

  TEST_CASE("bit positions follow haze, rain streak, snow, night, raindrop") {
    const auto c = WeatherCode::parse("10010");
    CHECK(c.has(Weather::Haze));
    CHECK_FALSE(c.has(Weather::RainStreak));
    CHECK_FALSE(c.has(Weather::Snow));
    CHECK(c.has(Weather::Night));
    CHECK_FALSE(c.has(Weather::Raindrop));
    CHECK((c.weathers() == std::vector<Weather>{Weather::Haze, Weather::Night}));
    const auto l = c.label();
    CHECK(l == std::array<float, 5>{1, 0, 0, 1, 0});
    for (auto w : kWeatherOrder) CHECK((WeatherCode::single(w).weathers() == std::vector<Weather>{w}));
  }

  TEST_CASE("malformed codes are rejected") {
    CHECK_THROWS_AS(WeatherCode(32), InvalidCodeError);
    CHECK_THROWS_AS(WeatherCode(-1), InvalidCodeError);
    CHECK_THROWS_AS(WeatherCode::parse("0101"), InvalidCodeError);
    CHECK_THROWS_AS(WeatherCode::parse("00201"), InvalidCodeError);
    CHECK_THROWS_AS(WeatherCode::parse("abcde"), InvalidCodeError);
  }

  TEST_CASE("weather names round-trip") {
    for (auto w : kWeatherOrder) CHECK(weather_from_name(weather_name(w)) == w);
    CHECK_THROWS(weather_from_name("fog"));
  }
}

TEST_SUITE("seed") {
  TEST_CASE("splitmix64 matches the reference sequence") {
    // First outputs of the reference generator seeded with 0.
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
    CHECK(splitmix64(0x9E3779B97F4A7C15ull) == 0x6E789E6AA1B965F4ull);
  }

  TEST_CASE("derived seeds depend on parent, tag and index") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t parent : {0ull, 1ull, 42ull})
      for (const char* tag : {"clean", "record", "batch"})
        for (std::uint64_t i = 0; i < 20; ++i) seen.insert(derive_seed(parent, tag, i));
    CHECK(seen.size() == 3 * 3 * 20);
    CHECK(derive_seed(7, "x", 3) == derive_seed(7, "x", 3));
  }

  TEST_CASE("Rng draws are reproducible and in range") {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) {
      const double u = a.uniform();
      CHECK(u == b.uniform());
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      const auto k = a.uniform_int(-2, 3);
      b.uniform_int(-2, 3);
      CHECK(k >= -2);
      CHECK(k <= 3);
    }
    Rng c(5);
    double sum = 0, sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double z = c.normal();
      sum += z;
      sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
  }
}
