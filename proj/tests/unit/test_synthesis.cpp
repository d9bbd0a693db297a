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

#include <cmath>

#include "rahc/error.hpp"
#include "rahc/synthesis.hpp"

using namespace rahc;

namespace {

Image scene(std::uint64_t seed = 3) { return make_clean_scene({seed}, 32, 48); }

bool in_unit_range(const Image& img) {
  const auto& t = img.tensor();
  return t.min().item<float>() >= 0.0f && t.max().item<float>() <= 1.0f;
}

}  // namespace

TEST_SUITE("synthesis") {
  TEST_CASE("haze with transmission one half mixes image and airlight equally") {
    HazeParams p;
    p.beta = std::log(2.0);
    p.airlight = {0.8, 0.8, 0.8};
    p.depth_mode = DepthMode::Constant;
    const auto out = apply_weather(Image::constant(16, 16, 0.2f, 0.2f, 0.2f), p, {1});
    CHECK((out.tensor() - 0.5f).abs().max().item<float>() < 1e-6f);
  }

  TEST_CASE("scattering with an explicit transmission map") {
    const auto img = scene();
    auto ones = torch::ones({img.height(), img.width()}, torch::kFloat64);
    CHECK((haze_scatter(img, ones, {0.9, 0.9, 0.9}).tensor() - img.tensor()).abs().max().item<float>() < 1e-6f);
    const auto fog = haze_scatter(img, torch::zeros_like(ones), {0.1, 0.5, 0.9});
    CHECK(fog.tensor()[3][5][0].item<float>() == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(fog.tensor()[3][5][2].item<float>() == doctest::Approx(0.9).epsilon(1e-6));
    // Per-pixel oracle on a random transmission map.
    auto t = torch::rand({img.height(), img.width()}, torch::kFloat64);
    const auto out = haze_scatter(img, t, {0.7, 0.8, 0.9});
    for (int y = 0; y < 32; y += 7)
      for (int x = 0; x < 48; x += 11)
        for (int c = 0; c < 3; ++c) {
          const double j = img.tensor()[y][x][c].item<double>();
          const double tv = t[y][x].item<double>();
          const double a = 0.7 + 0.1 * c;
          CHECK(out.tensor()[y][x][c].item<double>() == doctest::Approx(j * tv + a * (1 - tv)).epsilon(1e-6));
        }
  }

  TEST_CASE("vertical depth gradient hazes the top more than the bottom") {
    HazeParams p;
    p.beta = 2.0;
    p.airlight = {1.0, 1.0, 1.0};
    const auto out = apply_weather(Image::constant(16, 16, 0.0f, 0.0f, 0.0f), p, {1});
    CHECK(out.tensor()[0][0][0].item<float>() > out.tensor()[15][0][0].item<float>());
    CHECK(out.tensor()[15][0][0].item<float>() == doctest::Approx(0.0).epsilon(1e-6));
  }

  TEST_CASE("night with unit gamma and scale is the identity") {
    const auto img = scene();
    NightParams p;
    p.gamma = 1.0;
    p.illumination_scale = 1.0;
    CHECK((apply_weather(img, p, {0}).tensor() - img.tensor()).abs().max().item<float>() < 1e-6f);
  }

  TEST_CASE("every operator keeps shape and range and is seed-deterministic") {
    const auto img = scene();
    for (auto w : kWeatherOrder) {
      CAPTURE(weather_name(w));
      const auto p = sample_params(w, {11}, img.height(), img.width());
      CHECK(weather_of(p) == w);
      const auto a = apply_weather(img, p, {11});
      const auto b = apply_weather(img, p, {11});
      CHECK(a.height() == img.height());
      CHECK(a.width() == img.width());
      CHECK(in_unit_range(a));
      CHECK(a == b);
      CHECK_FALSE(a == img);
    }
  }

  TEST_CASE("particle placement changes with the seed") {
    const auto img = scene();
    for (auto w : {Weather::RainStreak, Weather::Snow, Weather::Raindrop}) {
      const auto p = sample_params(w, {5}, img.height(), img.width());
      CHECK_FALSE(apply_weather(img, p, {1}) == apply_weather(img, p, {2}));
    }
  }

  TEST_CASE("parameter validation") {
    HazeParams h;
    h.beta = -1;
    CHECK_THROWS_AS(validate(h), ParamError);
    RainStreakParams r;
    r.count = -3;
    CHECK_THROWS_AS(validate(r), ParamError);
    NightParams n;
    n.illumination_scale = 0;
    CHECK_THROWS_AS(validate(n), ParamError);
    SnowParams s;
    s.opacity = 1.5;
    CHECK_THROWS_AS(validate(s), ParamError);
    RaindropParams d;
    d.radius_range_px = {5, 2};
    CHECK_THROWS_AS(validate(d), ParamError);
    CHECK_THROWS_AS(apply_weather(scene(), h, {0}), ParamError);
  }

  TEST_CASE("held-out ranges are disjoint from the standard ranges") {
    const auto a = DegradationRanges::standard();
    const auto b = DegradationRanges::held_out();
    auto disjoint = [](std::pair<double, double> x, std::pair<double, double> y) {
      return x.second < y.first || y.second < x.first;
    };
    CHECK(disjoint(a.haze_beta, b.haze_beta));
    CHECK(disjoint(a.rain_density, b.rain_density));
    CHECK(disjoint(a.snow_size, b.snow_size));
    CHECK(disjoint(a.night_gamma, b.night_gamma));
    CHECK(disjoint(a.drop_radius, b.drop_radius));
  }

  TEST_CASE("composition applies each set weather once in stage order") {
    const auto img = scene();
    for (auto code : enumerate_codes()) {
      const auto plan = plan_condition(code, {77}, img.height(), img.width());
      REQUIRE(plan.size() == static_cast<std::size_t>(code.popcount()));
      for (std::size_t i = 1; i < plan.size(); ++i)
        CHECK(static_cast<int>(plan[i - 1].weather) < static_cast<int>(plan[i].weather));
    }
    const auto code = WeatherCode::parse("11011");
    const auto plan = plan_condition(code, {9}, img.height(), img.width());
    Image manual = img;
    for (const auto& s : plan) manual = apply_weather(manual, s.params, s.seed);
    CHECK(compose_condition(img, code, {9}) == manual);
    CHECK(run_stages(img, plan) == manual);
  }

  TEST_CASE("a single-weather code equals the operator itself") {
    const auto img = scene();
    const auto code = WeatherCode::single(Weather::Snow);
    const auto plan = plan_condition(code, {4}, img.height(), img.width());
    CHECK(compose_condition(img, code, {4}) == apply_weather(img, plan[0].params, plan[0].seed));
  }

  TEST_CASE("zero code is rejected") {
    CHECK_THROWS_AS(compose_condition(scene(), WeatherCode(0), {1}), InvalidCodeError);
  }

  TEST_CASE("all 31 compositions stay in range") {
    const auto img = scene(8);
    for (auto code : enumerate_codes()) {
      CAPTURE(code.str());
      CHECK(in_unit_range(compose_condition(img, code, {static_cast<std::uint64_t>(code.value())})));
    }
  }

  TEST_CASE("clean scenes are deterministic and varied") {
    CHECK(make_clean_scene({1}, 32, 32) == make_clean_scene({1}, 32, 32));
    CHECK_FALSE(make_clean_scene({1}, 32, 32) == make_clean_scene({2}, 32, 32));
    CHECK(in_unit_range(make_clean_scene({1}, 32, 32)));
  }
}
