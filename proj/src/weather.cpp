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

#include "rahc/weather.hpp"

#include <bit>

#include "rahc/error.hpp"

namespace rahc {

namespace {
constexpr std::array<std::string_view, kNumWeathers> kNames = {"haze", "rainstreak", "snow",
                                                                "night", "raindrop"};
}

std::string_view weather_name(Weather w) { return kNames[static_cast<int>(w)]; }

Weather weather_from_name(std::string_view name) {
  for (int i = 0; i < kNumWeathers; ++i)
    if (kNames[i] == name) return static_cast<Weather>(i);
  throw ParamError("unknown weather type '" + std::string(name) + "'");
}

WeatherCode::WeatherCode(int value) : value_(value) {
  if (value < 0 || value >= (1 << kNumWeathers))
    throw InvalidCodeError("weather code out of range: " + std::to_string(value));
}

WeatherCode WeatherCode::parse(std::string_view bits) {
  if (bits.size() != kNumWeathers)
    throw InvalidCodeError("weather code must have 5 digits: '" + std::string(bits) + "'");
  int v = 0;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw InvalidCodeError("weather code must be binary: '" + std::string(bits) + "'");
    v = (v << 1) | (c == '1');
  }
  return WeatherCode(v);
}

WeatherCode WeatherCode::single(Weather w) {
  return WeatherCode(1 << (kNumWeathers - 1 - static_cast<int>(w)));
}

int WeatherCode::popcount() const { return std::popcount(static_cast<unsigned>(value_)); }

std::string WeatherCode::str() const {
  std::string s(kNumWeathers, '0');
  for (int i = 0; i < kNumWeathers; ++i)
    if (has(static_cast<Weather>(i))) s[i] = '1';
  return s;
}

std::vector<Weather> WeatherCode::weathers() const {
  std::vector<Weather> out;
  for (Weather w : kWeatherOrder)
    if (has(w)) out.push_back(w);
  return out;
}

std::array<float, kNumWeathers> WeatherCode::label() const {
  std::array<float, kNumWeathers> t{};
  for (int i = 0; i < kNumWeathers; ++i) t[i] = has(static_cast<Weather>(i)) ? 1.0f : 0.0f;
  return t;
}

std::vector<WeatherCode> enumerate_codes() {
  std::vector<WeatherCode> codes;
  codes.reserve(31);
  for (int v = 1; v < (1 << kNumWeathers); ++v) codes.emplace_back(v);
  return codes;
}

}  // namespace rahc
