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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rahc {

/// The five weather types, in the fixed stage order used for composition.
enum class Weather : int { Haze = 0, RainStreak = 1, Snow = 2, Night = 3, Raindrop = 4 };

inline constexpr int kNumWeathers = 5;
inline constexpr std::array<Weather, kNumWeathers> kWeatherOrder = {
    Weather::Haze, Weather::RainStreak, Weather::Snow, Weather::Night, Weather::Raindrop};

std::string_view weather_name(Weather w);
Weather weather_from_name(std::string_view name);

/// 5-bit weather code. The textual form reads left to right as
/// (haze, rain streak, snow, night, raindrop); its integer value is that
/// string read as a binary number, so "00001" (raindrop only) is 1.
class WeatherCode {
 public:
  constexpr WeatherCode() = default;
  /// Throws InvalidCodeError unless 0 <= value < 32.
  explicit WeatherCode(int value);
  /// Parses a 5-character bitstring such as "10010".
  static WeatherCode parse(std::string_view bits);
  static WeatherCode single(Weather w);

  int value() const { return value_; }
  bool has(Weather w) const { return (value_ >> (kNumWeathers - 1 - static_cast<int>(w))) & 1; }
  int popcount() const;
  bool is_clean() const { return value_ == 0; }
  std::string str() const;
  /// Set weathers in stage order.
  std::vector<Weather> weathers() const;
  /// Multilabel targets ordered like the bitstring.
  std::array<float, kNumWeathers> label() const;

  friend constexpr bool operator==(WeatherCode, WeatherCode) = default;
  friend constexpr auto operator<=>(WeatherCode, WeatherCode) = default;

 private:
  int value_ = 0;
};

/// The 31 nonzero codes in ascending binary order.
std::vector<WeatherCode> enumerate_codes();

/// Multiplicity group names indexed by popcount - 1.
inline constexpr std::array<std::string_view, kNumWeathers> kGroupNames = {
    "Single", "Double", "Triple", "Quadruple", "Pentuple"};

}  // namespace rahc
