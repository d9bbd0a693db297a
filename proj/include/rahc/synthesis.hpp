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
#include <utility>
#include <variant>
#include <vector>

#include "rahc/image.hpp"
#include "rahc/seed.hpp"
#include "rahc/weather.hpp"

namespace rahc {

enum class DepthMode { Constant, VerticalGradient };

/// Atmospheric scattering: I = J t + A (1 - t), t = exp(-beta d).
/// Constant depth uses d = 1; the vertical gradient runs from d = 1 at the
/// top row to d = 0 at the bottom row.
struct HazeParams {
  double beta = 1.0;
  std::array<double, 3> airlight{0.85, 0.85, 0.85};
  DepthMode depth_mode = DepthMode::VerticalGradient;
};

/// Additive oriented line streaks, screen-blended: I = 1 - (1 - J)(1 - S).
struct RainStreakParams {
  int count = 60;
  double length_px = 10.0;
  double angle_deg = 10.0;  // from vertical
  double intensity = 0.4;
};

/// Soft white sprites alpha-composited at three scales within the size range.
struct SnowParams {
  int flake_count = 30;
  std::pair<double, double> size_range_px{0.8, 2.5};
  double opacity = 0.8;
};

/// Darkening: I = scale * J^gamma.
struct NightParams {
  double gamma = 2.0;
  double illumination_scale = 0.4;
};

/// Circular lens-like drops: magnified, blurred view of the background.
struct RaindropParams {
  int drop_count = 3;
  std::pair<double, double> radius_range_px{3.0, 7.0};
  double refraction_strength = 0.5;
};

using DegradationParams =
    std::variant<HazeParams, RainStreakParams, SnowParams, NightParams, RaindropParams>;

Weather weather_of(const DegradationParams& params);

/// Throws ParamError when a field leaves its documented range.
void validate(const DegradationParams& params);

/// Closed intervals the per-record parameters are drawn from (uniformly).
/// Particle counts are densities per 64x64 pixels and scale with image area.
struct DegradationRanges {
  std::pair<double, double> haze_beta{0.8, 2.0};
  std::pair<double, double> haze_airlight{0.75, 0.95};
  std::pair<double, double> rain_density{25.0, 45.0};
  std::pair<double, double> rain_length{7.0, 14.0};
  std::pair<double, double> rain_angle{-25.0, 25.0};
  std::pair<double, double> rain_intensity{0.35, 0.6};
  std::pair<double, double> snow_density{20.0, 40.0};
  std::pair<double, double> snow_size{0.8, 2.5};
  std::pair<double, double> snow_opacity{0.65, 0.95};
  std::pair<double, double> night_gamma{1.5, 2.5};
  std::pair<double, double> night_scale{0.25, 0.5};
  std::pair<double, double> drop_density{2.0, 4.0};
  std::pair<double, double> drop_radius{4.0, 8.0};
  std::pair<double, double> drop_strength{0.3, 0.7};

  /// Default ranges, used for paired training data.
  static DegradationRanges standard() { return {}; }
  /// Ranges disjoint from `standard()`; the stand-in for real-world captures.
  static DegradationRanges held_out();
};

DegradationParams sample_params(Weather w, RenderSeed seed, std::int64_t height, std::int64_t width,
                                const DegradationRanges& ranges = DegradationRanges::standard());

/// Applies one weather operator. Output has the input's shape and lies in
/// [0, 1]. Randomness (particle placement) is a pure function of `seed`.
Image apply_weather(const Image& img, const DegradationParams& params, RenderSeed seed);

/// The scattering formula with an explicit per-pixel transmission map
/// ([H, W], values in [0, 1]).
Image haze_scatter(const Image& img, const torch::Tensor& transmission,
                   const std::array<double, 3>& airlight);

/// Stage seeds and parameters picked by compose_condition.
struct ComposeStage {
  Weather weather;
  RenderSeed seed;
  DegradationParams params;
};

/// Stages compose_condition would run for (code, seed), in stage order.
std::vector<ComposeStage> plan_condition(WeatherCode code, RenderSeed seed, std::int64_t height,
                                         std::int64_t width,
                                         const DegradationRanges& ranges = DegradationRanges::standard());

/// Applies each set weather exactly once in the order haze, rain streak,
/// snow, night, raindrop; every stage consumes the previous stage's output
/// and is clamped to [0, 1]. Throws InvalidCodeError for the zero code.
Image compose_condition(const Image& img, WeatherCode code, RenderSeed seed,
                        const DegradationRanges& ranges = DegradationRanges::standard());

/// Runs an explicit stage plan.
Image run_stages(const Image& img, const std::vector<ComposeStage>& stages);

/// Procedural outdoor-like clean scene: sky gradient, horizon, soft-edged
/// blocks and blobs with low-frequency shading.
Image make_clean_scene(RenderSeed seed, std::int64_t height, std::int64_t width);

}  // namespace rahc
