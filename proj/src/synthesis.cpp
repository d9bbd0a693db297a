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

#include "rahc/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "rahc/error.hpp"

namespace rahc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ParamError(what);
}

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

// Plain float view over an [H, W, 3] buffer.
struct Canvas {
  std::int64_t h, w;
  std::vector<float> px;

  explicit Canvas(const Image& img)
      : h(img.height()), w(img.width()),
        px(img.tensor().data_ptr<float>(), img.tensor().data_ptr<float>() + h * w * 3) {}

  float& at(std::int64_t y, std::int64_t x, int c) { return px[(y * w + x) * 3 + c]; }
  float at(std::int64_t y, std::int64_t x, int c) const { return px[(y * w + x) * 3 + c]; }

  // Bilinear lookup with edge clamping.
  float sample(double y, double x, int c) const {
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    const auto y0 = static_cast<std::int64_t>(std::floor(y));
    const auto x0 = static_cast<std::int64_t>(std::floor(x));
    const auto y1 = std::min(y0 + 1, h - 1);
    const auto x1 = std::min(x0 + 1, w - 1);
    const double fy = y - y0, fx = x - x0;
    const double top = at(y0, x0, c) * (1 - fx) + at(y0, x1, c) * fx;
    const double bot = at(y1, x0, c) * (1 - fx) + at(y1, x1, c) * fx;
    return static_cast<float>(top * (1 - fy) + bot * fy);
  }

  Image image() const {
    auto t = torch::from_blob(const_cast<float*>(px.data()), {h, w, 3}, torch::kFloat32).clone();
    return Image::clamped(t);
  }
};

double lerp(std::pair<double, double> r, double u) { return r.first + (r.second - r.first) * u; }

int scaled_count(double density, std::int64_t h, std::int64_t w) {
  return static_cast<int>(std::lround(density * static_cast<double>(h * w) / 4096.0));
}

Image apply_haze(const Image& img, const HazeParams& p) {
  const auto h = img.height();
  torch::Tensor depth;
  if (p.depth_mode == DepthMode::Constant) {
    depth = torch::ones({h, img.width()}, torch::kFloat64);
  } else {
    auto rows = h > 1 ? torch::linspace(1.0, 0.0, h, torch::kFloat64)
                      : torch::ones({1}, torch::kFloat64);
    depth = rows.unsqueeze(1).expand({h, img.width()});
  }
  return haze_scatter(img, torch::exp(-p.beta * depth), p.airlight);
}

Image apply_rain(const Image& img, const RainStreakParams& p, RenderSeed seed) {
  Canvas out(img);
  const auto h = out.h, w = out.w;
  std::vector<float> streaks(static_cast<std::size_t>(h * w), 0.0f);
  Rng rng(seed.value);
  const double len = p.length_px;
  for (int k = 0; k < p.count; ++k) {
    const double x0 = rng.uniform(-len, static_cast<double>(w) + len);
    const double y0 = rng.uniform(-len, static_cast<double>(h));
    const double angle = (p.angle_deg + rng.uniform(-3.0, 3.0)) * M_PI / 180.0;
    const double dx = std::sin(angle), dy = std::cos(angle);
    const double strength = p.intensity * rng.uniform(0.6, 1.0);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
    for (int s = 0; s <= steps; ++s) {
      const double t = len * s / steps;
      const double x = x0 + dx * t, y = y0 + dy * t;
      const auto xi = static_cast<std::int64_t>(std::floor(x));
      const auto yi = static_cast<std::int64_t>(std::floor(y));
      const double fx = x - xi, fy = y - yi;
      const double weights[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
      const std::int64_t xs[4] = {xi, xi + 1, xi, xi + 1};
      const std::int64_t ys[4] = {yi, yi, yi + 1, yi + 1};
      for (int q = 0; q < 4; ++q) {
        if (xs[q] < 0 || xs[q] >= w || ys[q] < 0 || ys[q] >= h) continue;
        streaks[ys[q] * w + xs[q]] += static_cast<float>(0.5 * strength * weights[q]);
      }
    }
  }
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x) {
      const float s = std::min(1.0f, streaks[y * w + x]);
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = 1.0f - (1.0f - out.at(y, x, c)) * (1.0f - s);
    }
  return out.image();
}

Image apply_snow(const Image& img, const SnowParams& p, RenderSeed seed) {
  Canvas out(img);
  Rng rng(seed.value);
  for (int k = 0; k < p.flake_count; ++k) {
    const double cx = rng.uniform(0.0, static_cast<double>(out.w));
    const double cy = rng.uniform(0.0, static_cast<double>(out.h));
    const auto scale = rng.uniform_int(0, 2);
    const double radius = lerp(p.size_range_px, static_cast<double>(scale) / 2.0);
    const double sigma = std::max(0.35, 0.6 * radius);
    const double reach = 2.5 * std::max(radius, sigma);
    const auto y_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(cy - reach)));
    const auto y_hi = std::min<std::int64_t>(out.h - 1, static_cast<std::int64_t>(std::ceil(cy + reach)));
    const auto x_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(cx - reach)));
    const auto x_hi = std::min<std::int64_t>(out.w - 1, static_cast<std::int64_t>(std::ceil(cx + reach)));
    for (auto y = y_lo; y <= y_hi; ++y)
      for (auto x = x_lo; x <= x_hi; ++x) {
        const double d2 = (x + 0.5 - cx) * (x + 0.5 - cx) + (y + 0.5 - cy) * (y + 0.5 - cy);
        const auto a = static_cast<float>(p.opacity * std::exp(-d2 / (2.0 * sigma * sigma)));
        for (int c = 0; c < 3; ++c) out.at(y, x, c) = out.at(y, x, c) * (1.0f - a) + a;
      }
  }
  return out.image();
}

Image apply_night(const Image& img, const NightParams& p) {
  auto t = img.tensor().to(torch::kFloat64).pow(p.gamma) * p.illumination_scale;
  return Image::clamped(t);
}

Image apply_raindrops(const Image& img, const RaindropParams& p, RenderSeed seed) {
  const Canvas src(img);
  Canvas out(img);
  Rng rng(seed.value);
  const double s = p.refraction_strength;
  const double blur = 1.0 + s;
  for (int k = 0; k < p.drop_count; ++k) {
    const double cx = rng.uniform(0.0, static_cast<double>(out.w));
    const double cy = rng.uniform(0.0, static_cast<double>(out.h));
    const double radius = rng.uniform(p.radius_range_px.first, p.radius_range_px.second);
    const auto y_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(cy - radius)));
    const auto y_hi = std::min<std::int64_t>(out.h - 1, static_cast<std::int64_t>(std::ceil(cy + radius)));
    const auto x_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(cx - radius)));
    const auto x_hi = std::min<std::int64_t>(out.w - 1, static_cast<std::int64_t>(std::ceil(cx + radius)));
    for (auto y = y_lo; y <= y_hi; ++y)
      for (auto x = x_lo; x <= x_hi; ++x) {
        const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
        const double rho = std::sqrt(dx * dx + dy * dy) / radius;
        if (rho >= 1.0) continue;
        const double k_mag = 1.0 - s * (1.0 - rho * rho);
        const double sy = cy + dy * k_mag - 0.5, sx = cx + dx * k_mag - 0.5;
        // Edge fade: full inside rho < 0.8, smooth to zero at the rim.
        const double e = std::clamp((1.0 - rho) / 0.2, 0.0, 1.0);
        const double wgt = e * e * (3.0 - 2.0 * e);
        for (int c = 0; c < 3; ++c) {
          const double v = (src.sample(sy, sx, c) + src.sample(sy + blur, sx, c) +
                            src.sample(sy - blur, sx, c) + src.sample(sy, sx + blur, c) +
                            src.sample(sy, sx - blur, c)) / 5.0;
          const double lit = std::min(1.0, v * 0.92 + 0.08 * s);
          out.at(y, x, c) = static_cast<float>(wgt * lit + (1.0 - wgt) * out.at(y, x, c));
        }
      }
  }
  return out.image();
}

}  // namespace

Weather weather_of(const DegradationParams& params) {
  return static_cast<Weather>(params.index());
}

void validate(const DegradationParams& params) {
  std::visit(
      Overloaded{
          [](const HazeParams& p) {
            require(std::isfinite(p.beta) && p.beta >= 0.0, "haze beta must be finite and >= 0");
            for (double a : p.airlight) require(in_unit(a), "haze airlight must lie in [0, 1]");
          },
          [](const RainStreakParams& p) {
            require(p.count >= 0, "rain streak count must be >= 0");
            require(std::isfinite(p.length_px) && p.length_px > 0.0, "rain streak length must be > 0");
            require(std::isfinite(p.angle_deg) && std::abs(p.angle_deg) <= 90.0,
                    "rain streak angle must lie in [-90, 90] degrees");
            require(in_unit(p.intensity), "rain streak intensity must lie in [0, 1]");
          },
          [](const SnowParams& p) {
            require(p.flake_count >= 0, "snow flake count must be >= 0");
            require(std::isfinite(p.size_range_px.first) && p.size_range_px.first > 0.0 &&
                        p.size_range_px.second >= p.size_range_px.first &&
                        std::isfinite(p.size_range_px.second),
                    "snow size range must satisfy 0 < min <= max");
            require(in_unit(p.opacity), "snow opacity must lie in [0, 1]");
          },
          [](const NightParams& p) {
            require(std::isfinite(p.gamma) && p.gamma >= 1.0, "night gamma must be >= 1");
            require(std::isfinite(p.illumination_scale) && p.illumination_scale > 0.0 &&
                        p.illumination_scale <= 1.0,
                    "night illumination scale must lie in (0, 1]");
          },
          [](const RaindropParams& p) {
            require(p.drop_count >= 0, "raindrop count must be >= 0");
            require(std::isfinite(p.radius_range_px.first) && p.radius_range_px.first > 0.0 &&
                        p.radius_range_px.second >= p.radius_range_px.first &&
                        std::isfinite(p.radius_range_px.second),
                    "raindrop radius range must satisfy 0 < min <= max");
            require(in_unit(p.refraction_strength), "raindrop refraction strength must lie in [0, 1]");
          },
      },
      params);
}

DegradationRanges DegradationRanges::held_out() {
  DegradationRanges r;
  r.haze_beta = {2.1, 2.8};
  r.haze_airlight = {0.6, 0.74};
  r.rain_density = {46.0, 70.0};
  r.rain_length = {15.0, 22.0};
  r.rain_angle = {26.0, 40.0};
  r.rain_intensity = {0.61, 0.8};
  r.snow_density = {41.0, 60.0};
  r.snow_size = {2.6, 3.5};
  r.snow_opacity = {0.5, 0.64};
  r.night_gamma = {2.6, 3.2};
  r.night_scale = {0.15, 0.24};
  r.drop_density = {4.5, 6.0};
  r.drop_radius = {8.5, 10.0};
  r.drop_strength = {0.71, 0.9};
  return r;
}

DegradationParams sample_params(Weather w, RenderSeed seed, std::int64_t height, std::int64_t width,
                                const DegradationRanges& r) {
  Rng rng(derive_seed(seed.value, "params"));
  switch (w) {
    case Weather::Haze: {
      HazeParams p;
      p.beta = lerp(r.haze_beta, rng.uniform());
      const double base = lerp(r.haze_airlight, rng.uniform());
      // Slight cool tint, kept inside the airlight range.
      p.airlight = {base, base, std::min(r.haze_airlight.second, base + 0.03 * rng.uniform())};
      p.depth_mode = rng.uniform() < 0.5 ? DepthMode::Constant : DepthMode::VerticalGradient;
      return p;
    }
    case Weather::RainStreak: {
      RainStreakParams p;
      p.count = scaled_count(lerp(r.rain_density, rng.uniform()), height, width);
      p.length_px = lerp(r.rain_length, rng.uniform());
      p.angle_deg = lerp(r.rain_angle, rng.uniform());
      p.intensity = lerp(r.rain_intensity, rng.uniform());
      return p;
    }
    case Weather::Snow: {
      SnowParams p;
      p.flake_count = scaled_count(lerp(r.snow_density, rng.uniform()), height, width);
      const double a = lerp(r.snow_size, rng.uniform());
      const double b = lerp(r.snow_size, rng.uniform());
      p.size_range_px = {std::min(a, b), std::max(a, b)};
      p.opacity = lerp(r.snow_opacity, rng.uniform());
      return p;
    }
    case Weather::Night: {
      NightParams p;
      p.gamma = lerp(r.night_gamma, rng.uniform());
      p.illumination_scale = lerp(r.night_scale, rng.uniform());
      return p;
    }
    case Weather::Raindrop: {
      RaindropParams p;
      p.drop_count = std::max(1, scaled_count(lerp(r.drop_density, rng.uniform()), height, width));
      const double a = lerp(r.drop_radius, rng.uniform());
      const double b = lerp(r.drop_radius, rng.uniform());
      p.radius_range_px = {std::min(a, b), std::max(a, b)};
      p.refraction_strength = lerp(r.drop_strength, rng.uniform());
      return p;
    }
  }
  throw ParamError("unknown weather");
}

Image haze_scatter(const Image& img, const torch::Tensor& transmission,
                   const std::array<double, 3>& airlight) {
  if (transmission.dim() != 2 || transmission.size(0) != img.height() ||
      transmission.size(1) != img.width())
    throw ShapeError("transmission map must be [H, W]");
  auto t = transmission.to(torch::kFloat64).unsqueeze(2);
  auto a = torch::tensor({airlight[0], airlight[1], airlight[2]}, torch::kFloat64).view({1, 1, 3});
  return Image::clamped(img.tensor().to(torch::kFloat64) * t + a * (1.0 - t));
}

Image apply_weather(const Image& img, const DegradationParams& params, RenderSeed seed) {
  if (img.empty()) throw ShapeError("empty image");
  validate(params);
  return std::visit(Overloaded{
                        [&](const HazeParams& p) { return apply_haze(img, p); },
                        [&](const RainStreakParams& p) { return apply_rain(img, p, seed); },
                        [&](const SnowParams& p) { return apply_snow(img, p, seed); },
                        [&](const NightParams& p) { return apply_night(img, p); },
                        [&](const RaindropParams& p) { return apply_raindrops(img, p, seed); },
                    },
                    params);
}

std::vector<ComposeStage> plan_condition(WeatherCode code, RenderSeed seed, std::int64_t height,
                                         std::int64_t width, const DegradationRanges& ranges) {
  if (code.is_clean()) throw InvalidCodeError("weather code 00000 has no degradation");
  std::vector<ComposeStage> stages;
  for (Weather w : code.weathers()) {
    const RenderSeed stage_seed{derive_seed(seed.value, "stage", static_cast<std::uint64_t>(w))};
    stages.push_back({w, stage_seed, sample_params(w, stage_seed, height, width, ranges)});
  }
  return stages;
}

Image run_stages(const Image& img, const std::vector<ComposeStage>& stages) {
  Image current = img;
  for (const auto& stage : stages) current = apply_weather(current, stage.params, stage.seed);
  return current;
}

Image compose_condition(const Image& img, WeatherCode code, RenderSeed seed,
                        const DegradationRanges& ranges) {
  return run_stages(img, plan_condition(code, seed, img.height(), img.width(), ranges));
}

Image make_clean_scene(RenderSeed seed, std::int64_t height, std::int64_t width) {
  if (height <= 0 || width <= 0 || height % kDownsample || width % kDownsample)
    throw ShapeError("scene sides must be positive multiples of 8");
  Rng rng(derive_seed(seed.value, "scene"));
  const double h = static_cast<double>(height), w = static_cast<double>(width);
  auto color = [&](double lo, double hi) {
    return std::array<double, 3>{rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
  };
  const double horizon = rng.uniform(0.3, 0.6) * h;
  const std::array<double, 3> sky_top{rng.uniform(0.3, 0.5), rng.uniform(0.5, 0.7), rng.uniform(0.75, 0.95)};
  const std::array<double, 3> sky_low{rng.uniform(0.65, 0.85), rng.uniform(0.7, 0.88), rng.uniform(0.8, 0.95)};
  const auto ground_near = color(0.15, 0.45);
  const auto ground_far = color(0.3, 0.6);

  struct Block {
    double x0, x1, top;
    std::array<double, 3> col;
  };
  std::vector<Block> blocks(static_cast<std::size_t>(rng.uniform_int(2, 5)));
  for (auto& b : blocks) {
    const double cx = rng.uniform(0.0, w);
    const double half = rng.uniform(0.08, 0.2) * w;
    b = {cx - half, cx + half, horizon - rng.uniform(0.1, 0.35) * h, color(0.2, 0.75)};
  }
  struct Blob {
    double cx, cy, r;
    std::array<double, 3> col;
  };
  std::vector<Blob> blobs(static_cast<std::size_t>(rng.uniform_int(1, 3)));
  for (auto& b : blobs)
    b = {rng.uniform(0.0, w), rng.uniform(horizon, h), rng.uniform(0.06, 0.16) * std::min(h, w),
         color(0.1, 0.6)};
  const double fx = rng.uniform(0.5, 2.0) * 2.0 * M_PI / w;
  const double fy = rng.uniform(0.5, 2.0) * 2.0 * M_PI / h;
  const double phase = rng.uniform(0.0, 2.0 * M_PI);

  auto soft = [](double signed_dist) { return std::clamp(0.5 + signed_dist / 1.5, 0.0, 1.0); };
  auto t = torch::empty({height, width, 3});
  auto acc = t.accessor<float, 3>();
  for (std::int64_t y = 0; y < height; ++y)
    for (std::int64_t x = 0; x < width; ++x) {
      const double py = y + 0.5, px = x + 0.5;
      std::array<double, 3> c{};
      const double sky_t = std::clamp(py / std::max(horizon, 1.0), 0.0, 1.0);
      const double ground_t = std::clamp((py - horizon) / std::max(h - horizon, 1.0), 0.0, 1.0);
      const double g = soft(py - horizon);
      for (int k = 0; k < 3; ++k) {
        const double sky = sky_top[k] * (1 - sky_t) + sky_low[k] * sky_t;
        const double ground = ground_far[k] * (1 - ground_t) + ground_near[k] * ground_t;
        c[k] = sky * (1 - g) + ground * g;
      }
      for (const auto& b : blocks) {
        const double inside = std::min({px - b.x0, b.x1 - px, py - b.top, horizon + 2.0 - py});
        const double a = soft(inside);
        for (int k = 0; k < 3; ++k) c[k] = c[k] * (1 - a) + b.col[k] * a;
      }
      for (const auto& b : blobs) {
        const double d = std::hypot(px - b.cx, py - b.cy);
        const double a = soft(b.r - d);
        for (int k = 0; k < 3; ++k) c[k] = c[k] * (1 - a) + b.col[k] * a;
      }
      const double shade = 1.0 + 0.06 * std::sin(fx * px + phase) * std::cos(fy * py);
      for (int k = 0; k < 3; ++k) acc[y][x][k] = static_cast<float>(std::clamp(c[k] * shade, 0.0, 1.0));
    }
  return Image(t);
}

}  // namespace rahc
