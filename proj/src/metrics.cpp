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

#include "rahc/metrics.hpp"

#include <cmath>

#include "rahc/error.hpp"

namespace rahc {

MetricMode metric_mode_from_name(std::string_view name) {
  if (name == "rgb") return MetricMode::Rgb;
  if (name == "y") return MetricMode::Y;
  throw ConfigError("unknown metric mode '" + std::string(name) + "' (expected rgb or y)");
}

std::string_view metric_mode_name(MetricMode mode) { return mode == MetricMode::Rgb ? "rgb" : "y"; }

torch::Tensor metric_planes(const Image& img, MetricMode mode) {
  auto x = img.chw(torch::kFloat64);
  if (mode == MetricMode::Rgb) return x;
  return (0.299 * x[0] + 0.587 * x[1] + 0.114 * x[2]).unsqueeze(0);
}

namespace {

void check_same(const Image& a, const Image& b) {
  if (a.empty() || b.empty()) throw ShapeError("metric on an empty image");
  if (a.height() != b.height() || a.width() != b.width())
    throw ShapeError("metric inputs differ in shape: " + std::to_string(a.height()) + "x" +
                     std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                     std::to_string(b.width()));
}

torch::Tensor gaussian_window() {
  auto g = torch::arange(kSsimWindow, torch::kFloat64) - (kSsimWindow - 1) / 2.0;
  g = torch::exp(-g * g / (2 * kSsimSigma * kSsimSigma));
  g = g / g.sum();
  return torch::outer(g, g).view({1, 1, kSsimWindow, kSsimWindow});
}

}  // namespace

double psnr(const Image& a, const Image& b, MetricMode mode) {
  check_same(a, b);
  const double mse = (metric_planes(a, mode) - metric_planes(b, mode)).pow(2).mean().item<double>();
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b, MetricMode mode) {
  check_same(a, b);
  if (a.height() < kSsimWindow || a.width() < kSsimWindow)
    throw ShapeError("SSIM needs images of at least " + std::to_string(kSsimWindow) + "x" +
                     std::to_string(kSsimWindow));
  const auto x = metric_planes(a, mode).unsqueeze(1);
  const auto y = metric_planes(b, mode).unsqueeze(1);
  const auto w = gaussian_window();
  auto filt = [&](const torch::Tensor& t) { return torch::conv2d(t, w); };
  const auto mx = filt(x), my = filt(y);
  const auto sxx = filt(x * x) - mx * mx;
  const auto syy = filt(y * y) - my * my;
  const auto sxy = filt(x * y) - mx * my;
  constexpr double c1 = kSsimK1 * kSsimK1, c2 = kSsimK2 * kSsimK2;
  const auto map = ((2 * mx * my + c1) * (2 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2));
  return map.mean().item<double>();
}

}  // namespace rahc
