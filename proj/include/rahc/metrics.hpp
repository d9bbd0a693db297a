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

#include <string_view>

#include "rahc/image.hpp"

namespace rahc {

/// Rgb averages over all three channels; Y uses luma 0.299R + 0.587G + 0.114B.
enum class MetricMode { Rgb, Y };

MetricMode metric_mode_from_name(std::string_view name);
std::string_view metric_mode_name(MetricMode mode);

/// Reported value for zero (or vanishing) error.
inline constexpr double kPsnrCap = 100.0;

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// 10 log10(1 / MSE) with peak value 1, capped at kPsnrCap.
double psnr(const Image& a, const Image& b, MetricMode mode = MetricMode::Rgb);

/// Mean local SSIM over all valid 11x11 Gaussian windows (sigma 1.5),
/// dynamic range 1. Rgb mode averages the per-channel maps.
double ssim(const Image& a, const Image& b, MetricMode mode = MetricMode::Rgb);

/// [C, H, W] float64 planes the metrics operate on.
torch::Tensor metric_planes(const Image& img, MetricMode mode);

}  // namespace rahc
