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

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rahc {

/// Encoder downsampling factor; every image side must be a multiple of it.
inline constexpr std::int64_t kDownsample = 8;

/// RGB image stored as a contiguous float32 tensor of shape [H, W, 3] with
/// values in [0, 1]. H and W are positive multiples of 8.
class Image {
 public:
  Image() = default;

  /// Validates shape, finiteness and range; throws ShapeError/ParamError.
  explicit Image(torch::Tensor hwc);

  /// Clamps to [0,1] (NaN becomes 0) before validating the shape.
  static Image clamped(torch::Tensor hwc);
  /// Converts a [3, H, W] tensor (any float dtype) into a clamped image.
  static Image from_chw(const torch::Tensor& chw);
  static Image constant(std::int64_t height, std::int64_t width, float r, float g, float b);

  std::int64_t height() const { return pixels_.size(0); }
  std::int64_t width() const { return pixels_.size(1); }
  bool empty() const { return !pixels_.defined(); }

  const torch::Tensor& tensor() const { return pixels_; }
  /// [3, H, W] view converted to `dtype`.
  torch::Tensor chw(torch::Dtype dtype = torch::kFloat32) const;

  friend bool operator==(const Image& a, const Image& b) { return a.pixels_.equal(b.pixels_); }

 private:
  torch::Tensor pixels_;
};

/// Stacks images into an [N, 3, H, W] batch.
torch::Tensor to_batch(const std::vector<Image>& images, torch::Dtype dtype = torch::kFloat32);
std::vector<Image> from_batch(const torch::Tensor& nchw);

/// Rounds to the 8-bit grid the PNG files use.
Image quantize_8bit(const Image& img);

void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

}  // namespace rahc
