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

#include "rahc/image.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "rahc/error.hpp"

namespace rahc {

namespace {
void check_shape(const torch::Tensor& t) {
  if (!t.defined() || t.dim() != 3 || t.size(2) != 3)
    throw ShapeError("image must be a [H, W, 3] tensor");
  if (t.size(0) <= 0 || t.size(1) <= 0 || t.size(0) % kDownsample != 0 ||
      t.size(1) % kDownsample != 0)
    throw ShapeError("image sides must be positive multiples of 8, got " +
                     std::to_string(t.size(0)) + "x" + std::to_string(t.size(1)));
}
}  // namespace

Image::Image(torch::Tensor hwc) {
  check_shape(hwc);
  auto t = hwc.detach().to(torch::kFloat32).contiguous();
  if (!torch::isfinite(t).all().item<bool>()) throw ParamError("image contains non-finite values");
  if (t.min().item<float>() < 0.0f || t.max().item<float>() > 1.0f)
    throw ParamError("image values must lie in [0, 1]");
  pixels_ = std::move(t);
}

Image Image::clamped(torch::Tensor hwc) {
  check_shape(hwc);
  auto t = torch::nan_to_num(hwc.detach().to(torch::kFloat32), 0.0, 1.0, 0.0).clamp(0.0, 1.0);
  return Image(t.contiguous());
}

Image Image::from_chw(const torch::Tensor& chw) {
  if (chw.dim() != 3 || chw.size(0) != 3) throw ShapeError("expected a [3, H, W] tensor");
  return clamped(chw.detach().permute({1, 2, 0}));
}

Image Image::constant(std::int64_t height, std::int64_t width, float r, float g, float b) {
  auto t = torch::empty({height, width, 3});
  t.select(2, 0).fill_(r);
  t.select(2, 1).fill_(g);
  t.select(2, 2).fill_(b);
  return Image(t);
}

torch::Tensor Image::chw(torch::Dtype dtype) const {
  return pixels_.permute({2, 0, 1}).to(dtype).contiguous();
}

torch::Tensor to_batch(const std::vector<Image>& images, torch::Dtype dtype) {
  if (images.empty()) throw ShapeError("empty image batch");
  std::vector<torch::Tensor> parts;
  parts.reserve(images.size());
  for (const auto& im : images) {
    if (im.height() != images.front().height() || im.width() != images.front().width())
      throw ShapeError("batch images differ in size");
    parts.push_back(im.chw(dtype));
  }
  return torch::stack(parts);
}

std::vector<Image> from_batch(const torch::Tensor& nchw) {
  std::vector<Image> out;
  out.reserve(nchw.size(0));
  for (std::int64_t i = 0; i < nchw.size(0); ++i) out.push_back(Image::from_chw(nchw[i]));
  return out;
}

Image quantize_8bit(const Image& img) {
  return Image((img.tensor() * 255.0f).round() / 255.0f);
}

namespace {
struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

void write_png(const std::filesystem::path& path, const Image& img) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError(path.string(), "cannot open for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError(path.string(), "libpng initialisation failed");
  }
  const auto h = static_cast<png_uint_32>(img.height());
  const auto w = static_cast<png_uint_32>(img.width());
  auto bytes = (img.tensor() * 255.0f).round().to(torch::kUInt8).contiguous();
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = bytes.data_ptr<std::uint8_t>() + y * w * 3;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path.string(), "libpng write failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError(path.string(), "cannot open for reading");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError(path.string(), "libpng initialisation failed");
  }
  torch::Tensor bytes;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string(), "not a readable PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  png_set_gray_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  const auto h = png_get_image_height(png, info);
  const auto w = png_get_image_width(png, info);
  if (png_get_rowbytes(png, info) != w * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string(), "unsupported PNG layout");
  }
  bytes = torch::empty({static_cast<std::int64_t>(h), static_cast<std::int64_t>(w), 3}, torch::kUInt8);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = bytes.data_ptr<std::uint8_t>() + y * w * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return Image(bytes.to(torch::kFloat32) / 255.0f);
}

}  // namespace rahc
