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

#include "rahc/image.hpp"

namespace rahc {

/// K reconstruction vectors of dimension N_z, stored as a [K, N_z] tensor.
class Codebook {
 public:
  Codebook() = default;
  /// Requires K >= 2 and finite entries.
  explicit Codebook(torch::Tensor vectors);

  std::int64_t size() const { return vectors_.size(0); }
  std::int64_t dim() const { return vectors_.size(1); }
  const torch::Tensor& vectors() const { return vectors_; }
  Codebook to(torch::Dtype dtype) const { return Codebook(vectors_.to(dtype)); }
  /// Number of entries that are bit-identical to an earlier entry.
  std::int64_t duplicate_count() const;

 private:
  torch::Tensor vectors_;
};

/// Encoder output for one image: [H/8, W/8, N_z].
struct LatentGrid {
  torch::Tensor latents;
};

/// Indices [H/8, W/8] into the codebook and the selected vectors [H/8, W/8, N_z].
struct QuantizedGrid {
  torch::Tensor indices;
  torch::Tensor quantized;
};

/// Index of the Euclidean-nearest codebook row for every row of `vectors`
/// ([M, N_z] against [K, N_z]); ties go to the lowest index. Candidates are
/// screened with a matrix product and the winner is decided on exact
/// sequential squared distances accumulated in double precision.
torch::Tensor nearest_indices(const torch::Tensor& vectors, const torch::Tensor& book);

QuantizedGrid quantize(const LatentGrid& grid, const Codebook& book);

/// Batched form over [N, N_z, h, w]; returns indices [N, h, w] and the
/// selected vectors in the same NCHW layout (no gradient).
struct BatchQuantized {
  torch::Tensor indices;
  torch::Tensor quantized;
};
BatchQuantized quantize_nchw(const torch::Tensor& latents, const torch::Tensor& book);

/// z + (q - z).detach(): forward value q, gradient of the identity.
torch::Tensor straight_through(const torch::Tensor& z, const torch::Tensor& q);

/// exp(entropy) of the index histogram; lies in [1, K].
double codebook_perplexity(const torch::Tensor& indices, std::int64_t codebook_size);

struct VqConfig {
  std::int64_t codebook_size = 512;
  std::int64_t latent_dim = 256;
  std::int64_t base_channels = 16;
  double commitment = 0.25;
  double learning_rate = 1e-3;
  int steps = 2000;
  int batch_size = 8;
  std::uint64_t seed = 0;
  /// Stop early once the running reconstruction PSNR on the batch reaches
  /// this value (0 disables).
  double target_psnr = 0.0;
};

/// Small convolutional autoencoder (downsampling factor 8) with a learned
/// codebook parameter.
class VqAutoencoderImpl : public torch::nn::Module {
 public:
  explicit VqAutoencoderImpl(const VqConfig& config);

  torch::Tensor encode(const torch::Tensor& images);  // [N, N_z, H/8, W/8]
  torch::Tensor decode(const torch::Tensor& latents);  // [N, 3, H, W], unclamped
  Codebook codebook() const { return Codebook(codebook_.detach().clone()); }

  torch::nn::Sequential encoder{nullptr}, decoder{nullptr};
  torch::Tensor codebook_;
};
TORCH_MODULE(VqAutoencoder);

LatentGrid vq_encode(const Image& img, VqAutoencoder& model);
Image vq_decode(const QuantizedGrid& grid, VqAutoencoder& model);
/// decode(quantize(encode(x))).
Image vq_reconstruct(const Image& img, VqAutoencoder& model);

struct VqTrainLog {
  std::vector<double> loss;
  std::vector<double> recon;
  std::vector<double> perplexity;
  std::int64_t reseeded = 0;
};

struct VqTrainResult {
  VqAutoencoder model{nullptr};
  Codebook book;
  VqTrainLog log;
};

/// Trains on reconstruction (L2) + codebook + commitment terms with
/// straight-through gradients. Entries unused for a whole epoch are
/// re-seeded from encoder outputs. Needs at least 16 images; throws
/// DivergenceError on a non-finite loss.
VqTrainResult train_vq(const std::vector<Image>& cleans, const VqConfig& config);

void save_vq(const std::filesystem::path& path, VqAutoencoder& model, const VqConfig& config);
VqAutoencoder load_vq(const std::filesystem::path& path, VqConfig* config = nullptr);
/// Flat K x N_z little-endian float32 dump of the codebook.
void export_codebook(const std::filesystem::path& path, const Codebook& book);
Codebook import_codebook(const std::filesystem::path& path, std::int64_t dim);

}  // namespace rahc
