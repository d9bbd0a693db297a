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

#include <array>
#include <cstdint>
#include <vector>

#include "rahc/image.hpp"
#include "rahc/vq.hpp"

namespace rahc {

// Feature maps inside the networks are NCHW tensors.

/// [N, C, H, W] -> [N, C r^2, H/r, W/r]. Output channel c r^2 + i r + j holds
/// the pixel at row offset i, column offset j of each r x r block.
torch::Tensor pixel_unshuffle(const torch::Tensor& x, std::int64_t r);
/// Exact inverse of pixel_unshuffle.
torch::Tensor pixel_shuffle(const torch::Tensor& x, std::int64_t r);

/// Layer normalisation over the channel dimension at every pixel.
class LayerNorm2dImpl : public torch::nn::Module {
 public:
  explicit LayerNorm2dImpl(std::int64_t channels, double eps = 1e-5);
  torch::Tensor forward(const torch::Tensor& x);

  torch::Tensor weight, bias;

 private:
  double eps_;
};
TORCH_MODULE(LayerNorm2d);

/// Convolution-attention module for one head:
///   a, b = split(norm(conv1x1(x)))
///   a'   = PS(self_attention(PU(a)))
///   b'   = conv3x3(gelu(conv3x3(b)))
///   out  = conv1x1(cat(a', b')) + x
/// Sides that are not multiples of the reduction are edge-padded for PU and
/// cropped back after PS.
class ConvAttentionModuleImpl : public torch::nn::Module {
 public:
  ConvAttentionModuleImpl(std::int64_t channels, std::int64_t reduction);
  torch::Tensor forward(const torch::Tensor& x);

  /// Tokens the attention path sees for an h x w input.
  std::int64_t token_count(std::int64_t h, std::int64_t w) const {
    return ((h + reduction_ - 1) / reduction_) * ((w + reduction_ - 1) / reduction_);
  }

  torch::nn::Conv2d in_proj{nullptr}, qkv{nullptr}, conv_a{nullptr}, conv_b{nullptr}, out_proj{nullptr};
  LayerNorm2d norm{nullptr};

 private:
  std::int64_t channels_, reduction_;
};
TORCH_MODULE(ConvAttentionModule);

/// Dual-path feed-forward network:
///   y1, y2 = split(norm(x))
///   out = conv1x1(cat(gelu(linear(y1)), gelu(dwconv3x3(conv1x1(y2))))) + x
class DualPathFFNImpl : public torch::nn::Module {
 public:
  DualPathFFNImpl(std::int64_t channels, std::int64_t expansion = 2);
  torch::Tensor forward(const torch::Tensor& x);

  LayerNorm2d norm{nullptr};
  torch::nn::Conv2d linear{nullptr}, pointwise{nullptr}, depthwise{nullptr}, out_proj{nullptr};
};
TORCH_MODULE(DualPathFFN);

/// Multi-head blend block: channels split into heads, one CAM per head,
/// concatenation, 1x1 fusion, then the dual-path FFN. Shape-preserving.
class MultiHeadBlendBlockImpl : public torch::nn::Module {
 public:
  MultiHeadBlendBlockImpl(std::int64_t channels, std::int64_t heads, std::int64_t reduction,
                          std::int64_t ffn_expansion = 2);
  torch::Tensor forward(const torch::Tensor& x);
  std::int64_t heads() const { return static_cast<std::int64_t>(cams->size()); }

  torch::nn::ModuleList cams{nullptr};
  torch::nn::Conv2d fuse{nullptr};
  DualPathFFN ffn{nullptr};
};
TORCH_MODULE(MultiHeadBlendBlock);

struct NetworkConfig {
  std::int64_t base_channels = 32;
  /// n1..n4 for the encoder levels (shallow to deep), n5..n8 for the decoder
  /// levels (deep to shallow).
  std::array<int, 8> block_counts{2, 4, 6, 4, 4, 2, 2, 2};
  /// Heads per level, shallow to deep; mirrored in the decoder.
  std::array<int, 4> heads{1, 2, 4, 8};
  std::int64_t reduction = 2;
  std::int64_t latent_dim = 256;
  int mapping_blocks = 2;
  std::int64_t ffn_expansion = 2;

  /// Small configuration used by tests and smoke runs.
  static NetworkConfig tiny();
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Which bottleneck vectors the decoder consumes.
enum class RvSource { Matched, Predicted };

struct RestorationOutput {
  torch::Tensor restored;    // [N, 3, H, W], unclamped
  torch::Tensor bottleneck;  // F_mi, [N, 8C, H/8, W/8]
  torch::Tensor predicted;   // F_rv^d, [N, Nz, H/8, W/8]
  torch::Tensor matched;     // F_rv, [N, Nz, H/8, W/8], detached codebook vectors
  torch::Tensor indices;     // [N, H/8, W/8]
};

struct EncoderOutput {
  torch::Tensor bottleneck;
  std::vector<torch::Tensor> skips;  // shallow to deep, one per downsampling
};

class MappingNetworkImpl : public torch::nn::Module {
 public:
  MappingNetworkImpl(std::int64_t channels, std::int64_t heads, std::int64_t reduction,
                     std::int64_t latent_dim, int blocks, std::int64_t ffn_expansion);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Sequential body{nullptr};
  torch::nn::Conv2d proj{nullptr};
};
TORCH_MODULE(MappingNetwork);

/// U-shaped restoration network with codebook-matched bottleneck vectors.
class RestorationNetImpl : public torch::nn::Module {
 public:
  explicit RestorationNetImpl(NetworkConfig config);

  EncoderOutput encode(const torch::Tensor& degraded);
  /// Mapping network prediction F_rv^d.
  torch::Tensor map(const torch::Tensor& bottleneck);
  torch::Tensor decode(const torch::Tensor& degraded, const EncoderOutput& enc, const torch::Tensor& rv);
  RestorationOutput forward(const torch::Tensor& degraded, const Codebook& book,
                            RvSource source = RvSource::Matched);

  /// Parameter groups touched by the two training phases.
  std::vector<torch::Tensor> mapping_parameters() const;
  std::vector<torch::Tensor> non_mapping_parameters() const;

  const NetworkConfig& config() const { return config_; }

  torch::nn::Conv2d shallow{nullptr}, rv_fuse{nullptr}, head{nullptr};
  torch::nn::ModuleList enc_levels{nullptr}, downs{nullptr}, dec_levels{nullptr}, ups{nullptr},
      skip_fuse{nullptr};
  MappingNetwork mapping{nullptr};

 private:
  NetworkConfig config_;
};
TORCH_MODULE(RestorationNet);

struct MappingLoss {
  torch::Tensor value;  // scalar
  std::int64_t zero_norm_cells = 0;
};

/// Mean over cells (and batch) of 1 - cos(predicted, target) along the
/// channel axis. Cells where either vector has zero norm count cos = 0 and
/// are reported in `zero_norm_cells`.
MappingLoss mapping_loss(const torch::Tensor& predicted, const torch::Tensor& target);

/// Codebook matches for the mapping network output.
struct MappingOutput {
  torch::Tensor predicted;
  QuantizedGrid matched;
};
MappingOutput map_features(RestorationNet& net, const torch::Tensor& bottleneck, const Codebook& book);

/// Clamped single-image inference.
Image restore(RestorationNet& net, const Image& degraded, const Codebook& book);

}  // namespace rahc
