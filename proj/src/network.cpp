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

#include "rahc/network.hpp"

#include <cmath>

#include "rahc/error.hpp"

namespace rahc {

namespace nn = torch::nn;

torch::Tensor pixel_unshuffle(const torch::Tensor& x, std::int64_t r) {
  if (x.dim() != 4) throw ShapeError("pixel_unshuffle expects [N, C, H, W]");
  if (r < 1) throw ShapeError("pixel_unshuffle factor must be >= 1");
  const auto n = x.size(0), c = x.size(1), h = x.size(2), w = x.size(3);
  if (h % r || w % r)
    throw ShapeError("spatial size " + std::to_string(h) + "x" + std::to_string(w) +
                     " is not divisible by " + std::to_string(r));
  return x.reshape({n, c, h / r, r, w / r, r})
      .permute({0, 1, 3, 5, 2, 4})
      .reshape({n, c * r * r, h / r, w / r});
}

torch::Tensor pixel_shuffle(const torch::Tensor& x, std::int64_t r) {
  if (x.dim() != 4) throw ShapeError("pixel_shuffle expects [N, C, H, W]");
  if (r < 1) throw ShapeError("pixel_shuffle factor must be >= 1");
  const auto n = x.size(0), c = x.size(1), h = x.size(2), w = x.size(3);
  if (c % (r * r)) throw ShapeError("channel count is not divisible by r^2");
  return x.reshape({n, c / (r * r), r, r, h, w})
      .permute({0, 1, 4, 2, 5, 3})
      .reshape({n, c / (r * r), h * r, w * r});
}

namespace {
nn::Conv2d conv1x1(std::int64_t in, std::int64_t out) { return nn::Conv2d(nn::Conv2dOptions(in, out, 1)); }
nn::Conv2d conv3x3(std::int64_t in, std::int64_t out, std::int64_t stride = 1, std::int64_t groups = 1) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, 3).stride(stride).padding(1).groups(groups));
}
}  // namespace

LayerNorm2dImpl::LayerNorm2dImpl(std::int64_t channels, double eps) : eps_(eps) {
  weight = register_parameter("weight", torch::ones({channels}));
  bias = register_parameter("bias", torch::zeros({channels}));
}

torch::Tensor LayerNorm2dImpl::forward(const torch::Tensor& x) {
  auto mu = x.mean(1, true);
  auto var = (x - mu).pow(2).mean(1, true);
  auto y = (x - mu) / torch::sqrt(var + eps_);
  return y * weight.view({1, -1, 1, 1}) + bias.view({1, -1, 1, 1});
}

ConvAttentionModuleImpl::ConvAttentionModuleImpl(std::int64_t channels, std::int64_t reduction)
    : channels_(channels), reduction_(reduction) {
  if (channels < 2 || channels % 2) throw ConfigError("CAM needs an even channel count, got " + std::to_string(channels));
  if (reduction < 1) throw ConfigError("CAM reduction must be >= 1");
  const auto half = channels / 2;
  const auto token_dim = half * reduction * reduction;
  in_proj = register_module("in_proj", conv1x1(channels, channels));
  norm = register_module("norm", LayerNorm2d(channels));
  qkv = register_module("qkv", conv1x1(token_dim, 3 * token_dim));
  conv_a = register_module("conv_a", conv3x3(half, half));
  conv_b = register_module("conv_b", conv3x3(half, half));
  out_proj = register_module("out_proj", conv1x1(channels, channels));
}

torch::Tensor ConvAttentionModuleImpl::forward(const torch::Tensor& x) {
  if (x.dim() != 4 || x.size(1) != channels_)
    throw ShapeError("CAM expects " + std::to_string(channels_) + " input channels");
  auto y = norm(in_proj(x));
  auto halves = y.chunk(2, 1);
  // Attention path over pixel-unshuffled tokens; odd sizes are edge-padded.
  const auto h = x.size(2), w = x.size(3);
  const auto ph = (reduction_ - h % reduction_) % reduction_, pw = (reduction_ - w % reduction_) % reduction_;
  auto att_in = halves[0];
  if (ph || pw)
    att_in = torch::nn::functional::pad(
        att_in, torch::nn::functional::PadFuncOptions({0, pw, 0, ph}).mode(torch::kReplicate));
  auto tokens = rahc::pixel_unshuffle(att_in, reduction_);
  const auto n = tokens.size(0), d = tokens.size(1), th = tokens.size(2), tw = tokens.size(3);
  auto proj = qkv(tokens).flatten(2).transpose(1, 2);  // [N, T, 3d]
  auto parts = proj.chunk(3, 2);
  auto scores = torch::matmul(parts[0], parts[1].transpose(1, 2)) / std::sqrt(static_cast<double>(d));
  auto attended = torch::matmul(torch::softmax(scores, -1), parts[2]);  // [N, T, d]
  auto a = rahc::pixel_shuffle(attended.transpose(1, 2).reshape({n, d, th, tw}), reduction_);
  if (ph || pw) a = a.slice(2, 0, h).slice(3, 0, w);
  // Convolution path.
  auto b = conv_b(torch::gelu(conv_a(halves[1])));
  return out_proj(torch::cat({a, b}, 1)) + x;
}

DualPathFFNImpl::DualPathFFNImpl(std::int64_t channels, std::int64_t expansion) {
  if (channels < 2 || channels % 2) throw ConfigError("DP-FFN needs an even channel count");
  const auto half = channels / 2;
  const auto hidden = half * expansion;
  norm = register_module("norm", LayerNorm2d(channels));
  linear = register_module("linear", conv1x1(half, hidden));
  pointwise = register_module("pointwise", conv1x1(half, hidden));
  depthwise = register_module("depthwise", conv3x3(hidden, hidden, 1, hidden));
  out_proj = register_module("out_proj", conv1x1(2 * hidden, channels));
}

torch::Tensor DualPathFFNImpl::forward(const torch::Tensor& x) {
  auto halves = norm(x).chunk(2, 1);
  auto y1 = torch::gelu(linear(halves[0]));
  auto y2 = torch::gelu(depthwise(pointwise(halves[1])));
  return out_proj(torch::cat({y1, y2}, 1)) + x;
}

MultiHeadBlendBlockImpl::MultiHeadBlendBlockImpl(std::int64_t channels, std::int64_t heads,
                                                 std::int64_t reduction, std::int64_t ffn_expansion) {
  if (heads < 1 || channels % heads)
    throw ConfigError(std::to_string(channels) + " channels cannot be split into " + std::to_string(heads) + " heads");
  cams = register_module("cams", nn::ModuleList());
  for (std::int64_t k = 0; k < heads; ++k) cams->push_back(ConvAttentionModule(channels / heads, reduction));
  fuse = register_module("fuse", conv1x1(channels, channels));
  ffn = register_module("ffn", DualPathFFN(channels, ffn_expansion));
}

torch::Tensor MultiHeadBlendBlockImpl::forward(const torch::Tensor& x) {
  auto parts = x.chunk(heads(), 1);
  std::vector<torch::Tensor> outs;
  outs.reserve(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k) outs.push_back(cams[k]->as<ConvAttentionModule>()->forward(parts[k]));
  return ffn(fuse(torch::cat(outs, 1)));
}

NetworkConfig NetworkConfig::tiny() {
  NetworkConfig c;
  c.base_channels = 8;
  c.block_counts = {1, 1, 2, 1, 1, 1, 1, 1};
  return c;
}

void NetworkConfig::validate() const {
  if (base_channels < 1) throw ConfigError("base_channels must be >= 1");
  if (reduction < 1) throw ConfigError("attention reduction must be >= 1");
  if (latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
  for (int n : block_counts)
    if (n < 0) throw ConfigError("block counts must be >= 0");
  for (int level = 0; level < 4; ++level) {
    const auto ch = base_channels << level;
    if (heads[level] < 1 || ch % heads[level])
      throw ConfigError("level " + std::to_string(level + 1) + " has " + std::to_string(ch) +
                        " channels, not divisible by " + std::to_string(heads[level]) + " heads");
    if ((ch / heads[level]) % 2)
      throw ConfigError("level " + std::to_string(level + 1) + " head width must be even");
  }
}

MappingNetworkImpl::MappingNetworkImpl(std::int64_t channels, std::int64_t heads, std::int64_t reduction,
                                       std::int64_t latent_dim, int blocks, std::int64_t ffn_expansion) {
  body = register_module("body", nn::Sequential());
  for (int i = 0; i < blocks; ++i) body->push_back(MultiHeadBlendBlock(channels, heads, reduction, ffn_expansion));
  proj = register_module("proj", conv1x1(channels, latent_dim));
}

torch::Tensor MappingNetworkImpl::forward(const torch::Tensor& x) {
  return proj(body->is_empty() ? x : body->forward(x));
}

RestorationNetImpl::RestorationNetImpl(NetworkConfig config) : config_(config) {
  config_.validate();
  const auto c = config_.base_channels;
  const auto r = config_.reduction;
  const auto e = config_.ffn_expansion;
  shallow = register_module("shallow", conv3x3(3, c));
  enc_levels = register_module("enc_levels", nn::ModuleList());
  downs = register_module("downs", nn::ModuleList());
  for (int level = 0; level < 4; ++level) {
    const auto ch = c << level;
    nn::Sequential blocks;
    for (int b = 0; b < config_.block_counts[level]; ++b)
      blocks->push_back(MultiHeadBlendBlock(ch, config_.heads[level], r, e));
    enc_levels->push_back(blocks);
    if (level < 3) downs->push_back(conv3x3(ch, 2 * ch, 2));
  }
  const auto deep = c << 3;
  mapping = register_module("mapping", MappingNetwork(deep, config_.heads[3], r, config_.latent_dim,
                                                      config_.mapping_blocks, e));
  rv_fuse = register_module("rv_fuse", conv1x1(deep + config_.latent_dim, deep));
  dec_levels = register_module("dec_levels", nn::ModuleList());
  ups = register_module("ups", nn::ModuleList());
  skip_fuse = register_module("skip_fuse", nn::ModuleList());
  for (int i = 0; i < 4; ++i) {
    const int level = 3 - i;
    const auto ch = c << level;
    if (i > 0) {
      ups->push_back(conv1x1(2 * ch, ch * 4));
      skip_fuse->push_back(conv1x1(2 * ch, ch));
    }
    nn::Sequential blocks;
    for (int b = 0; b < config_.block_counts[4 + i]; ++b)
      blocks->push_back(MultiHeadBlendBlock(ch, config_.heads[level], r, e));
    dec_levels->push_back(blocks);
  }
  head = register_module("head", conv3x3(c, 3));
}

namespace {
torch::Tensor run_blocks(const std::shared_ptr<nn::Module>& m, torch::Tensor x) {
  auto seq = std::dynamic_pointer_cast<nn::SequentialImpl>(m);
  return seq->is_empty() ? x : seq->forward(x);
}
}  // namespace

EncoderOutput RestorationNetImpl::encode(const torch::Tensor& degraded) {
  if (degraded.dim() != 4 || degraded.size(1) != 3) throw ShapeError("restoration input must be [N, 3, H, W]");
  if (degraded.size(2) % kDownsample || degraded.size(3) % kDownsample)
    throw ShapeError("restoration input sides must be multiples of 8");
  EncoderOutput out;
  auto x = shallow(degraded);
  for (int level = 0; level < 4; ++level) {
    x = run_blocks(enc_levels[level], x);
    if (level < 3) {
      out.skips.push_back(x);
      x = downs[level]->as<nn::Conv2d>()->forward(x);
    }
  }
  out.bottleneck = x;
  return out;
}

torch::Tensor RestorationNetImpl::map(const torch::Tensor& bottleneck) { return mapping(bottleneck); }

torch::Tensor RestorationNetImpl::decode(const torch::Tensor& degraded, const EncoderOutput& enc,
                                         const torch::Tensor& rv) {
  auto x = rv_fuse(torch::cat({enc.bottleneck, rv}, 1));
  for (int i = 0; i < 4; ++i) {
    if (i > 0) {
      x = rahc::pixel_shuffle(ups[i - 1]->as<nn::Conv2d>()->forward(x), 2);
      x = skip_fuse[i - 1]->as<nn::Conv2d>()->forward(torch::cat({x, enc.skips[3 - i]}, 1));
    }
    x = run_blocks(dec_levels[i], x);
  }
  return head(x) + degraded;
}

RestorationOutput RestorationNetImpl::forward(const torch::Tensor& degraded, const Codebook& book,
                                              RvSource source) {
  if (book.dim() != config_.latent_dim)
    throw ShapeError("codebook dimension " + std::to_string(book.dim()) + " does not match latent_dim " +
                     std::to_string(config_.latent_dim));
  RestorationOutput out;
  auto enc = encode(degraded);
  out.bottleneck = enc.bottleneck;
  out.predicted = map(enc.bottleneck);
  auto q = quantize_nchw(out.predicted, book.vectors().to(degraded.scalar_type()));
  out.matched = q.quantized;
  out.indices = q.indices;
  const auto& rv = source == RvSource::Matched ? out.matched : out.predicted;
  out.restored = decode(degraded, enc, rv);
  return out;
}

std::vector<torch::Tensor> RestorationNetImpl::mapping_parameters() const { return mapping->parameters(); }

std::vector<torch::Tensor> RestorationNetImpl::non_mapping_parameters() const {
  std::vector<torch::Tensor> out;
  for (const auto& p : named_parameters())
    if (p.key().rfind("mapping.", 0) != 0) out.push_back(p.value());
  return out;
}

MappingLoss mapping_loss(const torch::Tensor& predicted, const torch::Tensor& target) {
  if (predicted.sizes() != target.sizes() || predicted.dim() != 4)
    throw ShapeError("mapping_loss expects matching [N, N_z, h, w] tensors");
  auto dot = (predicted * target).sum(1);
  auto np = predicted.pow(2).sum(1).sqrt();
  auto nt = target.pow(2).sum(1).sqrt();
  auto valid = (np > 0) & (nt > 0);
  auto denom = (np * nt).clamp_min(std::numeric_limits<double>::min());
  auto cos = torch::where(valid, dot / denom, torch::zeros_like(dot));
  MappingLoss out;
  out.value = (1.0 - cos).mean();
  out.zero_norm_cells = (~valid).sum().item<std::int64_t>();
  return out;
}

MappingOutput map_features(RestorationNet& net, const torch::Tensor& bottleneck, const Codebook& book) {
  if (book.dim() != net->config().latent_dim) throw ShapeError("codebook dimension does not match latent_dim");
  MappingOutput out;
  out.predicted = net->map(bottleneck);
  auto q = quantize_nchw(out.predicted, book.vectors().to(out.predicted.scalar_type()));
  out.matched = {q.indices, q.quantized};
  return out;
}

Image restore(RestorationNet& net, const Image& degraded, const Codebook& book) {
  torch::NoGradGuard guard;
  const auto dtype = net->parameters().front().scalar_type();
  auto out = net->forward(degraded.chw(dtype).unsqueeze(0), book);
  return Image::from_chw(out.restored[0]);
}

}  // namespace rahc
