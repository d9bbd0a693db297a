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

#include "rahc/vq.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rahc/archive.hpp"
#include "rahc/error.hpp"
#include "rahc/network.hpp"
#include "rahc/seed.hpp"

namespace rahc {

namespace nn = torch::nn;

Codebook::Codebook(torch::Tensor vectors) {
  if (!vectors.defined() || vectors.dim() != 2) throw ShapeError("codebook must be a [K, N_z] tensor");
  if (vectors.size(0) < 2) throw ParamError("codebook needs at least two vectors");
  if (!torch::isfinite(vectors).all().item<bool>()) throw ParamError("codebook has non-finite entries");
  vectors_ = vectors.detach().contiguous();
}

std::int64_t Codebook::duplicate_count() const {
  auto unique = std::get<0>(torch::unique_dim(vectors_, 0));
  return size() - unique.size(0);
}

torch::Tensor nearest_indices(const torch::Tensor& vectors, const torch::Tensor& book) {
  if (vectors.dim() != 2 || book.dim() != 2) throw ShapeError("nearest_indices expects 2-D tensors");
  if (vectors.size(1) != book.size(1))
    throw ShapeError("latent dimension " + std::to_string(vectors.size(1)) +
                     " does not match codebook dimension " + std::to_string(book.size(1)));
  torch::NoGradGuard guard;
  const auto z = vectors.detach().to(torch::kFloat64).contiguous();
  if (!torch::isfinite(z).all().item<bool>()) throw ParamError("non-finite latent vectors");
  const auto q = book.detach().to(torch::kFloat64).contiguous();
  const auto m = z.size(0), k = q.size(0), d = z.size(1);
  auto out = torch::empty({m}, torch::kInt64);
  if (m == 0) return out;

  const auto zz = z.pow(2).sum(1, true);
  const auto qq = q.pow(2).sum(1);
  const auto approx = zz + qq.unsqueeze(0) - 2.0 * z.mm(q.t());
  const auto row_min = std::get<0>(approx.min(1, true));
  // The expanded form carries O(d * eps * scale) rounding error; anything
  // within this margin of the minimum is rechecked exactly.
  const auto margin = 1e-9 * (zz + qq.max()) + 1e-300;
  const auto candidates = (approx <= row_min + margin).contiguous();

  const double* zp = z.data_ptr<double>();
  const double* qp = q.data_ptr<double>();
  const bool* cp = candidates.data_ptr<bool>();
  auto* op = out.data_ptr<std::int64_t>();
  for (std::int64_t i = 0; i < m; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_k = -1;
    for (std::int64_t j = 0; j < k; ++j) {
      if (!cp[i * k + j]) continue;
      double dist = 0.0;
      for (std::int64_t c = 0; c < d; ++c) {
        const double diff = zp[i * d + c] - qp[j * d + c];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        best_k = j;
      }
    }
    op[i] = best_k;
  }
  return out;
}

QuantizedGrid quantize(const LatentGrid& grid, const Codebook& book) {
  const auto& z = grid.latents;
  if (!z.defined() || z.dim() != 3) throw ShapeError("latent grid must be [h, w, N_z]");
  if (z.size(2) != book.dim())
    throw ShapeError("latent dimension " + std::to_string(z.size(2)) +
                     " does not match codebook dimension " + std::to_string(book.dim()));
  const auto flat = z.reshape({-1, z.size(2)});
  auto idx = nearest_indices(flat, book.vectors());
  auto q = book.vectors().index_select(0, idx).view(z.sizes()).to(z.scalar_type());
  return {idx.view({z.size(0), z.size(1)}), q};
}

BatchQuantized quantize_nchw(const torch::Tensor& latents, const torch::Tensor& book) {
  if (latents.dim() != 4) throw ShapeError("expected [N, N_z, h, w] latents");
  const auto n = latents.size(0), c = latents.size(1), h = latents.size(2), w = latents.size(3);
  const auto flat = latents.detach().permute({0, 2, 3, 1}).reshape({-1, c});
  auto idx = nearest_indices(flat, book);
  auto q = book.detach().index_select(0, idx).view({n, h, w, c}).permute({0, 3, 1, 2}).contiguous();
  return {idx.view({n, h, w}), q.to(latents.scalar_type())};
}

torch::Tensor straight_through(const torch::Tensor& z, const torch::Tensor& q) {
  return z + (q - z).detach();
}

double codebook_perplexity(const torch::Tensor& indices, std::int64_t codebook_size) {
  auto counts = torch::bincount(indices.flatten(), {}, codebook_size).to(torch::kFloat64);
  auto p = counts / counts.sum();
  auto nz = p.masked_select(p > 0);
  return std::exp(-(nz * nz.log()).sum().item<double>());
}

namespace {

class ResBlockImpl : public nn::Module {
 public:
  explicit ResBlockImpl(std::int64_t c) {
    conv1 = register_module("conv1", nn::Conv2d(nn::Conv2dOptions(c, c, 3).padding(1)));
    conv2 = register_module("conv2", nn::Conv2d(nn::Conv2dOptions(c, c, 3).padding(1)));
  }
  torch::Tensor forward(const torch::Tensor& x) {
    return x + conv2(torch::silu(conv1(torch::silu(x))));
  }
  nn::Conv2d conv1{nullptr}, conv2{nullptr};
};
TORCH_MODULE(ResBlock);

class ShuffleUpImpl : public nn::Module {
 public:
  ShuffleUpImpl(std::int64_t in, std::int64_t out) {
    conv = register_module("conv", nn::Conv2d(nn::Conv2dOptions(in, out * 4, 3).padding(1)));
  }
  torch::Tensor forward(const torch::Tensor& x) { return rahc::pixel_shuffle(conv(x), 2); }
  nn::Conv2d conv{nullptr};
};
TORCH_MODULE(ShuffleUp);

nn::Conv2d conv(std::int64_t in, std::int64_t out, std::int64_t k, std::int64_t stride = 1) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, k).stride(stride).padding(k / 2));
}

}  // namespace

VqAutoencoderImpl::VqAutoencoderImpl(const VqConfig& config) {
  if (config.codebook_size < 2) throw ConfigError("codebook_size must be >= 2");
  const auto c = config.base_channels;
  encoder = register_module(
      "encoder",
      nn::Sequential(conv(3, c, 3), nn::SiLU(), conv(c, 2 * c, 3, 2), nn::SiLU(), conv(2 * c, 4 * c, 3, 2),
                     nn::SiLU(), conv(4 * c, 8 * c, 3, 2), ResBlock(8 * c), nn::SiLU(),
                     conv(8 * c, config.latent_dim, 1)));
  decoder = register_module(
      "decoder",
      nn::Sequential(conv(config.latent_dim, 8 * c, 1), ResBlock(8 * c), nn::SiLU(), ShuffleUp(8 * c, 4 * c),
                     nn::SiLU(), ShuffleUp(4 * c, 2 * c), nn::SiLU(), ShuffleUp(2 * c, c), nn::SiLU(),
                     conv(c, 3, 3)));
  codebook_ = register_parameter(
      "codebook", torch::empty({config.codebook_size, config.latent_dim})
                      .uniform_(-1.0 / config.codebook_size, 1.0 / config.codebook_size));
}

torch::Tensor VqAutoencoderImpl::encode(const torch::Tensor& images) {
  if (images.dim() != 4 || images.size(2) % kDownsample || images.size(3) % kDownsample)
    throw ShapeError("VQ encoder input sides must be multiples of 8");
  return encoder->forward(images);
}

torch::Tensor VqAutoencoderImpl::decode(const torch::Tensor& latents) { return decoder->forward(latents); }

LatentGrid vq_encode(const Image& img, VqAutoencoder& model) {
  torch::NoGradGuard guard;
  auto z = model->encode(img.chw().unsqueeze(0));
  return {z[0].permute({1, 2, 0}).contiguous()};
}

Image vq_decode(const QuantizedGrid& grid, VqAutoencoder& model) {
  if (!grid.quantized.defined() || grid.quantized.dim() != 3) throw ShapeError("quantized grid must be [h, w, N_z]");
  torch::NoGradGuard guard;
  auto x = model->decode(grid.quantized.permute({2, 0, 1}).unsqueeze(0).to(torch::kFloat32));
  return Image::from_chw(x[0]);
}

Image vq_reconstruct(const Image& img, VqAutoencoder& model) {
  return vq_decode(quantize(vq_encode(img, model), model->codebook()), model);
}

VqTrainResult train_vq(const std::vector<Image>& cleans, const VqConfig& config) {
  if (cleans.size() < 16) throw ParamError("train_vq needs at least 16 clean images");
  if (config.batch_size < 1 || config.steps < 1) throw ConfigError("VQ batch_size and steps must be >= 1");
  torch::manual_seed(derive_seed(config.seed, "vq_init"));
  VqTrainResult result;
  result.model = VqAutoencoder(config);
  auto& model = result.model;
  const auto data = to_batch(cleans);
  const auto n = data.size(0);
  const auto k = config.codebook_size;
  torch::optim::Adam opt(model->parameters(), torch::optim::AdamOptions(config.learning_rate));

  // Data-dependent start: codebook rows drawn from encoder outputs.
  {
    torch::NoGradGuard guard;
    auto gen = at::make_generator<at::CPUGeneratorImpl>(derive_seed(config.seed, "vq_codebook_init"));
    auto z = model->encode(data).permute({0, 2, 3, 1}).reshape({-1, config.latent_dim});
    auto pick = torch::randint(z.size(0), {k}, gen, torch::kInt64);
    model->codebook_.copy_(z.index_select(0, pick) +
                           1e-3 * torch::randn({k, config.latent_dim}, gen, torch::kFloat32));
  }

  const auto batch = std::min<std::int64_t>(config.batch_size, n);
  const auto steps_per_epoch = (n + batch - 1) / batch;
  auto usage = torch::zeros({k}, torch::kInt64);
  torch::Tensor perm;
  for (int step = 0; step < config.steps; ++step) {
    const auto epoch = step / steps_per_epoch, pos = step % steps_per_epoch;
    if (pos == 0) {
      auto gen = at::make_generator<at::CPUGeneratorImpl>(derive_seed(config.seed, "vq_epoch", epoch));
      perm = torch::randperm(n, gen, torch::kInt64);
    }
    const auto idx = perm.slice(0, pos * batch, std::min(n, (pos + 1) * batch));
    const auto x = data.index_select(0, idx);
    auto z = model->encode(x);
    const auto bn = z.size(0), h = z.size(2), w = z.size(3);
    auto bq = quantize_nchw(z, model->codebook_);
    auto q = model->codebook_.index_select(0, bq.indices.flatten())
                 .view({bn, h, w, config.latent_dim})
                 .permute({0, 3, 1, 2});
    auto recon = model->decode(straight_through(z, q));
    auto rec_loss = torch::mse_loss(recon, x);
    auto loss = rec_loss + torch::mse_loss(q, z.detach()) + config.commitment * torch::mse_loss(z, q.detach());
    const double loss_v = loss.item<double>();
    if (!std::isfinite(loss_v)) throw DivergenceError(step, "non-finite VQ loss");
    opt.zero_grad();
    loss.backward();
    opt.step();

    usage.index_add_(0, bq.indices.flatten(), torch::ones({bq.indices.numel()}, torch::kInt64));
    result.log.loss.push_back(loss_v);
    result.log.recon.push_back(rec_loss.item<double>());
    result.log.perplexity.push_back(codebook_perplexity(bq.indices, k));

    if (pos == steps_per_epoch - 1) {
      torch::NoGradGuard guard;
      auto dead = (usage == 0).nonzero().flatten();
      if (dead.numel() > 0) {
        auto gen = at::make_generator<at::CPUGeneratorImpl>(derive_seed(config.seed, "vq_reseed", epoch));
        auto flat = z.detach().permute({0, 2, 3, 1}).reshape({-1, config.latent_dim});
        auto pick = torch::randint(flat.size(0), {dead.numel()}, gen, torch::kInt64);
        model->codebook_.index_copy_(0, dead, flat.index_select(0, pick));
        result.log.reseeded += dead.numel();
      }
      usage.zero_();
      if (config.target_psnr > 0.0) {
        auto full = model->decode(quantize_nchw(model->encode(data), model->codebook_).quantized).clamp(0, 1);
        const double mse = torch::mse_loss(full, data).item<double>();
        if (mse > 0 && 10.0 * std::log10(1.0 / mse) >= config.target_psnr) break;
      }
    }
  }
  model->eval();
  result.book = model->codebook();
  return result;
}

void save_vq(const std::filesystem::path& path, VqAutoencoder& model, const VqConfig& config) {
  TensorArchive a;
  a.meta["kind"] = "vq";
  a.meta["codebook_size"] = config.codebook_size;
  a.meta["latent_dim"] = config.latent_dim;
  a.meta["base_channels"] = config.base_channels;
  put_module(a, "model", *model);
  save_archive(path, a);
}

VqAutoencoder load_vq(const std::filesystem::path& path, VqConfig* config_out) {
  const auto a = load_archive(path);
  if (a.meta.value("kind", "") != "vq") throw IoError(path.string(), "not a VQ checkpoint");
  VqConfig config;
  config.codebook_size = a.meta.at("codebook_size").get<std::int64_t>();
  config.latent_dim = a.meta.at("latent_dim").get<std::int64_t>();
  config.base_channels = a.meta.at("base_channels").get<std::int64_t>();
  VqAutoencoder model(config);
  get_module(a, "model", *model);
  model->eval();
  if (config_out) *config_out = config;
  return model;
}

void export_codebook(const std::filesystem::path& path, const Codebook& book) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  const auto v = book.vectors().to(torch::kFloat32).contiguous();
  out.write(static_cast<const char*>(v.data_ptr()), v.numel() * 4);
  if (!out) throw IoError(path.string(), "write failed");
}

Codebook import_codebook(const std::filesystem::path& path, std::int64_t dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open codebook");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto bytes = buf.str();
  if (dim <= 0 || bytes.size() % (4 * dim) != 0) throw IoError(path.string(), "size is not a multiple of N_z floats");
  const auto k = static_cast<std::int64_t>(bytes.size() / (4 * dim));
  auto t = torch::empty({k, dim}, torch::kFloat32);
  std::memcpy(t.data_ptr(), bytes.data(), bytes.size());
  return Codebook(t);
}

}  // namespace rahc
