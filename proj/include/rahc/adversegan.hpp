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
#include <functional>
#include <vector>

#include "rahc/dataset.hpp"
#include "rahc/image.hpp"
#include "rahc/losses.hpp"
#include "rahc/seed.hpp"
#include "rahc/synthesis.hpp"
#include "rahc/weather.hpp"

namespace rahc {

struct GanWeights {
  double alpha = 1.0;
  double beta = 2.0;
  double lambda_cls = 3.0;
};

struct GanConfig {
  std::int64_t base_channels = 16;
  std::int64_t content_dim = 64;
  std::int64_t style_dim = 64;
  std::int64_t type_dim = 16;
  std::int64_t disc_width = 32;
  GanWeights weights;
  double learning_rate = 2e-4;
  int steps = 500;
  int batch_size = 8;
  std::int64_t image_size = 32;
  /// Clean scenes behind the paired sets and the real-style sets.
  int paired_scenes = 24;
  int real_scenes = 24;
  std::uint64_t seed = 0;
};

/// Content and style codes, [N, N_c] and [N, N_s], standard normal.
struct LatentCodes {
  torch::Tensor content;
  torch::Tensor style;
};
LatentCodes sample_latents(std::uint64_t seed, const GanConfig& config, std::int64_t batch = 1);

/// Encoder-decoder generator. The content code becomes a spatial map that is
/// concatenated with the image code and the embedded type vector at the
/// bottleneck; the style code modulates every decoder block with a learned
/// per-channel affine transform. The output composites a predicted colour
/// layer over the input: D = m * A + (1 - m) * C.
class AdverseGeneratorImpl : public torch::nn::Module {
 public:
  explicit AdverseGeneratorImpl(const GanConfig& config);

  /// images [N, 3, H, W]; types [N] (int64 in [0, 5)); codes as sampled.
  torch::Tensor forward(const torch::Tensor& images, const torch::Tensor& types, const LatentCodes& codes);

  bool trained() const { return trained_flag.item<std::int64_t>() != 0; }
  void mark_trained() { trained_flag.fill_(1); }
  std::int64_t forward_calls() const { return forward_calls_; }

  torch::nn::Sequential encoder{nullptr};
  torch::nn::Linear content_fc{nullptr};
  torch::nn::Embedding type_embed{nullptr};
  torch::nn::Conv2d fuse{nullptr}, up1{nullptr}, up2{nullptr}, out{nullptr};
  torch::nn::ModuleList blocks{nullptr}, styles{nullptr};
  torch::Tensor trained_flag;

 private:
  std::int64_t channels_, content_channels_;
  std::int64_t forward_calls_ = 0;
};
TORCH_MODULE(AdverseGenerator);

/// Shared trunk with a source head (sigmoid) and a 5-way type head (softmax).
class GanDiscriminatorImpl : public torch::nn::Module {
 public:
  GanDiscriminatorImpl(std::int64_t in_channels, std::int64_t width);
  struct Output {
    torch::Tensor src;  // [N]
    torch::Tensor cls;  // [N, 5]
  };
  Output forward(const torch::Tensor& x);

  std::int64_t in_channels() const { return in_channels_; }

  torch::nn::Sequential trunk{nullptr};
  torch::nn::Linear src_head{nullptr}, cls_head{nullptr};

 private:
  std::int64_t in_channels_;
};
TORCH_MODULE(GanDiscriminator);

/// (adversarial, real-classification, fake-classification) terms.
template <class T>
struct AdvTerms {
  T adv, cls_real, cls_fake;
};

template <class T>
struct GanTerms {
  AdvTerms<T> rd, pd;
};

template <class T>
struct GanObjectives {
  T generator, realism, pairing;
};

/// L_G  = a(-adv_rd + l cls_f_rd) + b(-adv_pd + l cls_f_pd)
/// L_RD = a(adv_rd + l cls_r_rd)
/// L_PD = b(adv_pd + l cls_r_pd)
template <class T>
GanObjectives<T> objectives(const GanTerms<T>& t, const GanWeights& w = {}) {
  return {w.alpha * (-t.rd.adv + w.lambda_cls * t.rd.cls_fake) +
              w.beta * (-t.pd.adv + w.lambda_cls * t.pd.cls_fake),
          w.alpha * (t.rd.adv + w.lambda_cls * t.rd.cls_real),
          w.beta * (t.pd.adv + w.lambda_cls * t.pd.cls_real)};
}

/// Batch means from discriminator probabilities:
///   adv      = log src_real + log(1 - src_fake)
///   cls_real = -log cls_real[true type]
///   cls_fake = -log cls_fake[requested type]
/// All probabilities are clamped to [eps, 1 - eps] first.
AdvTerms<torch::Tensor> adversarial_terms(const torch::Tensor& src_real, const torch::Tensor& src_fake,
                                          const torch::Tensor& cls_real, const torch::Tensor& real_types,
                                          const torch::Tensor& cls_fake, const torch::Tensor& fake_types);

/// Realism-discriminator terms: real-world image E with type t_hat against
/// generated D requested with type t.
AdvTerms<torch::Tensor> rd_losses(GanDiscriminator& rd, const torch::Tensor& real, const torch::Tensor& fake,
                                  const torch::Tensor& types, const torch::Tensor& real_types);
/// Pairing-discriminator terms on channel-concatenated (clean, degraded) pairs.
AdvTerms<torch::Tensor> pd_losses(GanDiscriminator& pd, const torch::Tensor& clean, const torch::Tensor& paired,
                                  const torch::Tensor& fake, const torch::Tensor& types,
                                  const torch::Tensor& real_types);

struct GanModels {
  AdverseGenerator generator{nullptr};
  GanDiscriminator realism{nullptr};
  GanDiscriminator pairing{nullptr};
};

GanModels make_gan(const GanConfig& config);

/// Single image generation D = G(C, t, z_c, z_s).
Image generate(AdverseGenerator& g, const Image& clean, Weather type, const LatentCodes& codes);

struct HybridStage {
  Weather weather;
  std::uint64_t seed;
};

struct HybridResult {
  Image image;
  std::vector<HybridStage> stages;
};

/// Recursive hybrid generation: one generator call per set bit in stage
/// order, fresh latent codes per stage (seeded from `seed`), and the type
/// vector reset between stages. Throws StateError for an untrained generator.
HybridResult gen_hybrid(AdverseGenerator& g, const Image& clean, WeatherCode code, RenderSeed seed,
                        const GanConfig& config);

/// Replays logged stages exactly.
Image regenerate(AdverseGenerator& g, const Image& clean, const std::vector<HybridStage>& stages,
                 const GanConfig& config);

/// Degrader that routes dataset construction through gen_hybrid and records
/// the per-stage seeds.
Degrader gan_degrader(AdverseGenerator& g, const GanConfig& config);

/// Per-type paired data (C, H) and unpaired real-style data (E, t_hat).
struct GanData {
  std::vector<std::vector<std::pair<Image, Image>>> paired;  // indexed by weather
  std::vector<std::vector<Image>> real;                      // indexed by weather
};

/// Builds the desk-scale training sets: paired sets from the standard
/// parameter ranges, real-style sets from the disjoint held-out ranges on
/// separate scenes.
GanData make_gan_data(const GanConfig& config, std::uint64_t seed);

struct GanLogRow {
  int step;
  double generator, realism, pairing;
};

struct GanTrainResult {
  GanModels models;
  std::vector<GanLogRow> log;
};

/// Alternating RD, PD and G updates with per-sample type resampling so all
/// five types are drawn equally often. Throws DivergenceError on a
/// non-finite objective.
GanTrainResult train_adversegan(const GanData& data, const GanConfig& config);

/// Realism-discriminator type accuracy on fresh held-out real-style samples.
double realism_type_accuracy(GanDiscriminator& rd, const GanConfig& config, std::uint64_t seed, int per_type);

void save_gan(const std::filesystem::path& path, GanModels& models, const GanConfig& config);
GanModels load_gan(const std::filesystem::path& path, GanConfig* config = nullptr);

/// Tiles generations for a style sweep (columns) at several content codes
/// (rows), interpolating linearly between two seeded codes.
Image interpolation_grid(AdverseGenerator& g, const Image& clean, Weather type, std::uint64_t seed,
                         const GanConfig& config, int steps = 5);

}  // namespace rahc
