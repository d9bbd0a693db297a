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

#include <memory>
#include <optional>

#include "rahc/image.hpp"
#include "rahc/losses.hpp"
#include "rahc/network.hpp"
#include "rahc/vq.hpp"

namespace rahc {

/// Multilabel weather classifier: four strided 3x3 conv blocks, global
/// average pooling and a linear layer producing five logits.
class WeatherDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit WeatherDiscriminatorImpl(std::int64_t in_channels = 3, std::int64_t width = 32);
  torch::Tensor logits(const torch::Tensor& x);
  /// Sigmoid probabilities, [N, 5].
  torch::Tensor forward(const torch::Tensor& x) { return torch::sigmoid(logits(x)); }

  torch::nn::Sequential trunk{nullptr};
  torch::nn::Linear classifier{nullptr};
};
TORCH_MODULE(WeatherDiscriminator);

DiscriminatorOutput discriminator_forward(const Image& img, WeatherDiscriminator& disc);

/// Where the discriminator looks: the restored image, or the encoder's
/// bottleneck features.
enum class DiscriminationMode { OutputSpace, FeatureLevel };

/// NCHW batch with multilabel targets and the mapping-network target
/// (the codebook-quantised encoding of the clean images).
struct TrainBatch {
  torch::Tensor degraded;
  torch::Tensor clean;
  torch::Tensor labels;     // [N, 5]
  torch::Tensor rv_target;  // [N, N_z, H/8, W/8]
};

struct RahcModels {
  RestorationNet net{nullptr};
  WeatherDiscriminator disc{nullptr};
  /// Null disables the perceptual term.
  PerceptualExtractor extractor{nullptr};
  Codebook book;
};

struct RahcOptimizers {
  std::unique_ptr<torch::optim::Adam> warmup;      // mapping network only
  std::unique_ptr<torch::optim::Adam> restorer;    // whole restoration network
  std::unique_ptr<torch::optim::Adam> discriminator;
};

RahcOptimizers make_optimizers(RahcModels& models, double lr, double beta1, double beta2);
void set_learning_rate(torch::optim::Adam& opt, double lr);

struct StepResult {
  LossReport report;
  double disc_loss = 0.0;
};

/// One discriminator update on detached restorer outputs, then one
/// restorer update on L1 + lambda_dis * L_dis + L_per + L_map. With
/// `clean_reference` the discriminator batch also holds the clean images
/// (or their encoder features) labelled 00000.
StepResult adversarial_step(const TrainBatch& batch, RahcModels& models, RahcOptimizers& opts,
                            DiscriminationMode mode, double lambda_dis, long step = 0,
                            bool clean_reference = true);

/// Restorer update on L1 + L_per + L_map only; no discriminator involved.
StepResult plain_step(const TrainBatch& batch, RahcModels& models, RahcOptimizers& opts, long step = 0);

/// Mapping-network-only update on the cosine mapping loss; the encoder is
/// treated as fixed. Returns the loss value.
double warmup_step(const TrainBatch& batch, RahcModels& models, RahcOptimizers& opts, long step = 0);

/// Gradient norm reaching the restorer from the discrimination term alone.
double dis_gradient_norm(const TrainBatch& batch, RahcModels& models, DiscriminationMode mode);

/// Multilabel targets for a list of codes, [N, 5].
torch::Tensor labels_tensor(const std::vector<WeatherCode>& codes, torch::Dtype dtype = torch::kFloat32);

}  // namespace rahc
