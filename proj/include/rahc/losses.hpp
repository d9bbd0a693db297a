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

#include "rahc/weather.hpp"

namespace rahc {

/// Probability clamp applied before every logarithm.
inline constexpr double kProbEps = 1e-7;

/// Per-weather detection probabilities, ordered like WeatherCode.
using DiscriminatorOutput = std::array<double, kNumWeathers>;
/// Multilabel targets t_i in {0, 1}.
using WeatherLabel = std::array<double, kNumWeathers>;

WeatherLabel label_of(WeatherCode code);

/// sum_i -t_i log p_i - (1 - t_i) log(1 - p_i)
double loss_discriminator(const DiscriminatorOutput& p, const WeatherLabel& t);
/// sum_i -log(1 - p_i) over the five classes.
double loss_restoration_dis(const DiscriminatorOutput& p);

// Tensor forms. `p` is [N, 5]; results are means over the batch of the
// per-sample sums above.
torch::Tensor loss_discriminator(const torch::Tensor& p, const torch::Tensor& t);
torch::Tensor loss_restoration_dis(const torch::Tensor& p);

/// Frozen, seed-fixed three-stage convolutional feature pyramid.
class PerceptualExtractorImpl : public torch::nn::Module {
 public:
  explicit PerceptualExtractorImpl(std::uint64_t seed, std::int64_t in_channels = 3);
  std::vector<torch::Tensor> forward(const torch::Tensor& x);

  torch::nn::Conv2d stage1{nullptr}, stage2{nullptr}, stage3{nullptr};
};
TORCH_MODULE(PerceptualExtractor);

/// Sum over the three stages of the mean squared feature difference.
torch::Tensor perceptual_loss(PerceptualExtractor& extractor, const torch::Tensor& restored,
                              const torch::Tensor& clean);

struct LossReport {
  double l1 = 0, dis = 0, per = 0, map = 0, total = 0, lambda_dis = 0.1;
};

/// Restorer objective: total = L1 + lambda_dis * L_dis + L_per. The tensor
/// `total` keeps the graph; `report` holds detached values. A null
/// extractor disables the perceptual term.
struct RestorationLoss {
  torch::Tensor total;
  LossReport report;
};
RestorationLoss total_restoration_loss(const torch::Tensor& restored, const torch::Tensor& clean,
                                       const torch::Tensor& p, double lambda_dis,
                                       PerceptualExtractor* extractor);

}  // namespace rahc
