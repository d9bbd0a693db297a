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

#include "rahc/losses.hpp"

#include <algorithm>
#include <cmath>

#include "rahc/error.hpp"

namespace rahc {

namespace nn = torch::nn;

WeatherLabel label_of(WeatherCode code) {
  WeatherLabel t{};
  const auto l = code.label();
  std::copy(l.begin(), l.end(), t.begin());
  return t;
}

namespace {
double clamp_p(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }
}  // namespace

double loss_discriminator(const DiscriminatorOutput& p, const WeatherLabel& t) {
  double sum = 0.0;
  for (int i = 0; i < kNumWeathers; ++i) {
    const double pi = clamp_p(p[i]);
    sum += -t[i] * std::log(pi) - (1.0 - t[i]) * std::log(1.0 - pi);
  }
  return sum;
}

double loss_restoration_dis(const DiscriminatorOutput& p) {
  double sum = 0.0;
  for (int i = 0; i < kNumWeathers; ++i) sum += -std::log(1.0 - clamp_p(p[i]));
  return sum;
}

torch::Tensor loss_discriminator(const torch::Tensor& p, const torch::Tensor& t) {
  if (p.dim() != 2 || p.size(1) != kNumWeathers || p.sizes() != t.sizes())
    throw ShapeError("discriminator loss expects matching [N, 5] tensors");
  auto pc = p.clamp(kProbEps, 1.0 - kProbEps);
  return (-t * pc.log() - (1.0 - t) * (1.0 - pc).log()).sum(1).mean();
}

torch::Tensor loss_restoration_dis(const torch::Tensor& p) {
  if (p.dim() != 2 || p.size(1) != kNumWeathers) throw ShapeError("expected [N, 5] probabilities");
  return (-(1.0 - p.clamp(kProbEps, 1.0 - kProbEps)).log()).sum(1).mean();
}

PerceptualExtractorImpl::PerceptualExtractorImpl(std::uint64_t seed, std::int64_t in_channels) {
  stage1 = register_module("stage1", nn::Conv2d(nn::Conv2dOptions(in_channels, 16, 3).padding(1)));
  stage2 = register_module("stage2", nn::Conv2d(nn::Conv2dOptions(16, 32, 3).stride(2).padding(1)));
  stage3 = register_module("stage3", nn::Conv2d(nn::Conv2dOptions(32, 64, 3).stride(2).padding(1)));
  torch::NoGradGuard guard;
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  for (auto* conv : {&stage1, &stage2, &stage3}) {
    auto& w = (*conv)->weight;
    const double fan_in = static_cast<double>(w.size(1) * w.size(2) * w.size(3));
    w.copy_(torch::randn(w.sizes(), gen, torch::kFloat32) * std::sqrt(2.0 / fan_in));
    (*conv)->bias.zero_();
  }
  for (auto& p : parameters()) p.set_requires_grad(false);
}

std::vector<torch::Tensor> PerceptualExtractorImpl::forward(const torch::Tensor& x) {
  auto f1 = torch::relu(stage1(x));
  auto f2 = torch::relu(stage2(f1));
  auto f3 = torch::relu(stage3(f2));
  return {f1, f2, f3};
}

torch::Tensor perceptual_loss(PerceptualExtractor& extractor, const torch::Tensor& restored,
                              const torch::Tensor& clean) {
  if (restored.sizes() != clean.sizes()) throw ShapeError("perceptual loss inputs differ in shape");
  const auto fr = extractor->forward(restored);
  const auto fc = extractor->forward(clean);
  auto total = torch::zeros({}, restored.options());
  for (std::size_t s = 0; s < fr.size(); ++s) total = total + (fr[s] - fc[s]).pow(2).mean();
  return total;
}

RestorationLoss total_restoration_loss(const torch::Tensor& restored, const torch::Tensor& clean,
                                       const torch::Tensor& p, double lambda_dis,
                                       PerceptualExtractor* extractor) {
  if (restored.sizes() != clean.sizes()) throw ShapeError("restored and clean differ in shape");
  RestorationLoss out;
  auto l1 = (restored - clean).abs().mean();
  auto dis = loss_restoration_dis(p);
  auto per = extractor ? perceptual_loss(*extractor, restored, clean) : torch::zeros({}, restored.options());
  out.total = l1 + lambda_dis * dis + per;
  out.report.l1 = l1.item<double>();
  out.report.dis = dis.item<double>();
  out.report.per = per.item<double>();
  out.report.lambda_dis = lambda_dis;
  out.report.total = out.total.item<double>();
  return out;
}

}  // namespace rahc
