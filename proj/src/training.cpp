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

#include "rahc/training.hpp"

#include <cmath>

#include "rahc/error.hpp"

namespace rahc {

namespace nn = torch::nn;

WeatherDiscriminatorImpl::WeatherDiscriminatorImpl(std::int64_t in_channels, std::int64_t width) {
  auto block = [](std::int64_t in, std::int64_t out) {
    return nn::Conv2d(nn::Conv2dOptions(in, out, 3).stride(2).padding(1));
  };
  auto act = [] { return nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)); };
  trunk = register_module("trunk", nn::Sequential(block(in_channels, width), act(), block(width, 2 * width), act(),
                                                  block(2 * width, 4 * width), act(),
                                                  block(4 * width, 4 * width), act()));
  classifier = register_module("classifier", nn::Linear(4 * width, kNumWeathers));
}

torch::Tensor WeatherDiscriminatorImpl::logits(const torch::Tensor& x) {
  return classifier(trunk->forward(x).mean({2, 3}));
}

DiscriminatorOutput discriminator_forward(const Image& img, WeatherDiscriminator& disc) {
  torch::NoGradGuard guard;
  const auto dtype = disc->parameters().front().scalar_type();
  auto p = disc->forward(img.chw(dtype).unsqueeze(0))[0].to(torch::kFloat64);
  DiscriminatorOutput out{};
  for (int i = 0; i < kNumWeathers; ++i) out[i] = p[i].item<double>();
  return out;
}

torch::Tensor labels_tensor(const std::vector<WeatherCode>& codes, torch::Dtype dtype) {
  auto t = torch::empty({static_cast<std::int64_t>(codes.size()), kNumWeathers}, torch::kFloat32);
  for (std::size_t n = 0; n < codes.size(); ++n) {
    const auto l = codes[n].label();
    for (int i = 0; i < kNumWeathers; ++i) t[n][i] = l[i];
  }
  return t.to(dtype);
}

RahcOptimizers make_optimizers(RahcModels& models, double lr, double beta1, double beta2) {
  auto opts = torch::optim::AdamOptions(lr).betas({beta1, beta2});
  RahcOptimizers o;
  o.warmup = std::make_unique<torch::optim::Adam>(models.net->mapping_parameters(), opts);
  o.restorer = std::make_unique<torch::optim::Adam>(models.net->parameters(), opts);
  o.discriminator = std::make_unique<torch::optim::Adam>(models.disc->parameters(), opts);
  return o;
}

void set_learning_rate(torch::optim::Adam& opt, double lr) {
  for (auto& group : opt.param_groups()) static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
}

namespace {
void check_finite(double v, long step, const char* what) {
  if (!std::isfinite(v)) throw DivergenceError(step, std::string("non-finite ") + what);
}

RestorationOutput forward_checked(RahcModels& models, const torch::Tensor& degraded, long step) {
  try {
    return models.net->forward(degraded, models.book);
  } catch (const ParamError& e) {
    throw DivergenceError(step, e.what());
  }
}

// The discriminator sees the restored image as an image, i.e. in [0, 1].
torch::Tensor disc_input(const RestorationOutput& out, DiscriminationMode mode) {
  return mode == DiscriminationMode::OutputSpace ? out.restored.clamp(0.0, 1.0) : out.bottleneck;
}
}  // namespace

StepResult adversarial_step(const TrainBatch& batch, RahcModels& models, RahcOptimizers& opts,
                            DiscriminationMode mode, double lambda_dis, long step, bool clean_reference) {
  StepResult result;
  auto out = forward_checked(models, batch.degraded, step);
  const auto seen = disc_input(out, mode);

  auto d_in = seen.detach();
  auto d_labels = batch.labels;
  if (clean_reference) {
    torch::Tensor ref;
    if (mode == DiscriminationMode::OutputSpace) {
      ref = batch.clean;
    } else {
      torch::NoGradGuard guard;
      ref = models.net->encode(batch.clean).bottleneck;
    }
    d_in = torch::cat({d_in, ref.detach()});
    d_labels = torch::cat({d_labels, torch::zeros_like(d_labels)});
  }
  auto d_loss = loss_discriminator(models.disc->forward(d_in), d_labels);
  result.disc_loss = d_loss.item<double>();
  check_finite(result.disc_loss, step, "discriminator loss");
  opts.discriminator->zero_grad();
  d_loss.backward();
  opts.discriminator->step();

  auto p = models.disc->forward(seen);
  auto extractor = models.extractor.is_empty() ? nullptr : &models.extractor;
  auto loss = total_restoration_loss(out.restored, batch.clean, p, lambda_dis, extractor);
  auto map = mapping_loss(out.predicted, batch.rv_target);
  result.report = loss.report;
  result.report.map = map.value.item<double>();
  check_finite(result.report.total + result.report.map, step, "restoration loss");
  opts.restorer->zero_grad();
  (loss.total + map.value).backward();
  opts.restorer->step();
  return result;
}

StepResult plain_step(const TrainBatch& batch, RahcModels& models, RahcOptimizers& opts, long step) {
  StepResult result;
  auto out = forward_checked(models, batch.degraded, step);
  auto l1 = (out.restored - batch.clean).abs().mean();
  auto per = models.extractor.is_empty() ? torch::zeros({}, l1.options())
                                         : perceptual_loss(models.extractor, out.restored, batch.clean);
  auto map = mapping_loss(out.predicted, batch.rv_target);
  auto total = l1 + per;
  result.report.l1 = l1.item<double>();
  result.report.per = per.item<double>();
  result.report.lambda_dis = 0.0;
  result.report.total = total.item<double>();
  result.report.map = map.value.item<double>();
  check_finite(result.report.total + result.report.map, step, "restoration loss");
  opts.restorer->zero_grad();
  (total + map.value).backward();
  opts.restorer->step();
  return result;
}

double warmup_step(const TrainBatch& batch, RahcModels& models, RahcOptimizers& opts, long step) {
  torch::Tensor bottleneck;
  {
    torch::NoGradGuard guard;
    bottleneck = models.net->encode(batch.degraded).bottleneck;
  }
  auto map = mapping_loss(models.net->map(bottleneck), batch.rv_target);
  const double v = map.value.item<double>();
  check_finite(v, step, "mapping loss");
  opts.warmup->zero_grad();
  map.value.backward();
  opts.warmup->step();
  return v;
}

double dis_gradient_norm(const TrainBatch& batch, RahcModels& models, DiscriminationMode mode) {
  models.net->zero_grad();
  auto out = models.net->forward(batch.degraded, models.book);
  loss_restoration_dis(models.disc->forward(disc_input(out, mode))).backward();
  double sq = 0.0;
  for (const auto& p : models.net->parameters())
    if (p.grad().defined()) sq += p.grad().pow(2).sum().item<double>();
  models.net->zero_grad();
  models.disc->zero_grad();
  return std::sqrt(sq);
}

}  // namespace rahc
