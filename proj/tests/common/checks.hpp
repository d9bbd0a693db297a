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

// Finite-difference checks shared by the unit tests and the acceptance run.

#include <torch/torch.h>

#include "gradcheck.hpp"
#include "rahc/network.hpp"

namespace rahc::testing {

inline std::vector<torch::Tensor> with_params(torch::Tensor x, const torch::nn::Module& m) {
  std::vector<torch::Tensor> leaves{x};
  for (const auto& p : m.parameters()) leaves.push_back(p);
  return leaves;
}

inline torch::Tensor rand64(torch::IntArrayRef shape, bool grad = true) {
  return torch::randn(shape, torch::TensorOptions().dtype(torch::kFloat64).requires_grad(grad));
}

inline GradCheckResult check_cam() {
  torch::manual_seed(11);
  ConvAttentionModule cam(4, 2);
  cam->to(torch::kFloat64);
  auto x = rand64({1, 4, 4, 4});
  const auto w = rand64({1, 4, 4, 4}, false);
  return gradcheck([&] { return (cam->forward(x) * w).sum(); }, with_params(x, *cam), 6, 1);
}

inline GradCheckResult check_mhbb() {
  torch::manual_seed(12);
  MultiHeadBlendBlock block(8, 2, 2);
  block->to(torch::kFloat64);
  auto x = rand64({1, 8, 4, 4});
  const auto w = rand64({1, 8, 4, 4}, false);
  return gradcheck([&] { return (block->forward(x) * w).sum(); }, with_params(x, *block), 4, 2);
}

inline GradCheckResult check_dpffn() {
  torch::manual_seed(13);
  DualPathFFN ffn(4, 2);
  ffn->to(torch::kFloat64);
  auto x = rand64({1, 4, 4, 8});
  const auto w = rand64({1, 4, 4, 8}, false);
  return gradcheck([&] { return (ffn->forward(x) * w).sum(); }, with_params(x, *ffn), 6, 3);
}

inline GradCheckResult check_mapping_loss() {
  torch::manual_seed(14);
  auto p = rand64({2, 8, 2, 2});
  const auto t = rand64({2, 8, 2, 2}, false);
  return gradcheck([&] { return mapping_loss(p, t).value; }, {p}, 64, 4);
}

inline NetworkConfig gradcheck_network() {
  NetworkConfig c;
  c.base_channels = 4;
  c.block_counts = {1, 1, 1, 1, 1, 1, 1, 1};
  c.latent_dim = 8;
  c.mapping_blocks = 1;
  return c;
}

// L1(restore(D), C) on a 16x16 image with a tiny network in float64.
inline GradCheckResult check_end_to_end() {
  torch::manual_seed(15);
  RestorationNet net(gradcheck_network());
  net->to(torch::kFloat64);
  const Codebook book(torch::randn({16, 8}, torch::kFloat64));
  auto d = torch::rand({1, 3, 16, 16}, torch::TensorOptions().dtype(torch::kFloat64).requires_grad(true));
  const auto c = torch::rand({1, 3, 16, 16}, torch::kFloat64);
  auto loss = [&] { return (net->forward(d, book).restored - c).abs().mean(); };
  return gradcheck(loss, with_params(d, *net), 2, 5);
}

}  // namespace rahc::testing
