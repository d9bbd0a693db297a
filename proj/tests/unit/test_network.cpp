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

#include "../common/test.hpp"

#include "../common/checks.hpp"
#include "rahc/error.hpp"
#include "rahc/network.hpp"

using namespace rahc;
using namespace rahc::testing;

TEST_SUITE("network") {
  TEST_CASE("pixel unshuffle layout") {
    auto x = torch::arange(2 * 4 * 6, torch::kFloat32).view({1, 2, 4, 6});
    const auto u = rahc::pixel_unshuffle(x, 2);
    REQUIRE(u.sizes() == torch::IntArrayRef{1, 8, 2, 3});
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int h = 0; h < 2; ++h)
            for (int w = 0; w < 3; ++w)
              CHECK(u[0][c * 4 + i * 2 + j][h][w].item<float>() == x[0][c][h * 2 + i][w * 2 + j].item<float>());
  }

  TEST_CASE("pixel shuffle inverts unshuffle exactly") {
    torch::manual_seed(2);
    for (int r : {2, 4}) {
      const auto x = torch::randn({2, 3, 8, 16});
      CHECK(rahc::pixel_shuffle(rahc::pixel_unshuffle(x, r), r).equal(x));
      const auto y = torch::randn({1, 3 * r * r, 2, 3});
      CHECK(rahc::pixel_unshuffle(rahc::pixel_shuffle(y, r), r).equal(y));
    }
    CHECK_THROWS_AS(rahc::pixel_unshuffle(torch::zeros({1, 1, 5, 4}), 2), ShapeError);
    CHECK_THROWS_AS(rahc::pixel_shuffle(torch::zeros({1, 3, 2, 2}), 2), ShapeError);
  }

  TEST_CASE("blocks preserve shape") {
    torch::manual_seed(3);
    ConvAttentionModule cam(8, 2);
    MultiHeadBlendBlock mhbb(16, 4, 2);
    DualPathFFN ffn(6);
    CHECK(cam->forward(torch::randn({2, 8, 8, 8})).sizes() == torch::IntArrayRef{2, 8, 8, 8});
    CHECK(cam->token_count(8, 8) == 16);
    CHECK(cam->token_count(5, 3) == 6);
    CHECK(cam->forward(torch::randn({1, 8, 5, 3})).sizes() == torch::IntArrayRef{1, 8, 5, 3});
    CHECK(mhbb->forward(torch::randn({1, 16, 4, 8})).sizes() == torch::IntArrayRef{1, 16, 4, 8});
    CHECK(mhbb->heads() == 4);
    CHECK(ffn->forward(torch::randn({1, 6, 4, 4})).sizes() == torch::IntArrayRef{1, 6, 4, 4});
    CHECK_THROWS(MultiHeadBlendBlock(10, 4, 2));
  }

  TEST_CASE("layer norm normalises across channels") {
    LayerNorm2d ln(6);
    const auto y = ln->forward(torch::randn({2, 6, 3, 3}) * 5 + 2);
    CHECK(y.mean(1).abs().max().item<float>() < 1e-5f);
    CHECK((y.var(1, false) - 1).abs().max().item<float>() < 1e-3f);
  }

  TEST_CASE("finite-difference gradients") {
    CHECK(check_cam().rel_error < 1e-4);
    CHECK(check_mhbb().rel_error < 1e-4);
    CHECK(check_dpffn().rel_error < 1e-4);
    CHECK(check_mapping_loss().rel_error < 1e-4);
    CHECK(check_end_to_end().rel_error < 1e-3);
  }

  TEST_CASE("mapping loss values") {
    const auto t = torch::randn({1, 4, 2, 2});
    CHECK(mapping_loss(t, t).value.item<float>() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(mapping_loss(-t, t).value.item<float>() == doctest::Approx(2.0).epsilon(1e-6));
    auto z = t.clone();
    z.select(2, 0).select(2, 0).zero_();
    const auto m = mapping_loss(z, t);
    CHECK(m.zero_norm_cells == 1);
    CHECK(m.value.item<float>() == doctest::Approx(0.25).epsilon(1e-6));
    CHECK_THROWS_AS(mapping_loss(torch::randn({1, 4, 2, 2}), torch::randn({1, 5, 2, 2})), ShapeError);
  }

  TEST_CASE("restoration network shapes and parameter groups") {
    torch::manual_seed(4);
    auto cfg = gradcheck_network();
    RestorationNet net(cfg);
    const Codebook book(torch::randn({16, 8}));
    const auto out = net->forward(torch::rand({2, 3, 32, 24}), book);
    CHECK(out.restored.sizes() == torch::IntArrayRef{2, 3, 32, 24});
    CHECK(out.predicted.sizes() == torch::IntArrayRef{2, 8, 4, 3});
    CHECK(out.matched.sizes() == torch::IntArrayRef{2, 8, 4, 3});
    CHECK(out.indices.sizes() == torch::IntArrayRef{2, 4, 3});
    CHECK(out.bottleneck.size(1) == 8 * cfg.base_channels);
    CHECK_FALSE(out.matched.requires_grad());
    CHECK(net->mapping_parameters().size() + net->non_mapping_parameters().size() == net->parameters().size());
    CHECK_THROWS_AS(net->forward(torch::rand({1, 3, 32, 24}), Codebook(torch::randn({16, 5}))), ShapeError);
    const auto img = Image(torch::rand({16, 16, 3}));
    const auto r = restore(net, img, book);
    CHECK(r.height() == 16);
  }

  TEST_CASE("config validation") {
    auto c = NetworkConfig::tiny();
    CHECK_NOTHROW(c.validate());
    CHECK(c.base_channels == 8);
    c.block_counts[2] = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
}
