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

#include <cmath>

#include "../common/checks.hpp"
#include "rahc/error.hpp"
#include "rahc/losses.hpp"
#include "rahc/training.hpp"

using namespace rahc;

namespace {

// Independent scalar forms, written out term by term.
double bce_sum(const std::array<double, 5>& p, const std::array<double, 5>& t) {
  double s = 0;
  for (int i = 0; i < 5; ++i) s -= t[i] * std::log(p[i]) + (1 - t[i]) * std::log(1 - p[i]);
  return s;
}

double erase_sum(const std::array<double, 5>& p) {
  double s = 0;
  for (double v : p) s -= std::log(1 - v);
  return s;
}

std::vector<std::pair<std::string, torch::Tensor>> snapshot(const torch::nn::Module& m) {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  for (const auto& p : m.named_parameters()) out.emplace_back(p.key(), p.value().detach().clone());
  return out;
}

bool unchanged(const std::vector<std::pair<std::string, torch::Tensor>>& before, const torch::nn::Module& m,
               const std::string& prefix = "") {
  const auto now = m.named_parameters();
  for (const auto& [name, value] : before)
    if (name.rfind(prefix, 0) == 0 && !now[name].equal(value)) return false;
  return true;
}

RahcModels tiny_models(std::uint64_t seed, bool perceptual) {
  torch::manual_seed(seed);
  RahcModels m;
  m.net = RestorationNet(testing::gradcheck_network());
  m.disc = WeatherDiscriminator(3, 8);
  if (perceptual) m.extractor = PerceptualExtractor(seed);
  m.book = Codebook(torch::randn({16, 8}));
  return m;
}

TrainBatch tiny_batch() {
  torch::manual_seed(99);
  TrainBatch b;
  b.degraded = torch::rand({2, 3, 16, 16});
  b.clean = torch::rand({2, 3, 16, 16});
  b.labels = labels_tensor({WeatherCode::parse("10010"), WeatherCode::parse("00001")});
  b.rv_target = torch::randn({2, 8, 2, 2});
  return b;
}

}  // namespace

TEST_SUITE("losses") {
  TEST_CASE("symmetric point gives 5 ln 2 for both discrimination losses") {
    const DiscriminatorOutput half{0.5, 0.5, 0.5, 0.5, 0.5};
    for (auto code : {WeatherCode(1), WeatherCode(18), WeatherCode(31)})
      CHECK(loss_discriminator(half, label_of(code)) == 5 * std::log(2.0));
    CHECK(loss_restoration_dis(half) == 5 * std::log(2.0));
  }

  TEST_CASE("scalar losses match the term-by-term oracle") {
    const DiscriminatorOutput p{0.9, 0.2, 0.7, 0.1, 0.5};
    const WeatherLabel t{1, 0, 1, 0, 0};
    CHECK(loss_discriminator(p, t) == doctest::Approx(bce_sum(p, t)).epsilon(1e-12));
    CHECK(loss_restoration_dis(p) == doctest::Approx(erase_sum(p)).epsilon(1e-12));
    const DiscriminatorOutput all9{0.9, 0.9, 0.9, 0.9, 0.9};
    CHECK(loss_discriminator(all9, {1, 1, 1, 1, 1}) == doctest::Approx(-5 * std::log(0.9)).epsilon(1e-12));
  }

  TEST_CASE("probabilities are clamped before the logarithm") {
    CHECK(std::isfinite(loss_discriminator({1, 0, 1, 0, 1}, {0, 1, 0, 1, 0})));
    CHECK(std::isfinite(loss_restoration_dis({1, 1, 1, 1, 1})));
  }

  TEST_CASE("tensor forms average the per-sample sums") {
    const std::array<double, 5> p0{0.9, 0.2, 0.7, 0.1, 0.5}, p1{0.3, 0.6, 0.05, 0.8, 0.4};
    const std::array<double, 5> t0{1, 0, 1, 0, 0}, t1{0, 1, 1, 1, 0};
    auto p = torch::tensor({0.9, 0.2, 0.7, 0.1, 0.5, 0.3, 0.6, 0.05, 0.8, 0.4}, torch::kFloat64).view({2, 5});
    auto t = torch::tensor({1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0}, torch::kFloat64).view({2, 5});
    CHECK(loss_discriminator(p, t).item<double>() ==
          doctest::Approx((bce_sum(p0, t0) + bce_sum(p1, t1)) / 2).epsilon(1e-12));
    CHECK(loss_restoration_dis(p).item<double>() ==
          doctest::Approx((erase_sum(p0) + erase_sum(p1)) / 2).epsilon(1e-12));
    CHECK_THROWS_AS(loss_discriminator(p, t.slice(1, 0, 4)), ShapeError);
  }

  TEST_CASE("total restoration loss") {
    const auto r = torch::full({1, 3, 8, 8}, 0.6, torch::kFloat64);
    const auto c = torch::full({1, 3, 8, 8}, 0.4, torch::kFloat64);
    const auto p = torch::full({1, 5}, 0.5, torch::kFloat64);
    const auto loss = total_restoration_loss(r, c, p, 0.1, nullptr);
    CHECK(loss.report.l1 == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(loss.report.dis == doctest::Approx(5 * std::log(2.0)).epsilon(1e-12));
    CHECK(loss.report.total == doctest::Approx(0.2 + 0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(loss.report.per == 0.0);
    const auto no_dis = total_restoration_loss(r, c, p, 0.0, nullptr);
    CHECK(no_dis.report.total == doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("perceptual extractor is frozen and seed-fixed") {
    PerceptualExtractor a(3), b(3), c(4);
    for (const auto& p : a->parameters()) CHECK_FALSE(p.requires_grad());
    CHECK(a->stage2->weight.equal(b->stage2->weight));
    CHECK_FALSE(a->stage2->weight.equal(c->stage2->weight));
    const auto x = torch::rand({1, 3, 16, 16});
    CHECK(perceptual_loss(a, x, x).item<float>() == 0.0f);
    CHECK(perceptual_loss(a, x, torch::rand({1, 3, 16, 16})).item<float>() > 0.0f);
  }
}

TEST_SUITE("training") {
  TEST_CASE("warmup updates only the mapping network") {
    auto m = tiny_models(1, true);
    auto opts = make_optimizers(m, 1e-3, 0.9, 0.999);
    const auto net_before = snapshot(*m.net);
    const auto disc_before = snapshot(*m.disc);
    const auto batch = tiny_batch();
    warmup_step(batch, m, opts);
    CHECK_FALSE(unchanged(net_before, *m.net, "mapping."));
    for (const auto& [name, value] : net_before)
      if (name.rfind("mapping.", 0) != 0) CHECK(m.net->named_parameters()[name].equal(value));
    CHECK(unchanged(disc_before, *m.disc));
  }

  TEST_CASE("adversarial step updates discriminator and restorer") {
    auto m = tiny_models(2, true);
    auto opts = make_optimizers(m, 1e-3, 0.9, 0.999);
    const auto net_before = snapshot(*m.net);
    const auto disc_before = snapshot(*m.disc);
    const auto r = adversarial_step(tiny_batch(), m, opts, DiscriminationMode::OutputSpace, 0.1);
    CHECK_FALSE(unchanged(net_before, *m.net));
    CHECK_FALSE(unchanged(disc_before, *m.disc));
    CHECK(std::isfinite(r.disc_loss));
    CHECK(r.report.lambda_dis == 0.1);
    CHECK(r.report.total == doctest::Approx(r.report.l1 + 0.1 * r.report.dis + r.report.per));
  }

  TEST_CASE("lambda zero matches a plain run bit for bit") {
    auto a = tiny_models(3, true);
    auto b = tiny_models(3, true);
    auto oa = make_optimizers(a, 1e-3, 0.9, 0.999);
    auto ob = make_optimizers(b, 1e-3, 0.9, 0.999);
    const auto batch = tiny_batch();
    for (int i = 0; i < 3; ++i) {
      adversarial_step(batch, a, oa, DiscriminationMode::OutputSpace, 0.0, i);
      plain_step(batch, b, ob, i);
    }
    const auto pa = a.net->named_parameters();
    for (const auto& p : b.net->named_parameters()) CHECK(pa[p.key()].equal(p.value()));
  }

  TEST_CASE("clean reference only changes the discriminator update") {
    auto a = tiny_models(5, true);
    auto b = tiny_models(5, true);
    auto oa = make_optimizers(a, 1e-3, 0.9, 0.999);
    auto ob = make_optimizers(b, 1e-3, 0.9, 0.999);
    const auto batch = tiny_batch();
    adversarial_step(batch, a, oa, DiscriminationMode::OutputSpace, 0.0, 0, true);
    adversarial_step(batch, b, ob, DiscriminationMode::OutputSpace, 0.0, 0, false);
    const auto pa = a.net->named_parameters();
    for (const auto& p : b.net->named_parameters()) CHECK(pa[p.key()].equal(p.value()));
    const auto da = a.disc->named_parameters();
    bool differs = false;
    for (const auto& p : b.disc->named_parameters()) differs = differs || !da[p.key()].equal(p.value());
    CHECK(differs);
  }

  TEST_CASE("feature-level discrimination reaches the encoder") {
    auto m = tiny_models(4, false);
    m.disc = WeatherDiscriminator(8 * testing::gradcheck_network().base_channels, 8);
    CHECK(dis_gradient_norm(tiny_batch(), m, DiscriminationMode::FeatureLevel) > 0.0);
    auto o = tiny_models(4, false);
    CHECK(dis_gradient_norm(tiny_batch(), o, DiscriminationMode::OutputSpace) > 0.0);
  }

  TEST_CASE("non-finite losses abort with a divergence error") {
    auto m = tiny_models(5, false);
    auto opts = make_optimizers(m, 1e-3, 0.9, 0.999);
    auto batch = tiny_batch();
    batch.degraded[0][0][0][0] = std::nanf("");
    CHECK_THROWS_AS(adversarial_step(batch, m, opts, DiscriminationMode::OutputSpace, 0.1, 7), DivergenceError);
  }

  TEST_CASE("discriminator outputs probabilities") {
    torch::manual_seed(6);
    WeatherDiscriminator d(3, 8);
    const auto p = discriminator_forward(Image(torch::rand({16, 16, 3})), d);
    for (double v : p) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    const auto l = labels_tensor({WeatherCode(18)});
    CHECK(l.sizes() == torch::IntArrayRef{1, 5});
    CHECK(l[0][0].item<float>() == 1.0f);
    CHECK(l[0][3].item<float>() == 1.0f);
  }
}
