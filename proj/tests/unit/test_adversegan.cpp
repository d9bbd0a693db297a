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

#include "rahc/adversegan.hpp"
#include "rahc/error.hpp"

using namespace rahc;

namespace {

GanConfig toy_config() {
  GanConfig c;
  c.base_channels = 4;
  c.content_dim = 8;
  c.style_dim = 8;
  c.type_dim = 4;
  c.disc_width = 8;
  c.steps = 6;
  c.batch_size = 4;
  c.image_size = 16;
  c.paired_scenes = 3;
  c.real_scenes = 3;
  c.seed = 9;
  return c;
}

torch::Tensor types_of(std::initializer_list<std::int64_t> t) { return torch::tensor(std::vector<std::int64_t>(t)); }

}  // namespace

TEST_SUITE("adversegan") {
  TEST_CASE("objective algebra") {
    GanTerms<double> zero{{0, 0, 0}, {0, 0, 0}};
    const auto z = objectives(zero);
    CHECK(z.generator == 0.0);
    CHECK(z.realism == 0.0);
    CHECK(z.pairing == 0.0);
    GanTerms<double> unit{{1, 1, 1}, {1, 1, 1}};
    const auto u = objectives(unit);
    CHECK(u.generator == 6.0);
    CHECK(u.realism == 4.0);
    CHECK(u.pairing == 8.0);
    const auto degenerate = objectives(unit, {0.0, 0.0, 3.0});
    CHECK(degenerate.generator == 0.0);
    CHECK(degenerate.realism == 0.0);
    CHECK(degenerate.pairing == 0.0);
  }

  TEST_CASE("objectives are linear with the stated coefficients") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
      GanTerms<double> t{{rng.uniform(-3, 3), rng.uniform(0, 4), rng.uniform(0, 4)},
                         {rng.uniform(-3, 3), rng.uniform(0, 4), rng.uniform(0, 4)}};
      const auto o = objectives(t);
      const double g = 1 * (-t.rd.adv + 3 * t.rd.cls_fake) + 2 * (-t.pd.adv + 3 * t.pd.cls_fake);
      CHECK(o.generator == doctest::Approx(g).epsilon(1e-12));
      CHECK(o.realism == doctest::Approx(t.rd.adv + 3 * t.rd.cls_real).epsilon(1e-12));
      CHECK(o.pairing == doctest::Approx(2 * (t.pd.adv + 3 * t.pd.cls_real)).epsilon(1e-12));
    }
  }

  TEST_CASE("adversarial terms at reference points") {
    const auto half = torch::full({3}, 0.5, torch::kFloat64);
    const auto uniform = torch::full({3, 5}, 0.2, torch::kFloat64);
    const auto t = types_of({0, 3, 4});
    const auto terms = adversarial_terms(half, half, uniform, t, uniform, t);
    CHECK(terms.adv.item<double>() == doctest::Approx(-2 * std::log(2.0)).epsilon(1e-12));
    CHECK(terms.cls_real.item<double>() == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    CHECK(terms.cls_fake.item<double>() == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    auto perfect = torch::zeros({3, 5}, torch::kFloat64);
    for (int i = 0; i < 3; ++i) perfect[i][t[i].item<std::int64_t>()] = 1.0;
    CHECK(adversarial_terms(half, half, perfect, t, perfect, t).cls_real.item<double>() < 1e-6);
  }

  TEST_CASE("adversarial terms match a scalar evaluation") {
    const auto real = torch::full({1}, 0.8, torch::kFloat64);
    const auto fake = torch::full({1}, 0.3, torch::kFloat64);
    auto cls = torch::full({1, 5}, 0.1, torch::kFloat64);
    cls[0][2] = 0.6;
    const auto t = types_of({2});
    const auto terms = adversarial_terms(real, fake, cls, t, cls, t);
    CHECK(terms.adv.item<double>() == doctest::Approx(std::log(0.8) + std::log(0.7)).epsilon(1e-12));
    CHECK(terms.cls_real.item<double>() == doctest::Approx(-std::log(0.6)).epsilon(1e-12));
    CHECK(terms.cls_fake.item<double>() == doctest::Approx(-std::log(0.6)).epsilon(1e-12));
  }

  TEST_CASE("generator contract") {
    const auto cfg = toy_config();
    auto m = make_gan(cfg);
    const auto c = torch::rand({2, 3, 16, 24});
    const auto z = sample_latents(1, cfg, 2);
    const auto d = m.generator->forward(c, types_of({1, 4}), z);
    CHECK(d.sizes() == c.sizes());
    CHECK(d.min().item<float>() >= 0.0f);
    CHECK(d.max().item<float>() <= 1.0f);
    CHECK(d.equal(m.generator->forward(c, types_of({1, 4}), z)));
    CHECK_FALSE(d.equal(m.generator->forward(c, types_of({1, 4}), sample_latents(2, cfg, 2))));
    CHECK_THROWS_AS(m.generator->forward(c, types_of({1}), z), ShapeError);
    CHECK(sample_latents(5, cfg).content.equal(sample_latents(5, cfg).content));
  }

  TEST_CASE("discriminators enforce their input shapes") {
    const auto cfg = toy_config();
    auto m = make_gan(cfg);
    const auto x = torch::rand({2, 3, 16, 16});
    const auto out = m.realism->forward(x);
    CHECK(out.src.sizes() == torch::IntArrayRef{2});
    CHECK(out.cls.sum(1).allclose(torch::ones({2})));
    CHECK_THROWS_AS(m.pairing->forward(x), ShapeError);
    CHECK_THROWS_AS(m.realism->forward(torch::cat({x, x}, 1)), ShapeError);
    CHECK_THROWS_AS(pd_losses(m.pairing, x, x, torch::rand({2, 3, 8, 8}), types_of({0, 1}), types_of({0, 1})),
                    ShapeError);
  }

  TEST_CASE("hybrid generation") {
    const auto cfg = toy_config();
    auto m = make_gan(cfg);
    const auto clean = make_clean_scene({1}, 16, 16);
    CHECK_THROWS_AS(gen_hybrid(m.generator, clean, WeatherCode(3), {1}, cfg), StateError);
    m.generator->mark_trained();
    for (auto code : enumerate_codes()) {
      const auto before = m.generator->forward_calls();
      const auto r = gen_hybrid(m.generator, clean, code, {42}, cfg);
      CHECK(m.generator->forward_calls() - before == code.popcount());
      REQUIRE(r.stages.size() == static_cast<std::size_t>(code.popcount()));
      CHECK(regenerate(m.generator, clean, r.stages, cfg) == r.image);
    }
    CHECK_THROWS_AS(gen_hybrid(m.generator, clean, WeatherCode(0), {1}, cfg), InvalidCodeError);
  }

  TEST_CASE("short training is finite and reproducible") {
    const auto cfg = toy_config();
    const auto data = make_gan_data(cfg, 3);
    CHECK(data.paired[2].size() == 3);
    auto a = train_adversegan(data, cfg);
    auto b = train_adversegan(data, cfg);
    REQUIRE(a.log.size() == static_cast<std::size_t>(cfg.steps));
    for (std::size_t i = 0; i < a.log.size(); ++i) {
      CHECK(std::isfinite(a.log[i].generator));
      CHECK(a.log[i].generator == b.log[i].generator);
      CHECK(a.log[i].realism == b.log[i].realism);
    }
    CHECK(a.models.generator->trained());
    const auto acc = realism_type_accuracy(a.models.realism, cfg, 1, 2);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
  }

  TEST_CASE("checkpoint round-trip") {
    const auto cfg = toy_config();
    auto m = make_gan(cfg);
    m.generator->mark_trained();
    const auto path = std::filesystem::temp_directory_path() / "rahc_unit_gan.ckpt";
    save_gan(path, m, cfg);
    GanConfig loaded;
    auto back = load_gan(path, &loaded);
    CHECK(loaded.content_dim == cfg.content_dim);
    CHECK(back.generator->trained());
    const auto clean = make_clean_scene({2}, 16, 16);
    CHECK(gen_hybrid(back.generator, clean, WeatherCode(21), {3}, cfg).image ==
          gen_hybrid(m.generator, clean, WeatherCode(21), {3}, cfg).image);
    const auto grid = interpolation_grid(back.generator, clean, Weather::Snow, 1, cfg, 3);
    CHECK(grid.height() == 48);
    CHECK(grid.width() == 48);
  }
}
