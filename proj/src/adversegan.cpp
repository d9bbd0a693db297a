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

#include "rahc/adversegan.hpp"

#include <cmath>

#include "rahc/archive.hpp"
#include "rahc/error.hpp"

namespace rahc {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

namespace {

nn::Conv2d conv3(std::int64_t in, std::int64_t out, std::int64_t stride = 1) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, 3).stride(stride).padding(1));
}

nn::LeakyReLU lrelu() { return nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)); }

constexpr std::int64_t kContentGrid = 4;

}  // namespace

LatentCodes sample_latents(std::uint64_t seed, const GanConfig& config, std::int64_t batch) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  LatentCodes codes;
  codes.content = torch::randn({batch, config.content_dim}, gen, torch::kFloat32);
  codes.style = torch::randn({batch, config.style_dim}, gen, torch::kFloat32);
  return codes;
}

AdverseGeneratorImpl::AdverseGeneratorImpl(const GanConfig& config)
    : channels_(config.base_channels), content_channels_(config.base_channels) {
  const auto c = channels_;
  if (c <= 0 || config.content_dim <= 0 || config.style_dim <= 0 || config.type_dim <= 0)
    throw ParamError("generator dimensions must be positive");
  encoder = register_module("encoder", nn::Sequential(conv3(3, c), lrelu(), conv3(c, 2 * c, 2), lrelu(),
                                                      conv3(2 * c, 4 * c, 2), lrelu()));
  content_fc = register_module(
      "content_fc", nn::Linear(config.content_dim, content_channels_ * kContentGrid * kContentGrid));
  type_embed = register_module("type_embed", nn::Embedding(kNumWeathers, config.type_dim));
  fuse = register_module("fuse", conv3(4 * c + content_channels_ + config.type_dim, 4 * c));
  up1 = register_module("up1", conv3(4 * c, 2 * c * 4));
  up2 = register_module("up2", conv3(2 * c, c * 4));
  out = register_module("out", conv3(c, 4));
  blocks = register_module("blocks", nn::ModuleList());
  styles = register_module("styles", nn::ModuleList());
  for (auto ch : {4 * c, 2 * c, c}) {
    blocks->push_back(conv3(ch, ch));
    styles->push_back(nn::Linear(config.style_dim, 2 * ch));
  }
  trained_flag = register_buffer("trained", torch::zeros({1}, torch::kInt64));
}

torch::Tensor AdverseGeneratorImpl::forward(const torch::Tensor& images, const torch::Tensor& types,
                                            const LatentCodes& codes) {
  if (images.dim() != 4 || images.size(1) != 3 || images.size(2) % 4 != 0 || images.size(3) % 4 != 0)
    throw ShapeError("generator expects [N, 3, H, W] with H, W divisible by 4");
  const auto n = images.size(0);
  if (types.dim() != 1 || types.size(0) != n || codes.content.size(0) != n || codes.style.size(0) != n)
    throw ShapeError("generator batch sizes disagree");
  ++forward_calls_;

  auto h = encoder->forward(images);
  const auto hh = h.size(2), ww = h.size(3);
  auto content = content_fc(codes.content).view({n, content_channels_, kContentGrid, kContentGrid});
  content = F::interpolate(content, F::InterpolateFuncOptions()
                                        .size(std::vector<std::int64_t>{hh, ww})
                                        .mode(torch::kBilinear)
                                        .align_corners(false));
  auto t = type_embed(types).unsqueeze(-1).unsqueeze(-1).expand({-1, -1, hh, ww});
  h = torch::leaky_relu(fuse(torch::cat({h, content, t}, 1)), 0.2);

  auto modulate = [&](std::size_t i, torch::Tensor x) {
    x = blocks[i]->as<nn::Conv2d>()->forward(x);
    auto gb = styles[i]->as<nn::Linear>()->forward(codes.style).unsqueeze(-1).unsqueeze(-1);
    auto [gamma, beta] = std::make_tuple(gb.chunk(2, 1)[0], gb.chunk(2, 1)[1]);
    auto mean = x.mean({2, 3}, true);
    auto var = x.var({2, 3}, false, true);
    x = (x - mean) / (var + 1e-5).sqrt();
    return torch::leaky_relu(x * (1 + gamma) + beta, 0.2);
  };
  h = modulate(0, h);
  h = modulate(1, torch::pixel_shuffle(up1(h), 2));
  h = modulate(2, torch::pixel_shuffle(up2(h), 2));

  auto o = out(h);
  auto layer = torch::sigmoid(o.slice(1, 0, 3));
  auto mask = torch::sigmoid(o.slice(1, 3, 4));
  return mask * layer + (1 - mask) * images;
}

GanDiscriminatorImpl::GanDiscriminatorImpl(std::int64_t in_channels, std::int64_t width)
    : in_channels_(in_channels) {
  trunk = register_module("trunk", nn::Sequential(conv3(in_channels, width, 2), lrelu(), conv3(width, 2 * width, 2),
                                                  lrelu(), conv3(2 * width, 4 * width, 2), lrelu(),
                                                  conv3(4 * width, 4 * width, 2), lrelu()));
  src_head = register_module("src_head", nn::Linear(4 * width, 1));
  cls_head = register_module("cls_head", nn::Linear(4 * width, kNumWeathers));
}

GanDiscriminatorImpl::Output GanDiscriminatorImpl::forward(const torch::Tensor& x) {
  if (x.dim() != 4 || x.size(1) != in_channels_)
    throw ShapeError("discriminator expects " + std::to_string(in_channels_) + " input channels");
  auto f = trunk->forward(x).mean({2, 3});
  return {torch::sigmoid(src_head(f)).squeeze(1), torch::softmax(cls_head(f), 1)};
}

AdvTerms<torch::Tensor> adversarial_terms(const torch::Tensor& src_real, const torch::Tensor& src_fake,
                                          const torch::Tensor& cls_real, const torch::Tensor& real_types,
                                          const torch::Tensor& cls_fake, const torch::Tensor& fake_types) {
  if (cls_real.dim() != 2 || cls_real.size(1) != kNumWeathers || cls_fake.dim() != 2 ||
      cls_fake.size(1) != kNumWeathers)
    throw ShapeError("class probabilities must be [N, 5]");
  auto clamp = [](const torch::Tensor& p) { return p.clamp(kProbEps, 1.0 - kProbEps); };
  auto pick = [&](const torch::Tensor& probs, const torch::Tensor& types) {
    return clamp(probs.gather(1, types.to(torch::kInt64).unsqueeze(1)).squeeze(1));
  };
  AdvTerms<torch::Tensor> t;
  t.adv = clamp(src_real).log().mean() + (1 - clamp(src_fake)).log().mean();
  t.cls_real = -pick(cls_real, real_types).log().mean();
  t.cls_fake = -pick(cls_fake, fake_types).log().mean();
  return t;
}

AdvTerms<torch::Tensor> rd_losses(GanDiscriminator& rd, const torch::Tensor& real, const torch::Tensor& fake,
                                  const torch::Tensor& types, const torch::Tensor& real_types) {
  auto r = rd->forward(real);
  auto f = rd->forward(fake);
  return adversarial_terms(r.src, f.src, r.cls, real_types, f.cls, types);
}

AdvTerms<torch::Tensor> pd_losses(GanDiscriminator& pd, const torch::Tensor& clean, const torch::Tensor& paired,
                                  const torch::Tensor& fake, const torch::Tensor& types,
                                  const torch::Tensor& real_types) {
  if (clean.sizes() != paired.sizes() || clean.sizes() != fake.sizes())
    throw ShapeError("pairing discriminator inputs differ in shape");
  auto r = pd->forward(torch::cat({clean, paired}, 1));
  auto f = pd->forward(torch::cat({clean, fake}, 1));
  return adversarial_terms(r.src, f.src, r.cls, real_types, f.cls, types);
}

GanModels make_gan(const GanConfig& config) {
  torch::manual_seed(derive_seed(config.seed, "gan_init"));
  GanModels m;
  m.generator = AdverseGenerator(config);
  m.realism = GanDiscriminator(3, config.disc_width);
  m.pairing = GanDiscriminator(6, config.disc_width);
  return m;
}

namespace {

torch::Tensor type_tensor(Weather w) { return torch::full({1}, static_cast<std::int64_t>(w), torch::kInt64); }

Image run_generator(AdverseGenerator& g, const Image& img, Weather w, const LatentCodes& codes) {
  torch::NoGradGuard guard;
  return Image::from_chw(g->forward(img.chw().unsqueeze(0), type_tensor(w), codes)[0]);
}

}  // namespace

Image generate(AdverseGenerator& g, const Image& clean, Weather type, const LatentCodes& codes) {
  return run_generator(g, clean, type, codes);
}

Image regenerate(AdverseGenerator& g, const Image& clean, const std::vector<HybridStage>& stages,
                 const GanConfig& config) {
  if (!g->trained()) throw StateError("generator has not been trained");
  Image x = clean;
  for (const auto& s : stages) x = run_generator(g, x, s.weather, sample_latents(s.seed, config));
  return x;
}

HybridResult gen_hybrid(AdverseGenerator& g, const Image& clean, WeatherCode code, RenderSeed seed,
                        const GanConfig& config) {
  if (code.is_clean()) throw InvalidCodeError("code 00000 has no stages");
  HybridResult r;
  for (auto w : code.weathers())
    r.stages.push_back({w, derive_seed(seed.value, "gan_stage", static_cast<std::uint64_t>(w))});
  r.image = regenerate(g, clean, r.stages, config);
  return r;
}

Degrader gan_degrader(AdverseGenerator& g, const GanConfig& config) {
  return [g, config](const Image& clean, WeatherCode code, RenderSeed seed,
                     std::vector<std::uint64_t>& stage_seeds) mutable {
    auto r = gen_hybrid(g, clean, code, seed, config);
    for (const auto& s : r.stages) stage_seeds.push_back(s.seed);
    return r.image;
  };
}

GanData make_gan_data(const GanConfig& config, std::uint64_t seed) {
  const auto s = config.image_size;
  GanData d;
  d.paired.resize(kNumWeathers);
  d.real.resize(kNumWeathers);
  std::vector<Image> scenes, real_scenes;
  for (int i = 0; i < config.paired_scenes; ++i)
    scenes.push_back(make_clean_scene({derive_seed(seed, "gan_clean", i)}, s, s));
  for (int i = 0; i < config.real_scenes; ++i)
    real_scenes.push_back(make_clean_scene({derive_seed(seed, "gan_real_clean", i)}, s, s));
  const auto held_out = DegradationRanges::held_out();
  for (int k = 0; k < kNumWeathers; ++k) {
    const auto w = static_cast<Weather>(k);
    for (int i = 0; i < config.paired_scenes; ++i) {
      const RenderSeed rs{derive_seed(seed, "gan_pair", static_cast<std::uint64_t>(k * 100000 + i))};
      d.paired[k].emplace_back(scenes[i], apply_weather(scenes[i], sample_params(w, rs, s, s), rs));
    }
    for (int i = 0; i < config.real_scenes; ++i) {
      const RenderSeed rs{derive_seed(seed, "gan_real", static_cast<std::uint64_t>(k * 100000 + i))};
      d.real[k].push_back(apply_weather(real_scenes[i], sample_params(w, rs, s, s, held_out), rs));
    }
  }
  return d;
}

namespace {

void check_finite(double v, int step, const char* what) {
  if (!std::isfinite(v)) throw DivergenceError(step, std::string("non-finite ") + what + " objective");
}

}  // namespace

GanTrainResult train_adversegan(const GanData& data, const GanConfig& config) {
  if (data.paired.size() != kNumWeathers || data.real.size() != kNumWeathers)
    throw ParamError("training data must cover all five weather types");
  for (int k = 0; k < kNumWeathers; ++k)
    if (data.paired[k].empty() || data.real[k].empty())
      throw ParamError("no training samples for " + std::string(weather_name(static_cast<Weather>(k))));
  if (config.batch_size <= 0 || config.steps < 0) throw ParamError("batch_size and steps must be positive");

  GanTrainResult result{make_gan(config), {}};
  auto& g = result.models.generator;
  auto& rd = result.models.realism;
  auto& pd = result.models.pairing;
  auto opts = torch::optim::AdamOptions(config.learning_rate).betas({0.5, 0.999});
  torch::optim::Adam opt_g(g->parameters(), opts);
  torch::optim::Adam opt_rd(rd->parameters(), opts);
  torch::optim::Adam opt_pd(pd->parameters(), opts);
  const auto& w = config.weights;

  for (int step = 0; step < config.steps; ++step) {
    Rng rng(derive_seed(config.seed, "gan_step", step));
    std::vector<Image> cs, hs, es;
    std::vector<std::int64_t> ts, ths;
    for (int b = 0; b < config.batch_size; ++b) {
      const auto k = rng.uniform_int(0, kNumWeathers - 1);
      const auto& pool = data.paired[k];
      const auto& pair = pool[rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1)];
      cs.push_back(pair.first);
      hs.push_back(pair.second);
      ts.push_back(k);
      const auto kh = rng.uniform_int(0, kNumWeathers - 1);
      const auto& real = data.real[kh];
      es.push_back(real[rng.uniform_int(0, static_cast<std::int64_t>(real.size()) - 1)]);
      ths.push_back(kh);
    }
    const auto c = to_batch(cs), h = to_batch(hs), e = to_batch(es);
    const auto t = torch::tensor(ts, torch::kInt64), th = torch::tensor(ths, torch::kInt64);
    const auto codes = sample_latents(derive_seed(config.seed, "gan_latent", step), config, config.batch_size);

    auto fake = g->forward(c, t, codes);

    auto rd_terms = rd_losses(rd, e, fake.detach(), t, th);
    auto l_rd = w.alpha * (rd_terms.adv + w.lambda_cls * rd_terms.cls_real);
    opt_rd.zero_grad();
    l_rd.backward();
    opt_rd.step();

    auto pd_terms = pd_losses(pd, c, h, fake.detach(), t, t);
    auto l_pd = w.beta * (pd_terms.adv + w.lambda_cls * pd_terms.cls_real);
    opt_pd.zero_grad();
    l_pd.backward();
    opt_pd.step();

    GanTerms<torch::Tensor> terms{rd_losses(rd, e, fake, t, th), pd_losses(pd, c, h, fake, t, t)};
    auto l_g = objectives(terms, w).generator;
    opt_g.zero_grad();
    l_g.backward();
    opt_g.step();

    GanLogRow row{step, l_g.item<double>(), l_rd.item<double>(), l_pd.item<double>()};
    check_finite(row.generator, step, "generator");
    check_finite(row.realism, step, "realism discriminator");
    check_finite(row.pairing, step, "pairing discriminator");
    result.log.push_back(row);
  }
  g->mark_trained();
  g->eval();
  rd->eval();
  pd->eval();
  return result;
}

double realism_type_accuracy(GanDiscriminator& rd, const GanConfig& config, std::uint64_t seed, int per_type) {
  if (per_type <= 0) throw ParamError("per_type must be positive");
  torch::NoGradGuard guard;
  const auto s = config.image_size;
  const auto ranges = DegradationRanges::held_out();
  int correct = 0;
  for (int k = 0; k < kNumWeathers; ++k) {
    std::vector<Image> batch;
    for (int i = 0; i < per_type; ++i) {
      const auto idx = static_cast<std::uint64_t>(k * per_type + i);
      const auto clean = make_clean_scene({derive_seed(seed, "acc_clean", idx)}, s, s);
      const RenderSeed rs{derive_seed(seed, "acc_weather", idx)};
      batch.push_back(apply_weather(clean, sample_params(static_cast<Weather>(k), rs, s, s, ranges), rs));
    }
    auto pred = rd->forward(to_batch(batch)).cls.argmax(1);
    correct += pred.eq(k).sum().item<int>();
  }
  return static_cast<double>(correct) / (kNumWeathers * per_type);
}

void save_gan(const std::filesystem::path& path, GanModels& models, const GanConfig& config) {
  TensorArchive a;
  a.meta["kind"] = "adversegan";
  a.meta["base_channels"] = config.base_channels;
  a.meta["content_dim"] = config.content_dim;
  a.meta["style_dim"] = config.style_dim;
  a.meta["type_dim"] = config.type_dim;
  a.meta["disc_width"] = config.disc_width;
  a.meta["image_size"] = config.image_size;
  put_module(a, "generator", *models.generator);
  put_module(a, "realism", *models.realism);
  put_module(a, "pairing", *models.pairing);
  save_archive(path, a);
}

GanModels load_gan(const std::filesystem::path& path, GanConfig* config_out) {
  const auto a = load_archive(path);
  if (a.meta.value("kind", "") != "adversegan") throw IoError(path.string(), "not an AdverseGAN checkpoint");
  GanConfig config;
  config.base_channels = a.meta.at("base_channels").get<std::int64_t>();
  config.content_dim = a.meta.at("content_dim").get<std::int64_t>();
  config.style_dim = a.meta.at("style_dim").get<std::int64_t>();
  config.type_dim = a.meta.at("type_dim").get<std::int64_t>();
  config.disc_width = a.meta.at("disc_width").get<std::int64_t>();
  config.image_size = a.meta.at("image_size").get<std::int64_t>();
  GanModels m;
  m.generator = AdverseGenerator(config);
  m.realism = GanDiscriminator(3, config.disc_width);
  m.pairing = GanDiscriminator(6, config.disc_width);
  get_module(a, "generator", *m.generator);
  get_module(a, "realism", *m.realism);
  get_module(a, "pairing", *m.pairing);
  m.generator->eval();
  m.realism->eval();
  m.pairing->eval();
  if (config_out) *config_out = config;
  return m;
}

Image interpolation_grid(AdverseGenerator& g, const Image& clean, Weather type, std::uint64_t seed,
                         const GanConfig& config, int steps) {
  if (steps < 2) throw ParamError("interpolation needs at least two steps");
  const auto a = sample_latents(derive_seed(seed, "interp", 0), config);
  const auto b = sample_latents(derive_seed(seed, "interp", 1), config);
  std::vector<torch::Tensor> rows;
  for (int r = 0; r < steps; ++r) {
    const double u = static_cast<double>(r) / (steps - 1);
    std::vector<torch::Tensor> cols;
    for (int c = 0; c < steps; ++c) {
      const double v = static_cast<double>(c) / (steps - 1);
      LatentCodes z{(1 - u) * a.content + u * b.content, (1 - v) * a.style + v * b.style};
      cols.push_back(run_generator(g, clean, type, z).tensor());
    }
    rows.push_back(torch::cat(cols, 1));
  }
  return Image(torch::cat(rows, 0).contiguous());
}

}  // namespace rahc
