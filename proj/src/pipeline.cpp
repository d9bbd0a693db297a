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

#include "rahc/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "rahc/archive.hpp"
#include "rahc/error.hpp"
#include "rahc/synthesis.hpp"

namespace rahc {

namespace fs = std::filesystem;
using nlohmann::json;

double cosine_lr(std::int64_t step, std::int64_t total_steps, double lr_max, double lr_min) {
  if (total_steps <= 1) return lr_max;
  const double s = static_cast<double>(std::clamp<std::int64_t>(step, 0, total_steps - 1));
  return lr_min + (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * s / (total_steps - 1))) / 2.0;
}

RunPaths::RunPaths(const fs::path& root_dir, const RunConfig& config) : root(root_dir) {
  data_manifest = root / config.text("data.dir") / "manifest.jsonl";
  vq_checkpoint = root / config.text("vq.dir") / "vq.ckpt";
  codebook = root / config.text("vq.dir") / "codebook.bin";
  gan_checkpoint = root / config.text("gan.dir") / "gan.ckpt";
  gen_manifest = root / config.text("gen.dir") / "manifest.jsonl";
  train_dir = root / config.text("train.dir");
  final_checkpoint = train_dir / "final.ckpt";
  train_log = train_dir / "log.csv";
  probe_dir = root / config.text("probe.dir");
}

fs::path RunPaths::checkpoint(std::int64_t step) const {
  char name[32];
  std::snprintf(name, sizeof name, "step_%07lld.ckpt", static_cast<long long>(step));
  return train_dir / name;
}

fs::path output_root(const std::string& explicit_root) {
  if (!explicit_root.empty()) return explicit_root;
  if (const char* env = std::getenv("RAHC_OUTPUT_ROOT"); env && *env) return env;
  return "rahc_out";
}

namespace {

void require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) throw MissingArtifactError(path.string(), producer);
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string(), "write failed");
}

std::vector<Image> unique_cleans(const DatasetManifest& manifest) {
  std::vector<Image> out;
  std::vector<std::string> seen;
  for (const auto& r : manifest.records) {
    if (std::find(seen.begin(), seen.end(), r.clean) != seen.end()) continue;
    seen.push_back(r.clean);
    out.push_back(read_png(manifest.resolve(r.clean)));
  }
  return out;
}

DatasetManifest build(const fs::path& root, const std::vector<std::string>& cleans,
                      const std::vector<WeatherCode>& codes, const std::string& layout, int samples,
                      RenderSeed seed, const Degrader& degrader) {
  if (layout == "cycle") return build_cycled_dataset(root, cleans, codes, seed, degrader);
  return build_dataset(root, cleans, codes, samples, seed, degrader);
}

json net_to_json(const NetworkConfig& c) {
  return {{"base_channels", c.base_channels}, {"block_counts", c.block_counts}, {"heads", c.heads},
          {"reduction", c.reduction},         {"latent_dim", c.latent_dim},     {"mapping_blocks", c.mapping_blocks},
          {"ffn_expansion", c.ffn_expansion}};
}

NetworkConfig net_from_json(const json& j) {
  NetworkConfig c;
  c.base_channels = j.at("base_channels").get<std::int64_t>();
  c.block_counts = j.at("block_counts").get<std::array<int, 8>>();
  c.heads = j.at("heads").get<std::array<int, 4>>();
  c.reduction = j.at("reduction").get<std::int64_t>();
  c.latent_dim = j.at("latent_dim").get<std::int64_t>();
  c.mapping_blocks = j.at("mapping_blocks").get<int>();
  c.ffn_expansion = j.at("ffn_expansion").get<std::int64_t>();
  return c;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json row_to_json(const TrainLogRow& r) {
  return {{"step", r.step}, {"phase", r.phase}, {"l1", r.report.l1}, {"dis", r.report.dis},
          {"per", r.report.per}, {"map", r.report.map}, {"total", r.report.total},
          {"lambda_dis", r.report.lambda_dis}, {"disc_loss", r.disc_loss}, {"lr", r.lr}};
}

TrainLogRow row_from_json(const json& j) {
  TrainLogRow r;
  r.step = j.at("step").get<std::int64_t>();
  r.phase = j.at("phase").get<std::string>();
  r.report.l1 = j.at("l1").get<double>();
  r.report.dis = j.at("dis").get<double>();
  r.report.per = j.at("per").get<double>();
  r.report.map = j.at("map").get<double>();
  r.report.total = j.at("total").get<double>();
  r.report.lambda_dis = j.at("lambda_dis").get<double>();
  r.disc_loss = j.at("disc_loss").get<double>();
  r.lr = j.at("lr").get<double>();
  return r;
}

}  // namespace

DatasetManifest run_synth_data(const RunConfig& config, const RunPaths& paths) {
  config.validate();
  const auto root = paths.data_manifest.parent_path();
  const auto size = config.integer("data.size");
  const auto cleans = synth_cleans(root, static_cast<int>(config.integer("data.clean_count")), size, size,
                                   {derive_seed(config.seed(), "clean_scenes")});
  auto manifest = build(root, cleans, config.codes("data.codes"), config.text("data.layout"),
                        static_cast<int>(config.integer("data.samples_per_code")),
                        {derive_seed(config.seed(), "dataset")}, analytic_degrader());
  save_manifest(manifest, paths.data_manifest);
  config.write(root / "config.json");
  return manifest;
}

VqRunSummary run_train_vq(const RunConfig& config, const RunPaths& paths) {
  config.validate();
  require(paths.data_manifest, "synth-data");
  const auto images = unique_cleans(load_manifest(paths.data_manifest));
  const auto vq_config = config.vq();
  auto result = train_vq(images, vq_config);
  save_vq(paths.vq_checkpoint, result.model, vq_config);
  export_codebook(paths.codebook, result.book);

  std::ostringstream log;
  log << "step,loss,recon,perplexity\n";
  for (std::size_t i = 0; i < result.log.loss.size(); ++i)
    log << i << "," << fmt(result.log.loss[i]) << "," << fmt(result.log.recon[i]) << ","
        << fmt(i < result.log.perplexity.size() ? result.log.perplexity[i] : 0.0) << "\n";
  write_text(paths.vq_checkpoint.parent_path() / "log.csv", log.str());
  config.write(paths.vq_checkpoint.parent_path() / "config.json");

  VqRunSummary s;
  s.steps = static_cast<int>(result.log.loss.size());
  for (const auto& img : images) s.psnr += psnr(vq_reconstruct(img, result.model), img);
  s.psnr /= static_cast<double>(images.size());
  return s;
}

GanRunSummary run_train_adversegan(const RunConfig& config, const RunPaths& paths) {
  config.validate();
  const auto gan_config = config.gan();
  const auto data = make_gan_data(gan_config, derive_seed(config.seed(), "gan_data"));
  auto result = train_adversegan(data, gan_config);
  save_gan(paths.gan_checkpoint, result.models, gan_config);
  GanRunSummary s;
  s.log = result.log;
  s.realism_accuracy =
      realism_type_accuracy(result.models.realism, gan_config, derive_seed(config.seed(), "gan_heldout"), 8);
  std::ostringstream log;
  log << "step,generator,realism,pairing\n";
  for (const auto& r : s.log) log << r.step << "," << fmt(r.generator) << "," << fmt(r.realism) << "," << fmt(r.pairing) << "\n";
  const auto dir = paths.gan_checkpoint.parent_path();
  write_text(dir / "log.csv", log.str());
  write_text(dir / "summary.json", json{{"realism_type_accuracy", s.realism_accuracy}}.dump(2) + "\n");
  config.write(dir / "config.json");
  return s;
}

DatasetManifest run_gen_data(const RunConfig& config, const RunPaths& paths,
                             const std::optional<fs::path>& interp_grid) {
  config.validate();
  require(paths.gan_checkpoint, "train-adversegan");
  GanConfig gan_config;
  auto models = load_gan(paths.gan_checkpoint, &gan_config);
  const auto root = paths.gen_manifest.parent_path();
  const auto size = config.integer("data.size");
  const auto cleans = synth_cleans(root, static_cast<int>(config.integer("data.clean_count")), size, size,
                                   {derive_seed(config.seed(), "gen_scenes")});
  const auto codes = config.codes("gen.codes");
  auto manifest = build(root, cleans, codes, config.text("gen.layout"),
                        static_cast<int>(config.integer("gen.samples_per_code")),
                        {derive_seed(config.seed(), "gen_dataset")}, gan_degrader(models.generator, gan_config));
  save_manifest(manifest, paths.gen_manifest);
  config.write(root / "config.json");
  if (interp_grid) {
    const auto clean = read_png(root / cleans.front());
    write_png(*interp_grid, interpolation_grid(models.generator, clean, codes.front().weathers().front(),
                                               derive_seed(config.seed(), "interp"), gan_config));
  }
  return manifest;
}

std::string train_log_header() { return "step,phase,l1,dis,per,map,total,disc_loss,lr"; }

std::string format_log_row(const TrainLogRow& r) {
  return std::to_string(r.step) + "," + r.phase + "," + fmt(r.report.l1) + "," + fmt(r.report.dis) + "," +
         fmt(r.report.per) + "," + fmt(r.report.map) + "," + fmt(r.report.total) + "," + fmt(r.disc_loss) + "," +
         fmt(r.lr);
}

namespace {

struct TrainData {
  std::vector<Image> degraded, clean;
  std::vector<WeatherCode> codes;
  std::vector<torch::Tensor> rv;  // [1, Nz, h, w] per pair
};

TrainData prepare_data(const DatasetManifest& manifest, VqAutoencoder& vq, const Codebook& book) {
  torch::NoGradGuard guard;
  TrainData d;
  for (const auto& p : load_pairs(manifest)) {
    d.degraded.push_back(p.degraded);
    d.clean.push_back(p.clean);
    d.codes.push_back(p.code);
    d.rv.push_back(quantize_nchw(vq->encode(p.clean.chw().unsqueeze(0)), book.vectors()).quantized);
  }
  if (d.clean.empty()) throw ParamError("training manifest has no records");
  return d;
}

TrainBatch make_batch(const TrainData& d, std::uint64_t seed, std::int64_t step, std::int64_t batch_size) {
  const auto n = static_cast<std::int64_t>(d.clean.size());
  Rng rng(derive_seed(seed, "batch", static_cast<std::uint64_t>(step)));
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Image> deg, clean;
  std::vector<WeatherCode> codes;
  std::vector<torch::Tensor> rv;
  for (std::int64_t b = 0; b < batch_size; ++b) {
    const auto k = b % n;
    if (k == 0) {
      for (std::int64_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(0, i)]);
    }
    const auto idx = order[k];
    deg.push_back(d.degraded[idx]);
    clean.push_back(d.clean[idx]);
    codes.push_back(d.codes[idx]);
    rv.push_back(d.rv[idx]);
  }
  return {to_batch(deg), to_batch(clean), labels_tensor(codes), torch::cat(rv, 0)};
}

struct Session {
  RahcModels models;
  RahcOptimizers opts;
  NetworkConfig net_config;
  std::int64_t disc_in = 3;
};

void save_checkpoint(const fs::path& path, Session& s, const RunConfig& config, std::int64_t step,
                     const std::vector<TrainLogRow>& log) {
  TensorArchive a;
  a.meta["kind"] = "rahc";
  a.meta["step"] = step;
  a.meta["net"] = net_to_json(s.net_config);
  a.meta["disc"] = {{"in_channels", s.disc_in}, {"width", config.integer("disc.width")}};
  a.meta["config"] = config.values();
  a.meta["log"] = json::array();
  for (const auto& r : log) a.meta["log"].push_back(row_to_json(r));
  put_module(a, "net", *s.models.net);
  put_module(a, "disc", *s.models.disc);
  put_adam(a, "adam.warmup", *s.opts.warmup);
  put_adam(a, "adam.restorer", *s.opts.restorer);
  put_adam(a, "adam.disc", *s.opts.discriminator);
  a.tensors["codebook"] = s.models.book.vectors();
  save_archive(path, a);
}

void write_log(const fs::path& path, const std::vector<TrainLogRow>& log) {
  std::string text = train_log_header() + "\n";
  for (const auto& r : log) text += format_log_row(r) + "\n";
  write_text(path, text);
}

}  // namespace

TrainSummary run_train_rahc(const RunConfig& config, const RunPaths& paths, const TrainOptions& options) {
  config.validate();
  require(paths.data_manifest, "synth-data");
  require(paths.vq_checkpoint, "train-vq");
  const auto seed = config.seed();
  const auto total = config.integer("train.total_steps");
  const auto warmup = config.integer("train.warmup_steps");
  const auto batch_size = config.integer("train.batch_size");
  const double lr_max = config.number("train.lr"), lr_min = config.number("train.lr_min");
  const double lambda = config.number("train.lambda_dis");
  const auto mode = config.mode();
  const auto log_every = config.integer("train.log_every");
  const auto ckpt_every = config.integer("train.checkpoint_every");
  const bool clean_reference = config.flag("disc.clean_reference");

  VqConfig vq_config;
  auto vq = load_vq(paths.vq_checkpoint, &vq_config);
  const auto book = vq->codebook();
  const auto data = prepare_data(load_manifest(paths.data_manifest), vq, book);

  Session s;
  s.net_config = config.network(vq_config.latent_dim);
  s.net_config.validate();
  torch::manual_seed(derive_seed(seed, "rahc_init"));
  s.models.net = RestorationNet(s.net_config);
  s.disc_in = mode == DiscriminationMode::OutputSpace ? 3 : 8 * s.net_config.base_channels;
  s.models.disc = WeatherDiscriminator(s.disc_in, config.integer("disc.width"));
  if (config.flag("train.perceptual")) s.models.extractor = PerceptualExtractor(derive_seed(seed, "perceptual"));
  s.models.book = book;
  s.opts = make_optimizers(s.models, lr_max, config.number("train.beta1"), config.number("train.beta2"));

  TrainSummary summary;
  std::int64_t start = 0;
  if (options.resume) {
    const auto a = load_archive(*options.resume);
    if (a.meta.value("kind", "") != "rahc") throw IoError(options.resume->string(), "not a training checkpoint");
    if (net_from_json(a.meta.at("net")).block_counts != s.net_config.block_counts ||
        a.meta.at("disc").at("in_channels").get<std::int64_t>() != s.disc_in)
      throw ConfigError("checkpoint was written with a different architecture");
    get_module(a, "net", *s.models.net);
    get_module(a, "disc", *s.models.disc);
    get_adam(a, "adam.warmup", *s.opts.warmup);
    get_adam(a, "adam.restorer", *s.opts.restorer);
    get_adam(a, "adam.disc", *s.opts.discriminator);
    start = a.meta.at("step").get<std::int64_t>();
    for (const auto& r : a.meta.at("log")) summary.log.push_back(row_from_json(r));
  }
  const auto end = options.stop_after ? std::min(total, *options.stop_after) : total;
  fs::create_directories(paths.train_dir);
  config.write(paths.train_dir / "config.json");

  for (auto step = start; step < end; ++step) {
    const double lr = cosine_lr(step, total, lr_max, lr_min);
    set_learning_rate(*s.opts.warmup, lr);
    set_learning_rate(*s.opts.restorer, lr);
    set_learning_rate(*s.opts.discriminator, lr);
    const auto batch = make_batch(data, seed, step, batch_size);
    TrainLogRow row{step, "", {}, 0.0, lr};
    if (step < warmup) {
      row.phase = "warmup";
      row.report.map = warmup_step(batch, s.models, s.opts, step);
      row.report.lambda_dis = lambda;
    } else {
      row.phase = "joint";
      const auto r = adversarial_step(batch, s.models, s.opts, mode, lambda, step, clean_reference);
      row.report = r.report;
      row.disc_loss = r.disc_loss;
    }
    if (step == 0 || (step + 1) % log_every == 0 || step + 1 == total) summary.log.push_back(row);
    if ((step + 1) % ckpt_every == 0 || step + 1 == end) {
      save_checkpoint(paths.checkpoint(step + 1), s, config, step + 1, summary.log);
      write_log(paths.train_log, summary.log);
    }
  }
  summary.steps_done = std::max(start, end);
  summary.checkpoint = paths.checkpoint(summary.steps_done);
  if (start >= end) save_checkpoint(summary.checkpoint, s, config, summary.steps_done, summary.log);
  if (summary.steps_done == total) {
    fs::copy_file(summary.checkpoint, paths.final_checkpoint, fs::copy_options::overwrite_existing);
    summary.checkpoint = paths.final_checkpoint;
  }
  return summary;
}

TrainedRestorer load_restorer(const fs::path& checkpoint) {
  const auto a = load_archive(checkpoint);
  if (a.meta.value("kind", "") != "rahc") throw IoError(checkpoint.string(), "not a training checkpoint");
  TrainedRestorer t;
  t.net = RestorationNet(net_from_json(a.meta.at("net")));
  get_module(a, "net", *t.net);
  t.net->eval();
  t.book = Codebook(a.at("codebook").clone());
  return t;
}

void run_restore(const RunPaths& paths, const fs::path& input, const fs::path& output) {
  require(paths.final_checkpoint, "train-rahc");
  auto model = load_restorer(paths.final_checkpoint);
  if (fs::is_directory(input)) {
    fs::create_directories(output);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(input))
      if (e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) write_png(output / f.filename(), restore(model.net, read_png(f), model.book));
  } else {
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    write_png(output, restore(model.net, read_png(input), model.book));
  }
}

namespace {

DatasetManifest eval_manifest(const RunConfig& config, const RunPaths& paths) {
  const auto custom = config.text("eval.manifest");
  if (custom.empty()) {
    require(paths.data_manifest, "synth-data");
    return load_manifest(paths.data_manifest);
  }
  fs::path p = custom;
  if (p.is_relative()) p = paths.root / p;
  if (!fs::exists(p)) throw IoError(p.string(), "evaluation manifest not found");
  return load_manifest(p);
}

}  // namespace

EvalReport run_eval(const RunConfig& config, const RunPaths& paths) {
  config.validate();
  const auto manifest = eval_manifest(config, paths);
  const auto model = config.text("eval.model");
  Restorer restorer;
  fs::path dir;
  if (model == "identity") {
    restorer = identity_restorer();
    dir = paths.root / "eval" / "identity";
  } else if (model == "oracle") {
    restorer = oracle_restorer();
    dir = paths.root / "eval" / "oracle";
  } else {
    require(paths.final_checkpoint, "train-rahc");
    auto t = load_restorer(paths.final_checkpoint);
    restorer = network_restorer(t.net, t.book);
    dir = paths.train_dir / "eval";
  }
  auto report = evaluate(restorer, manifest, config.metric_mode());
  write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  write_text(dir / "report.txt", report.to_text());
  config.write(dir / "config.json");
  return report;
}

namespace {

Probe train_heldout_probe(const RunConfig& config) {
  const auto size = config.integer("data.size");
  const auto codes = enumerate_codes();
  const auto seed = config.seed();
  std::vector<Image> images;
  std::vector<WeatherCode> labels;
  for (std::int64_t i = 0; i < config.integer("probe.scenes"); ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const auto clean = make_clean_scene({derive_seed(seed, "probe_scene", idx)}, size, size);
    Rng rng(derive_seed(seed, "probe_code", idx));
    const auto code = codes[rng.uniform_int(0, static_cast<std::int64_t>(codes.size()) - 1)];
    images.push_back(quantize_8bit(compose_condition(clean, code, {derive_seed(seed, "probe_render", idx)})));
    labels.push_back(code);
    images.push_back(quantize_8bit(clean));
    labels.push_back(WeatherCode(0));
  }
  return train_probe(images, labels, config.probe());
}

ProbeReport probe_network(Probe& probe, const DatasetManifest& manifest, TrainedRestorer& model) {
  std::vector<Image> restored, degraded;
  std::vector<WeatherCode> codes;
  for (const auto& p : load_pairs(manifest)) {
    restored.push_back(restore(model.net, p.degraded, model.book));
    degraded.push_back(p.degraded);
    codes.push_back(p.code);
  }
  return detectability_probe(probe, restored, degraded, codes);
}

}  // namespace

ProbeReport run_probe(const RunConfig& config, const RunPaths& paths) {
  config.validate();
  require(paths.final_checkpoint, "train-rahc");
  const auto manifest = eval_manifest(config, paths);
  auto model = load_restorer(paths.final_checkpoint);
  auto probe = train_heldout_probe(config);
  save_probe(paths.probe_dir / "probe.ckpt", probe, config.probe());
  auto report = probe_network(probe, manifest, model);
  write_text(paths.probe_dir / "report.json", report.to_json().dump(2) + "\n");
  write_text(paths.probe_dir / "report.txt", report.to_text());
  config.write(paths.probe_dir / "config.json");
  return report;
}

json SweepReport::to_json() const {
  json j;
  j["parameter"] = parameter;
  j["rows"] = json::array();
  for (const auto& r : rows) {
    json row = {{"value", r.value}, {"ok", r.ok}};
    if (r.ok) {
      row["psnr"] = r.psnr;
      row["ssim"] = r.ssim;
      if (r.probe_restored) row["probe_restored"] = *r.probe_restored;
    } else {
      row["error"] = r.error;
    }
    j["rows"].push_back(row);
  }
  return j;
}

std::string SweepReport::to_text() const {
  std::ostringstream os;
  os << std::fixed;
  os << std::left << std::setw(16) << parameter << std::right << std::setw(10) << "PSNR" << std::setw(9) << "SSIM"
     << std::setw(10) << "probe" << "\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(16) << r.value << std::right;
    if (!r.ok) {
      os << "  failed: " << r.error << "\n";
      continue;
    }
    os << std::setw(10) << std::setprecision(2) << r.psnr << std::setw(9) << std::setprecision(4) << r.ssim;
    if (r.probe_restored)
      os << std::setw(10) << *r.probe_restored;
    else
      os << std::setw(10) << "-";
    os << "\n";
  }
  return os.str();
}

SweepReport run_sweep(const RunConfig& config, const RunPaths& paths, const std::string& parameter,
                      const std::vector<std::string>& values) {
  config.validate();
  (void)config.at(parameter);
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  SweepReport report;
  report.parameter = parameter;
  std::optional<Probe> probe;
  if (config.flag("sweep.probe")) probe = train_heldout_probe(config);
  const auto base_dir = config.text("train.dir");
  for (const auto& value : values) {
    SweepRow row;
    row.value = value;
    try {
      RunConfig run = config;
      run.set(parameter + "=" + value);
      run.set("train.dir", json(base_dir + "/sweep/" + parameter + "=" + value));
      RunPaths run_paths(paths.root, run);
      run_train_rahc(run, run_paths);
      RunConfig eval_config = run;
      eval_config.set("eval.model", json("network"));
      const auto eval = run_eval(eval_config, run_paths);
      row.psnr = eval.psnr;
      row.ssim = eval.ssim;
      if (probe) {
        auto model = load_restorer(run_paths.final_checkpoint);
        row.probe_restored = probe_network(*probe, eval_manifest(run, run_paths), model).restored.suffered_mean;
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  const auto dir = paths.train_dir / "sweep";
  write_text(dir / (parameter + ".json"), report.to_json().dump(2) + "\n");
  write_text(dir / (parameter + ".txt"), report.to_text());
  return report;
}

}  // namespace rahc
