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

#include "rahc/eval.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "rahc/archive.hpp"
#include "rahc/error.hpp"
#include "rahc/losses.hpp"

namespace rahc {

Restorer identity_restorer() {
  return [](const Pair& p) { return p.degraded; };
}

Restorer oracle_restorer() {
  return [](const Pair& p) { return p.clean; };
}

Restorer network_restorer(RestorationNet net, Codebook book) {
  net->eval();
  return [net, book](const Pair& p) mutable { return restore(net, p.degraded, book); };
}

EvalReport summarize(std::vector<RecordMetrics> records, MetricMode mode) {
  EvalReport r;
  r.mode = mode;
  r.records = std::move(records);
  std::map<int, CodeMetrics> by_code;
  for (const auto& rec : r.records) {
    auto [it, fresh] = by_code.try_emplace(rec.code.value(), CodeMetrics{rec.code, 0, 0.0, 0.0});
    it->second.count += 1;
    it->second.psnr += rec.psnr;
    it->second.ssim += rec.ssim;
  }
  for (int g = 0; g < kNumWeathers; ++g) r.groups[g].name = std::string(kGroupNames[g]);
  for (auto& [value, cm] : by_code) {
    cm.psnr /= cm.count;
    cm.ssim /= cm.count;
    r.codes.push_back(cm);
    auto& g = r.groups[cm.code.popcount() - 1];
    g.codes += 1;
    g.psnr += cm.psnr;
    g.ssim += cm.ssim;
  }
  int present = 0;
  for (auto& g : r.groups) {
    if (g.codes == 0) continue;
    g.psnr /= g.codes;
    g.ssim /= g.codes;
    r.psnr += g.psnr;
    r.ssim += g.ssim;
    ++present;
  }
  if (present > 0) {
    r.psnr /= present;
    r.ssim /= present;
  }
  return r;
}

EvalReport evaluate(const Restorer& restore_fn, const DatasetManifest& manifest, MetricMode mode) {
  std::vector<RecordMetrics> records;
  std::vector<EvalFailure> failures;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& rec = manifest.records[i];
    Pair pair;
    try {
      pair = load_pair(manifest, rec);
    } catch (const IoError& e) {
      failures.push_back({i, e.path(), e.what()});
      continue;
    }
    const auto out = restore_fn(pair);
    records.push_back({i, rec.code, psnr(out, pair.clean, mode), ssim(out, pair.clean, mode)});
  }
  auto report = summarize(std::move(records), mode);
  report.failures = std::move(failures);
  return report;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["mode"] = std::string(metric_mode_name(mode));
  j["codes"] = nlohmann::json::array();
  for (const auto& c : codes)
    j["codes"].push_back({{"code", c.code.str()}, {"count", c.count}, {"psnr", c.psnr}, {"ssim", c.ssim}});
  j["groups"] = nlohmann::json::array();
  for (const auto& g : groups)
    j["groups"].push_back({{"name", g.name}, {"codes", g.codes}, {"psnr", g.psnr}, {"ssim", g.ssim}});
  j["average"] = {{"psnr", psnr}, {"ssim", ssim}};
  j["records"] = records.size();
  j["failures"] = nlohmann::json::array();
  for (const auto& f : failures)
    j["failures"].push_back({{"index", f.index}, {"path", f.path}, {"message", f.message}});
  return j;
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << std::fixed;
  os << std::left << std::setw(12) << "group" << std::setw(8) << "code" << std::right << std::setw(7) << "n"
     << std::setw(10) << "PSNR" << std::setw(9) << "SSIM" << "\n";
  for (int g = 0; g < kNumWeathers; ++g) {
    if (groups[g].codes == 0) continue;
    for (const auto& c : codes) {
      if (c.code.popcount() != g + 1) continue;
      os << std::left << std::setw(12) << groups[g].name << std::setw(8) << c.code.str() << std::right
         << std::setw(7) << c.count << std::setw(10) << std::setprecision(2) << c.psnr << std::setw(9)
         << std::setprecision(4) << c.ssim << "\n";
    }
    os << std::left << std::setw(12) << groups[g].name << std::setw(8) << "mean" << std::right << std::setw(7)
       << groups[g].codes << std::setw(10) << std::setprecision(2) << groups[g].psnr << std::setw(9)
       << std::setprecision(4) << groups[g].ssim << "\n";
  }
  os << std::left << std::setw(12) << "Average" << std::setw(8) << "" << std::right << std::setw(7) << ""
     << std::setw(10) << std::setprecision(2) << psnr << std::setw(9) << std::setprecision(4) << ssim << "\n";
  for (const auto& f : failures) os << "failed record " << f.index << ": " << f.message << "\n";
  return os.str();
}

Probe train_probe(const std::vector<Image>& images, const std::vector<WeatherCode>& codes,
                  const ProbeConfig& config) {
  if (images.empty() || images.size() != codes.size())
    throw ParamError("probe training needs one code per image");
  if (config.steps <= 0 || config.batch_size <= 0) throw ParamError("probe steps and batch_size must be positive");
  torch::manual_seed(derive_seed(config.seed, "probe_init"));
  Probe probe{WeatherDiscriminator(3, config.width), false};
  torch::optim::Adam opt(probe.classifier->parameters(), torch::optim::AdamOptions(config.learning_rate));
  const auto n = static_cast<std::int64_t>(images.size());
  for (int step = 0; step < config.steps; ++step) {
    Rng rng(derive_seed(config.seed, "probe_step", step));
    std::vector<Image> batch;
    std::vector<WeatherCode> labels;
    for (int b = 0; b < config.batch_size; ++b) {
      const auto i = rng.uniform_int(0, n - 1);
      batch.push_back(images[i]);
      labels.push_back(codes[i]);
    }
    auto loss = loss_discriminator(probe.classifier->forward(to_batch(batch)), labels_tensor(labels));
    if (!std::isfinite(loss.item<double>())) throw DivergenceError(step, "non-finite probe loss");
    opt.zero_grad();
    loss.backward();
    opt.step();
  }
  probe.classifier->eval();
  probe.trained = true;
  return probe;
}

void save_probe(const std::filesystem::path& path, Probe& probe, const ProbeConfig& config) {
  if (!probe.trained) throw StateError("probe has not been trained");
  TensorArchive a;
  a.meta["kind"] = "probe";
  a.meta["width"] = config.width;
  put_module(a, "classifier", *probe.classifier);
  save_archive(path, a);
}

Probe load_probe(const std::filesystem::path& path) {
  const auto a = load_archive(path);
  if (a.meta.value("kind", "") != "probe") throw IoError(path.string(), "not a probe checkpoint");
  Probe p{WeatherDiscriminator(3, a.meta.at("width").get<std::int64_t>()), true};
  get_module(a, "classifier", *p.classifier);
  p.classifier->eval();
  return p;
}

namespace {

ProbeSetStats probe_stats(Probe& probe, const std::vector<Image>& images, const std::vector<WeatherCode>& codes) {
  torch::NoGradGuard guard;
  ProbeSetStats s;
  const std::size_t chunk = 16;
  double suffered = 0.0, all = 0.0;
  for (std::size_t start = 0; start < images.size(); start += chunk) {
    const auto end = std::min(images.size(), start + chunk);
    std::vector<Image> part(images.begin() + start, images.begin() + end);
    auto p = probe.classifier->forward(to_batch(part)).to(torch::kFloat64);
    for (std::size_t i = start; i < end; ++i) {
      const auto row = p[static_cast<std::int64_t>(i - start)];
      double sum = 0.0, hit = 0.0;
      for (int k = 0; k < kNumWeathers; ++k) {
        const double v = row[k].item<double>();
        s.class_mean[k] += v;
        sum += v;
        if (codes[i].has(static_cast<Weather>(k))) hit += v;
      }
      all += sum / kNumWeathers;
      suffered += codes[i].popcount() > 0 ? hit / codes[i].popcount() : 0.0;
    }
  }
  const double n = static_cast<double>(images.size());
  for (auto& v : s.class_mean) v /= n;
  s.all_mean = all / n;
  s.suffered_mean = suffered / n;
  return s;
}

void put_stats(nlohmann::json& j, const ProbeSetStats& s) {
  j["suffered_mean"] = s.suffered_mean;
  j["all_mean"] = s.all_mean;
  for (int k = 0; k < kNumWeathers; ++k)
    j["class_mean"][std::string(weather_name(static_cast<Weather>(k)))] = s.class_mean[k];
}

}  // namespace

ProbeReport detectability_probe(Probe& probe, const std::vector<Image>& restored,
                                const std::vector<Image>& degraded, const std::vector<WeatherCode>& codes) {
  if (!probe.trained || probe.classifier.is_empty()) throw StateError("probe has not been trained");
  if (restored.empty() || restored.size() != degraded.size() || restored.size() != codes.size())
    throw ParamError("probe sets must be non-empty and aligned with the codes");
  ProbeReport r;
  r.count = restored.size();
  r.restored = probe_stats(probe, restored, codes);
  r.degraded = probe_stats(probe, degraded, codes);
  return r;
}

nlohmann::json ProbeReport::to_json() const {
  nlohmann::json j;
  j["count"] = count;
  put_stats(j["restored"], restored);
  put_stats(j["degraded"], degraded);
  return j;
}

std::string ProbeReport::to_text() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << std::left << std::setw(10) << "set" << std::right << std::setw(10) << "suffered" << std::setw(10) << "all";
  for (auto w : kWeatherOrder) os << std::setw(12) << weather_name(w);
  os << "\n";
  for (const auto* s : {&restored, &degraded}) {
    os << std::left << std::setw(10) << (s == &restored ? "restored" : "degraded") << std::right << std::setw(10)
       << s->suffered_mean << std::setw(10) << s->all_mean;
    for (double v : s->class_mean) os << std::setw(12) << v;
    os << "\n";
  }
  return os.str();
}

}  // namespace rahc
