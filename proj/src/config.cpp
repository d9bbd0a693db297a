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

#include "rahc/config.hpp"

#include <fstream>
#include <sstream>

#include "rahc/error.hpp"

namespace rahc {

using nlohmann::json;

RunConfig::RunConfig() {
  values_ = json{
      {"seed", 0},
      {"data.dir", "data"},
      {"data.clean_count", 16},
      {"data.size", 64},
      {"data.codes", "all"},
      {"data.layout", "cross"},
      {"data.samples_per_code", 1},
      {"vq.dir", "vq"},
      {"vq.codebook_size", 512},
      {"vq.latent_dim", 256},
      {"vq.base_channels", 16},
      {"vq.commitment", 0.25},
      {"vq.lr", 1e-3},
      {"vq.steps", 2000},
      {"vq.batch_size", 8},
      {"vq.target_psnr", 0.0},
      {"net.base_channels", 32},
      {"net.blocks", {2, 4, 6, 4, 4, 2, 2, 2}},
      {"net.heads", {1, 2, 4, 8}},
      {"net.reduction", 2},
      {"net.mapping_blocks", 2},
      {"net.ffn_expansion", 2},
      {"disc.width", 32},
      {"disc.clean_reference", true},
      {"train.dir", "train"},
      {"train.total_steps", 5000},
      {"train.warmup_steps", 250},
      {"train.batch_size", 4},
      {"train.lr", 2e-4},
      {"train.lr_min", 1e-6},
      {"train.beta1", 0.9},
      {"train.beta2", 0.999},
      {"train.lambda_dis", 0.1},
      {"train.mode", "output"},
      {"train.perceptual", true},
      {"train.log_every", 50},
      {"train.checkpoint_every", 500},
      {"gan.dir", "gan"},
      {"gan.base_channels", 16},
      {"gan.content_dim", 64},
      {"gan.style_dim", 64},
      {"gan.type_dim", 16},
      {"gan.disc_width", 32},
      {"gan.lr", 2e-4},
      {"gan.steps", 500},
      {"gan.batch_size", 16},
      {"gan.image_size", 32},
      {"gan.paired_scenes", 24},
      {"gan.real_scenes", 24},
      {"gan.alpha", 1.0},
      {"gan.beta", 2.0},
      {"gan.lambda_cls", 3.0},
      {"gen.dir", "gen"},
      {"gen.codes", "all"},
      {"gen.layout", "cross"},
      {"gen.samples_per_code", 1},
      {"eval.mode", "rgb"},
      {"eval.model", "network"},
      {"eval.manifest", ""},
      {"probe.dir", "probe"},
      {"probe.scenes", 64},
      {"probe.steps", 400},
      {"probe.batch_size", 8},
      {"probe.lr", 1e-3},
      {"probe.width", 32},
      {"sweep.probe", false},
  };
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) throw ConfigError("nested object under '" + key + "'; use flat dotted keys");
    c.set(key, value);
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open config");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

namespace {

bool same_kind(const json& expected, const json& value) {
  if (expected.is_number()) return value.is_number() && !(expected.is_number_integer() && value.is_number_float());
  return expected.type() == value.type();
}

}  // namespace

void RunConfig::set(const std::string& key, const json& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  if (!same_kind(*it, value))
    throw ConfigError("config key '" + key + "' expects " + std::string(it->type_name()) + ", got " +
                      value.dump());
  if (it->is_array())
    for (const auto& v : value)
      if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' expects integers");
  *it = value;
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const auto key = assignment.substr(0, eq);
  const auto raw = assignment.substr(eq + 1);
  const auto& current = at(key);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded() || (current.is_string() && !value.is_string())) value = raw;
  set(key, value);
}

const json& RunConfig::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return *it;
}

std::int64_t RunConfig::integer(const std::string& key) const { return at(key).get<std::int64_t>(); }
double RunConfig::number(const std::string& key) const { return at(key).get<double>(); }
bool RunConfig::flag(const std::string& key) const { return at(key).get<bool>(); }
std::string RunConfig::text(const std::string& key) const { return at(key).get<std::string>(); }

std::uint64_t RunConfig::seed() const {
  const auto& v = at("seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto s = v.get<std::int64_t>();
  if (s < 0) throw ConfigError("seed must be non-negative");
  return static_cast<std::uint64_t>(s);
}

std::vector<WeatherCode> RunConfig::codes(const std::string& key) const {
  const auto spec = text(key);
  if (spec == "all") return enumerate_codes();
  std::vector<WeatherCode> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto c = WeatherCode::parse(item);
    if (c.is_clean()) throw ConfigError(key + ": code 00000 is not a weather condition");
    out.push_back(c);
  }
  if (out.empty()) throw ConfigError(key + ": no weather codes");
  return out;
}

void RunConfig::validate() const {
  const auto total = integer("train.total_steps");
  const auto warmup = integer("train.warmup_steps");
  if (total < 1) throw ConfigError("train.total_steps must be >= 1");
  if (warmup < 0 || warmup >= total) throw ConfigError("train.warmup_steps must lie in [0, train.total_steps)");
  if (integer("train.batch_size") < 1) throw ConfigError("train.batch_size must be >= 1");
  if (number("train.lr") <= 0 || number("train.lr_min") < 0 || number("train.lr_min") > number("train.lr"))
    throw ConfigError("learning rates must satisfy 0 <= train.lr_min <= train.lr, train.lr > 0");
  if (number("train.lambda_dis") < 0) throw ConfigError("train.lambda_dis must be >= 0");
  if (integer("train.log_every") < 1 || integer("train.checkpoint_every") < 1)
    throw ConfigError("train.log_every and train.checkpoint_every must be >= 1");
  const auto size = integer("data.size");
  if (size < 16 || size % kDownsample != 0) throw ConfigError("data.size must be a multiple of 8 and >= 16");
  if (integer("data.clean_count") < 1) throw ConfigError("data.clean_count must be >= 1");
  for (const auto* key : {"data.layout", "gen.layout"}) {
    const auto v = text(key);
    if (v != "cross" && v != "cycle") throw ConfigError(std::string(key) + " must be cross or cycle");
  }
  const auto model = text("eval.model");
  if (model != "network" && model != "identity" && model != "oracle")
    throw ConfigError("eval.model must be network, identity or oracle");
  (void)mode();
  (void)metric_mode();
  (void)codes("data.codes");
  (void)codes("gen.codes");
  (void)seed();
  network(integer("vq.latent_dim")).validate();
}

VqConfig RunConfig::vq() const {
  VqConfig c;
  c.codebook_size = integer("vq.codebook_size");
  c.latent_dim = integer("vq.latent_dim");
  c.base_channels = integer("vq.base_channels");
  c.commitment = number("vq.commitment");
  c.learning_rate = number("vq.lr");
  c.steps = static_cast<int>(integer("vq.steps"));
  c.batch_size = static_cast<int>(integer("vq.batch_size"));
  c.target_psnr = number("vq.target_psnr");
  c.seed = derive_seed(seed(), "vq");
  return c;
}

NetworkConfig RunConfig::network(std::int64_t latent_dim) const {
  NetworkConfig c;
  c.base_channels = integer("net.base_channels");
  const auto blocks = at("net.blocks");
  const auto heads = at("net.heads");
  if (blocks.size() != 8) throw ConfigError("net.blocks needs 8 entries");
  if (heads.size() != 4) throw ConfigError("net.heads needs 4 entries");
  for (int i = 0; i < 8; ++i) c.block_counts[i] = blocks[i].get<int>();
  for (int i = 0; i < 4; ++i) c.heads[i] = heads[i].get<int>();
  c.reduction = integer("net.reduction");
  c.mapping_blocks = static_cast<int>(integer("net.mapping_blocks"));
  c.ffn_expansion = integer("net.ffn_expansion");
  c.latent_dim = latent_dim;
  return c;
}

GanConfig RunConfig::gan() const {
  GanConfig c;
  c.base_channels = integer("gan.base_channels");
  c.content_dim = integer("gan.content_dim");
  c.style_dim = integer("gan.style_dim");
  c.type_dim = integer("gan.type_dim");
  c.disc_width = integer("gan.disc_width");
  c.learning_rate = number("gan.lr");
  c.steps = static_cast<int>(integer("gan.steps"));
  c.batch_size = static_cast<int>(integer("gan.batch_size"));
  c.image_size = integer("gan.image_size");
  c.paired_scenes = static_cast<int>(integer("gan.paired_scenes"));
  c.real_scenes = static_cast<int>(integer("gan.real_scenes"));
  c.weights = {number("gan.alpha"), number("gan.beta"), number("gan.lambda_cls")};
  c.seed = derive_seed(seed(), "gan");
  return c;
}

ProbeConfig RunConfig::probe() const {
  ProbeConfig c;
  c.width = integer("probe.width");
  c.steps = static_cast<int>(integer("probe.steps"));
  c.batch_size = static_cast<int>(integer("probe.batch_size"));
  c.learning_rate = number("probe.lr");
  c.seed = derive_seed(seed(), "probe");
  return c;
}

DiscriminationMode RunConfig::mode() const {
  const auto m = text("train.mode");
  if (m == "output") return DiscriminationMode::OutputSpace;
  if (m == "feature") return DiscriminationMode::FeatureLevel;
  throw ConfigError("train.mode must be output or feature");
}

MetricMode RunConfig::metric_mode() const { return metric_mode_from_name(text("eval.mode")); }

std::string RunConfig::dump() const { return values_.dump(2); }

void RunConfig::write(const std::filesystem::path& path) const {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot write config");
  out << dump() << "\n";
}

}  // namespace rahc
