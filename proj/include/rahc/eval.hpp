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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "rahc/dataset.hpp"
#include "rahc/metrics.hpp"
#include "rahc/network.hpp"
#include "rahc/training.hpp"

namespace rahc {

/// Maps a loaded pair to a restored image. Only the oracle looks at the
/// clean image.
using Restorer = std::function<Image(const Pair& pair)>;

Restorer identity_restorer();
Restorer oracle_restorer();
Restorer network_restorer(RestorationNet net, Codebook book);

struct RecordMetrics {
  std::size_t index;
  WeatherCode code;
  double psnr, ssim;
};

struct CodeMetrics {
  WeatherCode code;
  int count;
  double psnr, ssim;
};

/// Arithmetic mean over the member codes' means; `codes` counts the
/// member codes present in the manifest.
struct GroupMetrics {
  std::string name;
  int codes = 0;
  double psnr = 0, ssim = 0;
};

struct EvalFailure {
  std::size_t index;
  std::string path;
  std::string message;
};

struct EvalReport {
  MetricMode mode = MetricMode::Rgb;
  std::vector<RecordMetrics> records;
  std::vector<CodeMetrics> codes;  // ascending code order
  std::array<GroupMetrics, kNumWeathers> groups;
  /// Mean of the group means over the groups present.
  double psnr = 0, ssim = 0;
  std::vector<EvalFailure> failures;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Runs `restore` over every record in manifest order. Records whose files
/// cannot be read are listed in `failures` and skipped.
EvalReport evaluate(const Restorer& restore, const DatasetManifest& manifest, MetricMode mode = MetricMode::Rgb);

/// Aggregates already-computed record metrics (exposed for recomputation).
EvalReport summarize(std::vector<RecordMetrics> records, MetricMode mode);

struct ProbeConfig {
  std::int64_t width = 32;
  int steps = 400;
  int batch_size = 8;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

/// Independently trained multilabel weather classifier.
struct Probe {
  WeatherDiscriminator classifier{nullptr};
  bool trained = false;
};

/// Trains on (image, code) samples; clean images carry the zero code.
Probe train_probe(const std::vector<Image>& images, const std::vector<WeatherCode>& codes,
                  const ProbeConfig& config);

void save_probe(const std::filesystem::path& path, Probe& probe, const ProbeConfig& config);
Probe load_probe(const std::filesystem::path& path);

struct ProbeSetStats {
  std::array<double, kNumWeathers> class_mean{};  // mean probability per class
  double all_mean = 0;       // mean over images of the five-class mean
  double suffered_mean = 0;  // mean probability of the classes actually present
};

/// The headline number is `suffered_mean`: the average probability the probe
/// assigns to the degradations the input suffered.
struct ProbeReport {
  ProbeSetStats restored, degraded;
  std::size_t count = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// restored[i] and degraded[i] come from the same record with code codes[i].
/// Throws StateError for an untrained probe.
ProbeReport detectability_probe(Probe& probe, const std::vector<Image>& restored,
                                const std::vector<Image>& degraded, const std::vector<WeatherCode>& codes);

}  // namespace rahc
