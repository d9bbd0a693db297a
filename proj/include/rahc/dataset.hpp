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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rahc/image.hpp"
#include "rahc/seed.hpp"
#include "rahc/weather.hpp"

namespace rahc {

/// One clean/degraded pair. Paths are relative to the manifest directory.
struct ManifestRecord {
  std::string clean;
  std::string degraded;
  WeatherCode code;
  std::uint64_t seed = 0;
  /// Per-stage latent seeds, present for generator-produced records.
  std::vector<std::uint64_t> stage_seeds;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

/// Ordered list of records plus the directory their paths are relative to.
/// Serialised as JSON lines with keys clean, degraded, code (bitstring) and
/// seed (decimal string).
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestRecord> records;

  std::filesystem::path resolve(const std::string& rel) const { return root / rel; }
  std::size_t size() const { return records.size(); }
};

std::string to_jsonl(const DatasetManifest& manifest);
DatasetManifest parse_jsonl(const std::string& text, const std::filesystem::path& root);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
/// Records resolve relative to the manifest file's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Produces a degraded image for (clean, code, seed); may append per-stage
/// seeds to the record.
using Degrader = std::function<Image(const Image& clean, WeatherCode code, RenderSeed seed,
                                     std::vector<std::uint64_t>& stage_seeds)>;

/// The analytic compositor.
Degrader analytic_degrader();

/// Writes `count` procedural clean scenes under `root/clean/` and returns
/// their manifest-relative paths.
std::vector<std::string> synth_cleans(const std::filesystem::path& root, int count, std::int64_t height,
                                      std::int64_t width, RenderSeed seed);

/// Degrades every clean image under every code `samples_per_code` times.
/// Record order is (clean, code, sample) in input order; record i uses
/// seed derive_seed(master, "record", i). Degraded images are quantised to
/// 8 bits and written under `root/degraded/`.
DatasetManifest build_dataset(const std::filesystem::path& root, const std::vector<std::string>& cleans,
                              const std::vector<WeatherCode>& codes, int samples_per_code,
                              RenderSeed master_seed, const Degrader& degrade = analytic_degrader());

/// One record per clean image; image i gets codes[i % codes.size()].
DatasetManifest build_cycled_dataset(const std::filesystem::path& root, const std::vector<std::string>& cleans,
                                     const std::vector<WeatherCode>& codes, RenderSeed master_seed,
                                     const Degrader& degrade = analytic_degrader());

/// Images of a record, loaded from disk.
struct Pair {
  Image clean;
  Image degraded;
  WeatherCode code;
};
Pair load_pair(const DatasetManifest& manifest, const ManifestRecord& record);
std::vector<Pair> load_pairs(const DatasetManifest& manifest);

}  // namespace rahc
