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
#include <json.hpp>
#include <string>
#include <vector>

#include "rahc/adversegan.hpp"
#include "rahc/eval.hpp"
#include "rahc/network.hpp"
#include "rahc/training.hpp"
#include "rahc/vq.hpp"

namespace rahc {

/// Flat dotted-key configuration ("train.lr", "vq.steps", ...). Every key
/// has a default; unknown keys and type mismatches raise ConfigError.
class RunConfig {
 public:
  RunConfig();

  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_json(const nlohmann::json& j);

  /// Applies "key=value". The value is parsed as JSON, falling back to a
  /// plain string for string-typed keys.
  void set(const std::string& assignment);
  void set(const std::string& key, const nlohmann::json& value);

  const nlohmann::json& values() const { return values_; }
  const nlohmann::json& at(const std::string& key) const;

  std::int64_t integer(const std::string& key) const;
  double number(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;

  std::uint64_t seed() const;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  VqConfig vq() const;
  NetworkConfig network(std::int64_t latent_dim) const;
  GanConfig gan() const;
  ProbeConfig probe() const;
  DiscriminationMode mode() const;
  MetricMode metric_mode() const;
  std::vector<WeatherCode> codes(const std::string& key) const;

  /// Pretty-printed, key-sorted JSON.
  std::string dump() const;
  void write(const std::filesystem::path& path) const;

 private:
  nlohmann::json values_;
};

}  // namespace rahc
