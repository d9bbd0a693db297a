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

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <string>

namespace rahc {

/// Named tensors plus JSON metadata, written as a versioned binary file:
///   "RAHCCKPT" | u32 version | u64 meta length | meta JSON |
///   u32 tensor count | per tensor: u32 name length, name, u8 dtype,
///   u32 rank, i64 dims[rank], raw little-endian data.
/// Tensors are stored in name order, so equal contents give equal bytes.
struct TensorArchive {
  static constexpr std::uint32_t kFormatVersion = 1;

  nlohmann::json meta = nlohmann::json::object();
  std::map<std::string, torch::Tensor> tensors;

  const torch::Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const { return tensors.count(name) != 0; }
};

std::string serialize(const TensorArchive& archive);
TensorArchive deserialize(const std::string& bytes, const std::string& origin = "<memory>");
void save_archive(const std::filesystem::path& path, const TensorArchive& archive);
TensorArchive load_archive(const std::filesystem::path& path);

/// Parameters and buffers of `module` under "<prefix>.<name>".
void put_module(TensorArchive& archive, const std::string& prefix, const torch::nn::Module& module);
/// Copies stored values into `module`; shapes must match exactly.
void get_module(const TensorArchive& archive, const std::string& prefix, torch::nn::Module& module);

/// Adam moments and step counts, keyed by parameter position.
void put_adam(TensorArchive& archive, const std::string& prefix, torch::optim::Adam& optimizer);
void get_adam(const TensorArchive& archive, const std::string& prefix, torch::optim::Adam& optimizer);

}  // namespace rahc
