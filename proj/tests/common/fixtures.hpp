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

#include <filesystem>
#include <string>

#include "rahc/config.hpp"

namespace rahc::testing {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rahc_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// A pipeline small enough to train in seconds.
inline RunConfig tiny_config() {
  RunConfig c;
  for (const char* kv : {"data.clean_count=16", "data.size=32", "data.layout=cycle",
                         "data.codes=10000,01000,00100,00010,00001,11000,00110,10101", "vq.codebook_size=16",
                         "vq.latent_dim=8", "vq.base_channels=4", "vq.steps=20", "vq.batch_size=4",
                         "net.base_channels=4", "net.blocks=[1,1,1,1,1,1,1,1]", "net.mapping_blocks=1",
                         "disc.width=8", "train.total_steps=8", "train.warmup_steps=2", "train.batch_size=2",
                         "train.log_every=2", "train.checkpoint_every=4", "train.perceptual=false"})
    c.set(kv);
  c.validate();
  return c;
}

}  // namespace rahc::testing
