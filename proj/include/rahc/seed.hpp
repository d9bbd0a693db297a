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
#include <random>
#include <string_view>

namespace rahc {

/// Seed for one rendering or training stream. Identical seeds reproduce
/// bit-identical outputs.
struct RenderSeed {
  std::uint64_t value = 0;
  friend bool operator==(RenderSeed, RenderSeed) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives a child seed from a parent seed, a stream tag and an index.
/// All module seeds in a run come from the master seed through this
/// function: child = splitmix64(parent ^ fnv1a(tag) ^ splitmix64(index)).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag,
                          std::uint64_t index = 0);

/// Portable uniform draws on top of mt19937_64 (the std distributions are
/// implementation-defined, so they are avoided for anything persisted).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rahc
