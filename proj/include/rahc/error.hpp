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

#include <stdexcept>
#include <string>

namespace rahc {

// Base for every error the library raises. `kind()` is the stable,
// machine-readable tag the CLI prints in its error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error("shape_error", m) {}
};
struct ParamError : Error {
  explicit ParamError(const std::string& m) : Error("param_error", m) {}
};
struct InvalidCodeError : Error {
  explicit InvalidCodeError(const std::string& m) : Error("invalid_code", m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("config_error", m) {}
};
struct IoError : Error {
  IoError(const std::string& path, const std::string& m)
      : Error("io_error", path + ": " + m), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};
struct DivergenceError : Error {
  DivergenceError(long step, const std::string& m)
      : Error("divergence", "step " + std::to_string(step) + ": " + m), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};
struct StateError : Error {
  explicit StateError(const std::string& m) : Error("state_error", m) {}
};
struct MissingArtifactError : Error {
  MissingArtifactError(const std::string& path, const std::string& producer)
      : Error("missing_artifact",
              path + " not found; produce it with `rahc " + producer + "`"),
        producer_(producer) {}
  const std::string& producer() const noexcept { return producer_; }

 private:
  std::string producer_;
};

}  // namespace rahc
