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
#include <optional>
#include <string>
#include <vector>

#include "rahc/config.hpp"
#include "rahc/dataset.hpp"
#include "rahc/eval.hpp"

namespace rahc {

/// lr(s) = min + (max - min) * (1 + cos(pi * s / (T - 1))) / 2, so lr(0) = max
/// and lr(T - 1) = min.
double cosine_lr(std::int64_t step, std::int64_t total_steps, double lr_max, double lr_min);

/// Artifact locations under an output root. Subdirectories come from the
/// "*.dir" config keys.
struct RunPaths {
  std::filesystem::path root;
  std::filesystem::path data_manifest, vq_checkpoint, codebook, gan_checkpoint, gen_manifest;
  std::filesystem::path train_dir, final_checkpoint, train_log, probe_dir;

  RunPaths(const std::filesystem::path& root, const RunConfig& config);
  std::filesystem::path checkpoint(std::int64_t step) const;
};

/// Output root: the explicit argument if non-empty, else $RAHC_OUTPUT_ROOT,
/// else "rahc_out".
std::filesystem::path output_root(const std::string& explicit_root = "");

/// Writes the clean scenes and the analytically degraded pairs.
DatasetManifest run_synth_data(const RunConfig& config, const RunPaths& paths);

struct VqRunSummary {
  double psnr = 0;  // mean reconstruction PSNR over the training images
  int steps = 0;
};
VqRunSummary run_train_vq(const RunConfig& config, const RunPaths& paths);

struct GanRunSummary {
  std::vector<GanLogRow> log;
  double realism_accuracy = 0;
};
GanRunSummary run_train_adversegan(const RunConfig& config, const RunPaths& paths);

/// Builds the generator-produced manifest; optionally writes an
/// interpolation grid for the first clean image.
DatasetManifest run_gen_data(const RunConfig& config, const RunPaths& paths,
                             const std::optional<std::filesystem::path>& interp_grid = std::nullopt);

struct TrainLogRow {
  std::int64_t step;
  std::string phase;  // "warmup" or "joint"
  LossReport report;
  double disc_loss;
  double lr;
};

std::string train_log_header();
std::string format_log_row(const TrainLogRow& row);

struct TrainOptions {
  /// Checkpoint to continue from.
  std::optional<std::filesystem::path> resume;
  /// Stop after this many completed steps (for split runs); a checkpoint is
  /// always written at the stopping point.
  std::optional<std::int64_t> stop_after;
};

struct TrainSummary {
  std::int64_t steps_done = 0;
  std::filesystem::path checkpoint;
  std::vector<TrainLogRow> log;  // rows written by this and earlier segments
};

/// Mapping-only warmup, then joint adversarial training, with a cosine
/// learning-rate schedule, CSV logs and periodic checkpoints.
TrainSummary run_train_rahc(const RunConfig& config, const RunPaths& paths, const TrainOptions& options = {});

/// Trained restorer loaded from a training checkpoint.
struct TrainedRestorer {
  RestorationNet net{nullptr};
  Codebook book;
};
TrainedRestorer load_restorer(const std::filesystem::path& checkpoint);

void run_restore(const RunPaths& paths, const std::filesystem::path& input, const std::filesystem::path& output);

/// model: "network", "identity" or "oracle" (eval.model). Writes
/// eval_report.json / eval_report.txt into the training directory.
EvalReport run_eval(const RunConfig& config, const RunPaths& paths);

/// Trains the probe on separately generated held-out pairs (plus their clean
/// scenes) and compares network outputs against degraded inputs on the
/// dataset manifest.
ProbeReport run_probe(const RunConfig& config, const RunPaths& paths);

struct SweepRow {
  std::string value;  // JSON text of the swept value
  bool ok = false;
  double psnr = 0, ssim = 0;
  std::optional<double> probe_restored;
  std::string error;
};

struct SweepReport {
  std::string parameter;
  std::vector<SweepRow> rows;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// One seeded train + eval per value in the given order, each in its own
/// subdirectory. A failing run is recorded and the sweep continues.
SweepReport run_sweep(const RunConfig& config, const RunPaths& paths, const std::string& parameter,
                      const std::vector<std::string>& values);

}  // namespace rahc
