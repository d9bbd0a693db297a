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

#include "rahc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include "rahc/error.hpp"
#include "rahc/pipeline.hpp"

namespace rahc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_root;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "JSON config with flat dotted keys");
  cmd->add_option("-s,--set", c.overrides, "Override a config value (key=value); repeatable");
  cmd->add_option("-o,--out", c.out_root, "Output root (default: $RAHC_OUTPUT_ROOT or ./rahc_out)");
}

RunConfig resolve(const Common& c) {
  RunConfig config = c.config_path.empty() ? RunConfig() : RunConfig::load(c.config_path);
  for (const auto& o : c.overrides) config.set(o);
  config.validate();
  return config;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << "error: " << json{{"kind", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid adverse-weather restoration toolkit", "rahc"};
  app.require_subcommand(1);
  Common common;

  auto* synth = app.add_subcommand("synth-data", "Render clean scenes and analytically degraded pairs");
  auto* train_vq = app.add_subcommand("train-vq", "Train the VQ autoencoder and export its codebook");
  auto* train_gan = app.add_subcommand("train-adversegan", "Train the toy weather generator");
  auto* gen = app.add_subcommand("gen-data", "Build a dataset with the trained generator");
  auto* train = app.add_subcommand("train-rahc", "Train the restoration network");
  auto* restore_cmd = app.add_subcommand("restore", "Restore a PNG file or a directory of PNGs");
  auto* eval = app.add_subcommand("eval", "Evaluate PSNR/SSIM grouped by weather multiplicity");
  auto* probe = app.add_subcommand("probe", "Run the degradation-detectability probe");
  auto* sweep = app.add_subcommand("sweep", "Train and evaluate once per value of a config key");
  for (auto* cmd : {synth, train_vq, train_gan, gen, train, restore_cmd, eval, probe, sweep}) add_common(cmd, common);

  std::string interp_grid;
  gen->add_option("--interp-grid", interp_grid, "Write a style/content interpolation grid PNG");
  std::string resume;
  std::int64_t stop_after = -1;
  train->add_option("--resume", resume, "Continue from a training checkpoint");
  train->add_option("--stop-after", stop_after, "Stop after this many completed steps");
  std::string input, output;
  restore_cmd->add_option("-i,--input", input, "Input PNG or directory")->required();
  restore_cmd->add_option("--output", output, "Output PNG or directory")->required();
  std::string model;
  eval->add_option("--model", model, "network, identity or oracle (overrides eval.model)");
  std::string param;
  std::vector<std::string> values;
  sweep->add_option("--param", param, "Config key to sweep")->required();
  sweep->add_option("--values", values, "Values, comma separated")->required()->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    auto config = resolve(common);
    if (!model.empty()) config.set("eval.model", json(model));
    const RunPaths paths(output_root(common.out_root), config);
    json summary;
    if (*synth) {
      const auto m = run_synth_data(config, paths);
      summary = {{"manifest", paths.data_manifest.string()}, {"records", m.size()}};
    } else if (*train_vq) {
      const auto s = run_train_vq(config, paths);
      summary = {{"checkpoint", paths.vq_checkpoint.string()}, {"steps", s.steps}, {"psnr", s.psnr}};
    } else if (*train_gan) {
      const auto s = run_train_adversegan(config, paths);
      summary = {{"checkpoint", paths.gan_checkpoint.string()}, {"steps", s.log.size()},
                 {"realism_type_accuracy", s.realism_accuracy}};
    } else if (*gen) {
      std::optional<fs::path> grid;
      if (!interp_grid.empty()) grid = interp_grid;
      const auto m = run_gen_data(config, paths, grid);
      summary = {{"manifest", paths.gen_manifest.string()}, {"records", m.size()}};
    } else if (*train) {
      TrainOptions opts;
      if (!resume.empty()) opts.resume = resume;
      if (stop_after >= 0) opts.stop_after = stop_after;
      const auto s = run_train_rahc(config, paths, opts);
      summary = {{"checkpoint", s.checkpoint.string()}, {"steps", s.steps_done}};
    } else if (*restore_cmd) {
      run_restore(paths, input, output);
      summary = {{"output", output}};
    } else if (*eval) {
      const auto r = run_eval(config, paths);
      out << r.to_text();
      summary = {{"psnr", r.psnr}, {"ssim", r.ssim}, {"records", r.records.size()},
                 {"failures", r.failures.size()}};
    } else if (*probe) {
      const auto r = run_probe(config, paths);
      out << r.to_text();
      summary = {{"restored", r.restored.suffered_mean}, {"degraded", r.degraded.suffered_mean}};
    } else if (*sweep) {
      const auto r = run_sweep(config, paths, param, values);
      out << r.to_text();
      summary = r.to_json();
    }
    out << summary.dump() << "\n";
    return 0;
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what());
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
  }
  return 1;
}

}  // namespace rahc
