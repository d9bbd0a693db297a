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

#include "../common/test.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "../common/fixtures.hpp"
#include "rahc/cli.hpp"
#include "rahc/error.hpp"
#include "rahc/pipeline.hpp"

using namespace rahc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rahc");
  std::ostringstream out, err;
  const int code = cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Builds data and a VQ checkpoint under `root`.
RunPaths prepare(const fs::path& root, const RunConfig& config) {
  RunPaths paths(root, config);
  run_synth_data(config, paths);
  run_train_vq(config, paths);
  return paths;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    RunConfig c;
    CHECK(c.number("train.lr") == 2e-4);
    CHECK(c.number("train.lr_min") == 1e-6);
    CHECK(c.number("train.lambda_dis") == 0.1);
    CHECK(c.integer("train.total_steps") == 5000);
    CHECK(c.integer("vq.codebook_size") == 512);
    CHECK(c.integer("vq.latent_dim") == 256);
    CHECK(c.number("gan.alpha") == 1.0);
    CHECK(c.number("gan.beta") == 2.0);
    CHECK(c.number("gan.lambda_cls") == 3.0);
    CHECK(c.codes("data.codes").size() == 31);
    CHECK(c.mode() == DiscriminationMode::OutputSpace);
    CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("overrides and errors") {
    RunConfig c;
    c.set("train.lr=0.001");
    CHECK(c.number("train.lr") == 0.001);
    c.set("eval.mode=y");
    CHECK(c.metric_mode() == MetricMode::Y);
    c.set("train.mode=feature");
    CHECK(c.mode() == DiscriminationMode::FeatureLevel);
    CHECK_THROWS_AS(c.set("train.nonsense=1"), ConfigError);
    CHECK_THROWS_AS(c.set("train.lr=\"fast\""), ConfigError);
    CHECK_THROWS_AS(c.set("no_equals_sign"), ConfigError);
    c.set("train.warmup_steps=6000");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    RunConfig d;
    d.set("data.codes=00000");
    CHECK_THROWS_AS(d.validate(), ConfigError);
    RunConfig e;
    e.set("data.codes=10000,00011");
    CHECK((e.codes("data.codes") == std::vector<WeatherCode>{WeatherCode(16), WeatherCode(3)}));
  }

  TEST_CASE("json roundtrip") {
    auto c = testing::tiny_config();
    const auto dir = testing::scratch_dir("config");
    c.write(dir / "c.json");
    const auto back = RunConfig::load(dir / "c.json");
    CHECK(back.values() == c.values());
    CHECK(back.dump() == c.dump());
  }
}

TEST_SUITE("harness") {
  TEST_CASE("cosine schedule") {
    CHECK(std::abs(cosine_lr(0, 5000, 2e-4, 1e-6) - 2e-4) < 1e-9);
    CHECK(std::abs(cosine_lr(4999, 5000, 2e-4, 1e-6) - 1e-6) < 1e-9);
    CHECK(cosine_lr(2500, 5000, 2e-4, 1e-6) < 2e-4);
    double last = 1;
    for (int s = 0; s < 100; ++s) {
      const double lr = cosine_lr(s, 100, 1.0, 0.0);
      const double expected = 0.5 * (1 + std::cos(M_PI * s / 99.0));
      CHECK(std::abs(lr - expected) < 1e-12);
      CHECK(lr <= last);
      last = lr;
    }
    CHECK(cosine_lr(0, 1, 2e-4, 1e-6) == 2e-4);
  }

  TEST_CASE("cli exit codes") {
    const auto root = testing::scratch_dir("cli");
    CHECK(run_cli({"--help"}).code == 0);
    const auto unknown = run_cli({"frobnicate"});
    CHECK(unknown.code == 2);
    const auto bad_flag = run_cli({"eval", "--no-such-flag"});
    CHECK(bad_flag.code == 2);
    const auto missing = run_cli({"train-rahc", "-o", root.string()});
    CHECK(missing.code == 1);
    CHECK(missing.err.rfind("error: ", 0) == 0);
    const auto j = nlohmann::json::parse(missing.err.substr(7));
    CHECK(j["kind"] == "missing_artifact");
    CHECK(j["message"].get<std::string>().find("synth-data") != std::string::npos);
    const auto bad_key = run_cli({"eval", "-o", root.string(), "-s", "train.bogus=3"});
    CHECK(bad_key.code == 1);
    CHECK(bad_key.err.find("config_error") != std::string::npos);
    const auto gen = run_cli({"gen-data", "-o", root.string()});
    CHECK(gen.code == 1);
    CHECK(gen.err.find("train-adversegan") != std::string::npos);
  }

  TEST_CASE("cli pipeline with oracle and identity evaluation") {
    const auto root = testing::scratch_dir("cli_eval");
    const std::vector<std::string> common{"-o", root.string(), "-s", "data.clean_count=6", "-s", "data.size=16",
                                          "-s", "data.layout=cycle"};
    auto with = [&](std::vector<std::string> a) {
      a.insert(a.end(), common.begin(), common.end());
      return run_cli(a);
    };
    REQUIRE(with({"synth-data"}).code == 0);
    const auto oracle = with({"eval", "--model", "oracle"});
    REQUIRE(oracle.code == 0);
    const auto line = oracle.out.substr(oracle.out.rfind('{'));
    CHECK(nlohmann::json::parse(line)["psnr"].get<double>() == kPsnrCap);
    CHECK(fs::exists(root / "eval" / "oracle" / "report.json"));
    const auto identity = with({"eval", "--model", "identity"});
    REQUIRE(identity.code == 0);
    CHECK(nlohmann::json::parse(identity.out.substr(identity.out.rfind('{')))["psnr"].get<double>() < 40.0);
    const auto restore = with({"restore", "-i", (root / "data" / "degraded").string(), "--output",
                               (root / "restored").string()});
    CHECK(restore.code == 1);
    CHECK(restore.err.find("missing_artifact") != std::string::npos);
  }

  TEST_CASE("split training resumes bit-exactly") {
    const auto config = testing::tiny_config();
    const auto root = testing::scratch_dir("resume");
    auto paths = prepare(root / "a", config);
    const auto full = run_train_rahc(config, paths);
    CHECK(full.steps_done == 8);
    CHECK(full.checkpoint == paths.final_checkpoint);
    const auto full_log = slurp(paths.train_log);
    const auto full_ckpt = slurp(paths.final_checkpoint);
    CHECK(full_log.rfind(train_log_header(), 0) == 0);

    fs::create_directories(root / "b");
    fs::copy(root / "a" / "data", root / "b" / "data", fs::copy_options::recursive);
    fs::copy(root / "a" / "vq", root / "b" / "vq", fs::copy_options::recursive);
    RunPaths split(root / "b", config);
    TrainOptions first;
    first.stop_after = 5;
    const auto part = run_train_rahc(config, split, first);
    CHECK(part.steps_done == 5);
    CHECK(fs::exists(split.checkpoint(5)));
    CHECK_FALSE(fs::exists(split.final_checkpoint));
    TrainOptions second;
    second.resume = split.checkpoint(5);
    const auto rest = run_train_rahc(config, split, second);
    CHECK(rest.steps_done == 8);
    CHECK(slurp(split.train_log) == full_log);
    CHECK(slurp(split.final_checkpoint) == full_ckpt);
  }

  TEST_CASE("resume rejects a different architecture") {
    auto config = testing::tiny_config();
    const auto root = testing::scratch_dir("resume_arch");
    auto paths = prepare(root, config);
    TrainOptions opts;
    opts.stop_after = 2;
    run_train_rahc(config, paths, opts);
    auto other = config;
    other.set("net.blocks=[1,1,1,2,1,1,1,1]");
    opts.resume = paths.checkpoint(2);
    opts.stop_after.reset();
    CHECK_THROWS_AS(run_train_rahc(other, RunPaths(root, other), opts), ConfigError);
  }

  TEST_CASE("sweep rows and single-value equivalence") {
    auto config = testing::tiny_config();
    config.set("train.total_steps=4");
    const auto root = testing::scratch_dir("sweep");
    auto paths = prepare(root, config);
    const auto report = run_sweep(config, paths, "train.lambda_dis", {"0.1", "-1", "0"});
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].value == "0.1");
    CHECK(report.rows[0].ok);
    CHECK_FALSE(report.rows[1].ok);
    CHECK_FALSE(report.rows[1].error.empty());
    CHECK(report.rows[2].ok);
    CHECK(fs::exists(paths.train_dir / "sweep" / "train.lambda_dis.json"));

    run_train_rahc(config, paths);
    config.set("eval.model=network");
    const auto plain = run_eval(config, paths);
    CHECK(report.rows[0].psnr == plain.psnr);
    CHECK(report.rows[0].ssim == plain.ssim);
    CHECK_THROWS_AS(run_sweep(config, paths, "train.nope", {"1"}), ConfigError);
  }
}
