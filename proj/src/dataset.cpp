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

#include "rahc/dataset.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "rahc/error.hpp"
#include "rahc/synthesis.hpp"

namespace rahc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_jsonl(const DatasetManifest& manifest) {
  std::string out;
  for (const auto& r : manifest.records) {
    json j = json::object();
    j["clean"] = r.clean;
    j["degraded"] = r.degraded;
    j["code"] = r.code.str();
    j["seed"] = std::to_string(r.seed);
    if (!r.stage_seeds.empty()) {
      json stages = json::array();
      for (auto s : r.stage_seeds) stages.push_back(std::to_string(s));
      j["stage_seeds"] = stages;
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

DatasetManifest parse_jsonl(const std::string& text, const fs::path& root) {
  DatasetManifest m;
  m.root = root;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      ManifestRecord r;
      r.clean = j.at("clean").get<std::string>();
      r.degraded = j.at("degraded").get<std::string>();
      r.code = WeatherCode::parse(j.at("code").get<std::string>());
      r.seed = std::stoull(j.at("seed").get<std::string>());
      if (j.contains("stage_seeds"))
        for (const auto& s : j["stage_seeds"]) r.stage_seeds.push_back(std::stoull(s.get<std::string>()));
      m.records.push_back(std::move(r));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw ParamError("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << to_jsonl(manifest);
  if (!out) throw IoError(path.string(), "write failed");
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open manifest");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_jsonl(buf.str(), path.parent_path());
}

Degrader analytic_degrader() {
  return [](const Image& clean, WeatherCode code, RenderSeed seed, std::vector<std::uint64_t>&) {
    return compose_condition(clean, code, seed);
  };
}

std::vector<std::string> synth_cleans(const fs::path& root, int count, std::int64_t height,
                                      std::int64_t width, RenderSeed seed) {
  if (count < 1) throw ParamError("clean image count must be >= 1");
  fs::create_directories(root / "clean");
  std::vector<std::string> paths;
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "clean/%05d.png", i);
    const auto img = make_clean_scene(RenderSeed{derive_seed(seed.value, "clean", i)}, height, width);
    write_png(root / name, img);
    paths.emplace_back(name);
  }
  return paths;
}

namespace {

struct Job {
  std::string clean;
  WeatherCode code;
  int sample;
};

DatasetManifest run_jobs(const fs::path& root, const std::vector<Job>& jobs, RenderSeed master_seed,
                         const Degrader& degrade) {
  std::error_code ec;
  fs::create_directories(root / "degraded", ec);
  if (ec) throw IoError((root / "degraded").string(), ec.message());
  DatasetManifest manifest;
  manifest.root = root;
  std::string loaded_rel;
  Image clean;
  for (std::uint64_t index = 0; index < jobs.size(); ++index) {
    const auto& job = jobs[index];
    if (job.clean != loaded_rel) {
      clean = read_png(root / job.clean);
      loaded_rel = job.clean;
    }
    ManifestRecord r;
    r.clean = job.clean;
    r.degraded = "degraded/" + fs::path(job.clean).stem().string() + "_" + job.code.str() + "_" +
                 std::to_string(job.sample) + ".png";
    r.code = job.code;
    r.seed = derive_seed(master_seed.value, "record", index);
    const Image degraded = degrade(clean, job.code, RenderSeed{r.seed}, r.stage_seeds);
    write_png(root / r.degraded, quantize_8bit(degraded));
    manifest.records.push_back(std::move(r));
  }
  return manifest;
}

}  // namespace

DatasetManifest build_dataset(const fs::path& root, const std::vector<std::string>& cleans,
                              const std::vector<WeatherCode>& codes, int samples_per_code,
                              RenderSeed master_seed, const Degrader& degrade) {
  if (samples_per_code < 1) throw ParamError("samples_per_code must be >= 1");
  std::vector<Job> jobs;
  for (const auto& clean_rel : cleans)
    for (const auto code : codes)
      for (int s = 0; s < samples_per_code; ++s) jobs.push_back({clean_rel, code, s});
  return run_jobs(root, jobs, master_seed, degrade);
}

DatasetManifest build_cycled_dataset(const fs::path& root, const std::vector<std::string>& cleans,
                                     const std::vector<WeatherCode>& codes, RenderSeed master_seed,
                                     const Degrader& degrade) {
  if (codes.empty()) throw ParamError("no weather codes given");
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cleans.size(); ++i) jobs.push_back({cleans[i], codes[i % codes.size()], 0});
  return run_jobs(root, jobs, master_seed, degrade);
}

Pair load_pair(const DatasetManifest& manifest, const ManifestRecord& record) {
  return {read_png(manifest.resolve(record.clean)), read_png(manifest.resolve(record.degraded)),
          record.code};
}

std::vector<Pair> load_pairs(const DatasetManifest& manifest) {
  std::vector<Pair> pairs;
  pairs.reserve(manifest.size());
  for (const auto& r : manifest.records) pairs.push_back(load_pair(manifest, r));
  return pairs;
}

}  // namespace rahc
