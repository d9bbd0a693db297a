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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rahc/archive.hpp"
#include "rahc/dataset.hpp"
#include "rahc/error.hpp"
#include "rahc/synthesis.hpp"

using namespace rahc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rahc_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("image") {
  TEST_CASE("image validation") {
    CHECK_THROWS_AS(Image(torch::zeros({12, 16, 3})), ShapeError);
    CHECK_THROWS_AS(Image(torch::zeros({16, 16, 4})), ShapeError);
    CHECK_THROWS_AS(Image(torch::full({8, 8, 3}, 1.5f)), ParamError);
    auto nan = torch::zeros({8, 8, 3});
    nan[0][0][0] = std::nanf("");
    CHECK_THROWS_AS(Image{nan}, ParamError);
    CHECK(Image::clamped(torch::full({8, 8, 3}, 2.0f)).tensor().max().item<float>() == 1.0f);
  }

  TEST_CASE("batch conversion round-trips") {
    std::vector<Image> imgs{make_clean_scene({1}, 16, 24), make_clean_scene({2}, 16, 24)};
    const auto b = to_batch(imgs);
    CHECK(b.sizes() == torch::IntArrayRef{2, 3, 16, 24});
    const auto back = from_batch(b);
    CHECK(back[0] == imgs[0]);
    CHECK(back[1] == imgs[1]);
  }

  TEST_CASE("png round-trip is exact on the 8-bit grid") {
    const auto dir = scratch("png");
    const auto img = quantize_8bit(make_clean_scene({4}, 24, 32));
    write_png(dir / "a.png", img);
    CHECK(read_png(dir / "a.png") == img);
    CHECK(quantize_8bit(img) == img);
    CHECK_THROWS_AS(read_png(dir / "missing.png"), IoError);
  }
}

TEST_SUITE("dataset") {
  TEST_CASE("manifest json lines round-trip") {
    DatasetManifest m;
    m.root = "/x";
    m.records.push_back({"clean/00000.png", "degraded/00000_10010_0.png", WeatherCode::parse("10010"),
                         18446744073709551615ull, {}});
    m.records.push_back({"clean/00001.png", "degraded/00001_00001_0.png", WeatherCode::parse("00001"), 7, {1, 2}});
    const auto text = to_jsonl(m);
    CHECK(text.find("\"code\":\"10010\"") != std::string::npos);
    CHECK(text.find("\"seed\":\"18446744073709551615\"") != std::string::npos);
    const auto back = parse_jsonl(text, "/x");
    CHECK((back.records == m.records));
    CHECK_THROWS_AS(parse_jsonl("{\"clean\": 3}\n", "/x"), ParamError);
  }

  TEST_CASE("dataset construction is ordered and reproducible") {
    const auto a = scratch("ds_a"), b = scratch("ds_b");
    const std::vector<WeatherCode> codes{WeatherCode::parse("10000"), WeatherCode::parse("01011")};
    for (const auto& root : {a, b}) {
      const auto cleans = synth_cleans(root, 3, 16, 16, {9});
      const auto m = build_dataset(root, cleans, codes, 2, {21});
      save_manifest(m, root / "manifest.jsonl");
    }
    CHECK(slurp(a / "manifest.jsonl") == slurp(b / "manifest.jsonl"));
    const auto m = load_manifest(a / "manifest.jsonl");
    REQUIRE(m.size() == 3 * 2 * 2);
    CHECK(m.records[0].code == codes[0]);
    CHECK(m.records[2].code == codes[1]);
    CHECK(m.records[4].clean == "clean/00001.png");
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m.records[i].seed == derive_seed(21, "record", i));
      CHECK(slurp(a / m.records[i].degraded) == slurp(b / m.records[i].degraded));
    }
    const auto p = load_pair(m, m.records[5]);
    CHECK(p.code == m.records[5].code);
    CHECK(p.degraded == quantize_8bit(compose_condition(p.clean, p.code, {m.records[5].seed})));
  }

  TEST_CASE("cycled layout assigns one code per clean image") {
    const auto root = scratch("ds_cycle");
    const auto cleans = synth_cleans(root, 5, 16, 16, {3});
    const std::vector<WeatherCode> codes{WeatherCode(1), WeatherCode(2)};
    const auto m = build_cycled_dataset(root, cleans, codes, {1});
    REQUIRE(m.size() == 5);
    CHECK(m.records[2].code == WeatherCode(1));
    CHECK(m.records[3].code == WeatherCode(2));
  }
}

TEST_SUITE("archive") {
  TEST_CASE("archives round-trip bit-exactly") {
    TensorArchive a;
    a.meta["kind"] = "test";
    a.meta["step"] = 12;
    a.tensors["w"] = torch::randn({3, 4});
    a.tensors["d"] = torch::randn({5}, torch::kFloat64);
    a.tensors["i"] = torch::arange(6, torch::kInt64).view({2, 3});
    const auto bytes = serialize(a);
    const auto b = deserialize(bytes);
    CHECK(b.meta == a.meta);
    for (const auto& [name, t] : a.tensors) CHECK(b.at(name).equal(t));
    CHECK(serialize(b) == bytes);
    CHECK_THROWS_AS(deserialize(bytes.substr(0, bytes.size() - 3)), IoError);
    CHECK_THROWS_AS(deserialize("NOTACKPT"), IoError);
  }

  TEST_CASE("module and optimizer state round-trip") {
    torch::manual_seed(1);
    torch::nn::Linear a(4, 3), b(4, 3);
    torch::optim::Adam oa(a->parameters(), torch::optim::AdamOptions(0.01));
    torch::optim::Adam ob(b->parameters(), torch::optim::AdamOptions(0.5));
    auto x = torch::randn({8, 4});
    for (int i = 0; i < 3; ++i) {
      oa.zero_grad();
      a(x).pow(2).sum().backward();
      oa.step();
    }
    TensorArchive ar;
    put_module(ar, "m", *a);
    put_adam(ar, "opt", oa);
    get_module(ar, "m", *b);
    get_adam(ar, "opt", ob);
    for (int i = 0; i < 2; ++i) {
      oa.zero_grad();
      a(x).pow(2).sum().backward();
      oa.step();
      ob.zero_grad();
      b(x).pow(2).sum().backward();
      ob.step();
    }
    CHECK(a->weight.equal(b->weight));
    CHECK(a->bias.equal(b->bias));
    torch::nn::Linear wrong(5, 3);
    CHECK_THROWS_AS(get_module(ar, "m", *wrong), ShapeError);
  }
}
