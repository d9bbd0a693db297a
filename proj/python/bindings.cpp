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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <sstream>

#include "rahc/cli.hpp"
#include "rahc/config.hpp"
#include "rahc/error.hpp"
#include "rahc/losses.hpp"
#include "rahc/metrics.hpp"
#include "rahc/network.hpp"
#include "rahc/pipeline.hpp"
#include "rahc/synthesis.hpp"
#include "rahc/vq.hpp"

namespace py = pybind11;
using namespace rahc;

namespace {

using F32 = py::array_t<float, py::array::c_style | py::array::forcecast>;
using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <class T, class A>
torch::Tensor to_tensor(const A& a, torch::Dtype dtype) {
  std::vector<std::int64_t> shape(a.shape(), a.shape() + a.ndim());
  return torch::from_blob(const_cast<T*>(a.data()), shape, dtype).clone();
}

template <class T>
py::array_t<T> to_array(const torch::Tensor& t) {
  const auto c = t.contiguous();
  std::vector<py::ssize_t> shape(c.sizes().begin(), c.sizes().end());
  py::array_t<T> out(shape);
  std::memcpy(out.mutable_data(), c.data_ptr<T>(), sizeof(T) * c.numel());
  return out;
}

Image to_image(const F32& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw ShapeError("expected an [H, W, 3] array");
  return Image(to_tensor<float>(a, torch::kFloat32));
}

py::array_t<float> from_image(const Image& img) { return to_array<float>(img.tensor()); }

std::array<double, kNumWeathers> five(const std::vector<double>& v) {
  if (v.size() != kNumWeathers) throw ShapeError("expected five values");
  std::array<double, kNumWeathers> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace

PYBIND11_MODULE(_rahc, m) {
  m.doc() = "Hybrid adverse-weather restoration toolkit";
  torch::set_num_threads(1);

  // Raised as Error(kind, message).
  static py::handle error = py::exception<Error>(m, "Error").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error.ptr(), py::make_tuple(e.kind(), e.what()).ptr());
    }
  });

  m.def("enumerate_codes", [] {
    std::vector<std::string> out;
    for (auto c : enumerate_codes()) out.push_back(c.str());
    return out;
  }, "The 31 nonzero weather codes as bitstrings, ascending.");
  m.def("popcount", [](const std::string& code) { return WeatherCode::parse(code).popcount(); });
  m.def("derive_seed", &derive_seed, py::arg("parent"), py::arg("tag"), py::arg("index") = 0);

  m.def("make_clean_scene", [](std::uint64_t seed, std::int64_t height, std::int64_t width) {
    return from_image(make_clean_scene({seed}, height, width));
  }, py::arg("seed"), py::arg("height") = 64, py::arg("width") = 64);
  m.def("compose_condition", [](const F32& img, const std::string& code, std::uint64_t seed) {
    return from_image(compose_condition(to_image(img), WeatherCode::parse(code), {seed}));
  }, py::arg("image"), py::arg("code"), py::arg("seed"),
        "Applies every weather in the code once, in stage order.");

  m.def("psnr", [](const F32& a, const F32& b, const std::string& mode) {
    return psnr(to_image(a), to_image(b), metric_mode_from_name(mode));
  }, py::arg("a"), py::arg("b"), py::arg("mode") = "rgb");
  m.def("ssim", [](const F32& a, const F32& b, const std::string& mode) {
    return ssim(to_image(a), to_image(b), metric_mode_from_name(mode));
  }, py::arg("a"), py::arg("b"), py::arg("mode") = "rgb");

  m.def("nearest_indices", [](const F64& vectors, const F64& book) {
    return to_array<std::int64_t>(
        nearest_indices(to_tensor<double>(vectors, torch::kFloat64), to_tensor<double>(book, torch::kFloat64)));
  }, py::arg("vectors"), py::arg("book"), "Nearest codebook rows; ties go to the lowest index.");
  m.def("pixel_unshuffle", [](const F64& x, std::int64_t r) {
    return to_array<double>(rahc::pixel_unshuffle(to_tensor<double>(x, torch::kFloat64), r));
  });
  m.def("pixel_shuffle", [](const F64& x, std::int64_t r) {
    return to_array<double>(rahc::pixel_shuffle(to_tensor<double>(x, torch::kFloat64), r));
  });

  m.def("loss_discriminator", [](const std::vector<double>& p, const std::vector<double>& t) {
    return loss_discriminator(five(p), five(t));
  }, py::arg("p"), py::arg("t"));
  m.def("loss_restoration_dis", [](const std::vector<double>& p) { return loss_restoration_dis(five(p)); },
        py::arg("p"));
  m.def("cosine_lr", &cosine_lr, py::arg("step"), py::arg("total_steps"), py::arg("lr_max") = 2e-4,
        py::arg("lr_min") = 1e-6);

  m.def("default_config", [] { return RunConfig().dump(); }, "Default run configuration as JSON text.");
  m.def("cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "rahc");
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs a command line; returns (exit_code, stdout, stderr).");
}
