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

#include "rahc/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rahc/error.hpp"

namespace rahc {

static_assert(std::endian::native == std::endian::little, "archive format assumes little-endian hosts");

namespace {
constexpr char kMagic[8] = {'R', 'A', 'H', 'C', 'C', 'K', 'P', 'T'};

enum class DtypeTag : std::uint8_t { F32 = 0, F64 = 1, I64 = 2 };

DtypeTag tag_of(torch::Dtype d) {
  if (d == torch::kFloat32) return DtypeTag::F32;
  if (d == torch::kFloat64) return DtypeTag::F64;
  if (d == torch::kInt64) return DtypeTag::I64;
  throw ParamError("unsupported tensor dtype in archive");
}

torch::Dtype dtype_of(DtypeTag t) {
  switch (t) {
    case DtypeTag::F32: return torch::kFloat32;
    case DtypeTag::F64: return torch::kFloat64;
    case DtypeTag::I64: return torch::kInt64;
  }
  throw ParamError("unknown dtype tag");
}

template <class T>
void put(std::string& out, T v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::string origin) : bytes_(bytes), origin_(std::move(origin)) {}
  template <class T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  const char* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw IoError(origin_, "truncated archive");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  const std::string& bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};
}  // namespace

const torch::Tensor& TensorArchive::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ParamError("archive has no tensor '" + name + "'");
  return it->second;
}

std::string serialize(const TensorArchive& archive) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, TensorArchive::kFormatVersion);
  const auto meta = archive.meta.dump();
  put<std::uint64_t>(out, meta.size());
  out += meta;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(archive.tensors.size()));
  for (const auto& [name, tensor] : archive.tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    const auto t = tensor.detach().cpu().contiguous();
    put<std::uint8_t>(out, static_cast<std::uint8_t>(tag_of(t.scalar_type())));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.dim()));
    for (auto d : t.sizes()) put<std::int64_t>(out, d);
    out.append(static_cast<const char*>(t.data_ptr()), t.numel() * t.element_size());
  }
  return out;
}

TensorArchive deserialize(const std::string& bytes, const std::string& origin) {
  Reader r(bytes, origin);
  if (std::memcmp(r.take(sizeof(kMagic)), kMagic, sizeof(kMagic)) != 0)
    throw IoError(origin, "not a checkpoint archive");
  const auto version = r.get<std::uint32_t>();
  if (version != TensorArchive::kFormatVersion)
    throw IoError(origin, "unsupported archive version " + std::to_string(version));
  TensorArchive a;
  const auto meta_len = r.get<std::uint64_t>();
  a.meta = nlohmann::json::parse(std::string(r.take(meta_len), meta_len));
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.get<std::uint32_t>();
    std::string name(r.take(name_len), name_len);
    const auto dtype = dtype_of(static_cast<DtypeTag>(r.get<std::uint8_t>()));
    const auto rank = r.get<std::uint32_t>();
    std::vector<std::int64_t> dims(rank);
    for (auto& d : dims) d = r.get<std::int64_t>();
    auto t = torch::empty(dims, dtype);
    std::memcpy(t.data_ptr(), r.take(t.numel() * t.element_size()), t.numel() * t.element_size());
    a.tensors.emplace(std::move(name), std::move(t));
  }
  return a;
}

void save_archive(const std::filesystem::path& path, const TensorArchive& archive) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << serialize(archive);
  if (!out) throw IoError(path.string(), "write failed");
}

TensorArchive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open checkpoint");
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str(), path.string());
}

void put_module(TensorArchive& archive, const std::string& prefix, const torch::nn::Module& module) {
  for (const auto& p : module.named_parameters()) archive.tensors[prefix + "." + p.key()] = p.value().detach().clone();
  for (const auto& b : module.named_buffers()) archive.tensors[prefix + "." + b.key()] = b.value().detach().clone();
}

void get_module(const TensorArchive& archive, const std::string& prefix, torch::nn::Module& module) {
  torch::NoGradGuard guard;
  auto load = [&](const std::string& key, torch::Tensor& dst) {
    const auto& src = archive.at(prefix + "." + key);
    if (src.sizes() != dst.sizes())
      throw ShapeError("checkpoint tensor '" + prefix + "." + key + "' has mismatched shape");
    dst.copy_(src);
  };
  for (auto& p : module.named_parameters()) load(p.key(), p.value());
  for (auto& b : module.named_buffers()) load(b.key(), b.value());
}

void put_adam(TensorArchive& archive, const std::string& prefix, torch::optim::Adam& optimizer) {
  auto& state = optimizer.state();
  for (std::size_t g = 0; g < optimizer.param_groups().size(); ++g) {
    const auto& group = optimizer.param_groups()[g];
    const auto key_base = prefix + "." + std::to_string(g) + ".";
    archive.tensors[key_base + "lr"] =
        torch::tensor({static_cast<const torch::optim::AdamOptions&>(group.options()).lr()}, torch::kFloat64);
    for (std::size_t i = 0; i < group.params().size(); ++i) {
      auto it = state.find(group.params()[i].unsafeGetTensorImpl());
      if (it == state.end()) continue;
      const auto& s = static_cast<const torch::optim::AdamParamState&>(*it->second);
      const auto k = key_base + std::to_string(i) + ".";
      archive.tensors[k + "step"] = torch::tensor({s.step()}, torch::kInt64);
      archive.tensors[k + "exp_avg"] = s.exp_avg().clone();
      archive.tensors[k + "exp_avg_sq"] = s.exp_avg_sq().clone();
    }
  }
}

void get_adam(const TensorArchive& archive, const std::string& prefix, torch::optim::Adam& optimizer) {
  auto& state = optimizer.state();
  state.clear();
  for (std::size_t g = 0; g < optimizer.param_groups().size(); ++g) {
    auto& group = optimizer.param_groups()[g];
    const auto key_base = prefix + "." + std::to_string(g) + ".";
    static_cast<torch::optim::AdamOptions&>(group.options())
        .lr(archive.at(key_base + "lr").item<double>());
    for (std::size_t i = 0; i < group.params().size(); ++i) {
      const auto k = key_base + std::to_string(i) + ".";
      if (!archive.contains(k + "step")) continue;
      auto s = std::make_unique<torch::optim::AdamParamState>();
      s->step(archive.at(k + "step").item<std::int64_t>());
      s->exp_avg(archive.at(k + "exp_avg").clone());
      s->exp_avg_sq(archive.at(k + "exp_avg_sq").clone());
      state[group.params()[i].unsafeGetTensorImpl()] = std::move(s);
    }
  }
}

}  // namespace rahc
