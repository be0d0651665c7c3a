// Copyright 2026 The SVNVS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svnvs/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "svnvs/error.hpp"

namespace svnvs {
namespace {

constexpr char kMagic[8] = {'S', 'V', 'N', 'V', 'S', 'A', 'R', 'C'};
static_assert(std::endian::native == std::endian::little, "archive I/O assumes little endian");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    fail(ErrorCode::kFormat, "truncated archive " + path.string());
  return v;
}

std::string get_string(std::ifstream& in, const std::filesystem::path& path) {
  const auto len = get<std::uint64_t>(in, path);
  if (len > (1ULL << 32)) fail(ErrorCode::kFormat, "corrupt archive " + path.string());
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), static_cast<std::streamsize>(len)))
    fail(ErrorCode::kFormat, "truncated archive " + path.string());
  return s;
}

std::uint8_t dtype_code(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return 0;
    case torch::kFloat64: return 1;
    case torch::kInt64: return 2;
    default: fail(ErrorCode::kInvalidArgument, "archive: unsupported tensor dtype");
  }
}

torch::ScalarType dtype_from(std::uint8_t code, const std::filesystem::path& path) {
  switch (code) {
    case 0: return torch::kFloat32;
    case 1: return torch::kFloat64;
    case 2: return torch::kInt64;
    default: fail(ErrorCode::kFormat, "archive: unknown dtype code in " + path.string());
  }
}

}  // namespace

const torch::Tensor* TensorArchive::find(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

void write_archive(const std::filesystem::path& path, const TensorArchive& archive) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, TensorArchive::kFormatVersion);
  put<std::uint64_t>(out, archive.config_hash);
  put<std::uint64_t>(out, archive.metadata.size());
  out.write(archive.metadata.data(), static_cast<std::streamsize>(archive.metadata.size()));
  put<std::uint64_t>(out, archive.tensors.size());
  for (const auto& [name, tensor] : archive.tensors) {
    auto t = tensor.detach().cpu().contiguous();
    put<std::uint64_t>(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint8_t>(out, dtype_code(t.scalar_type()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.dim()));
    for (auto d : t.sizes()) put<std::int64_t>(out, d);
    const auto bytes = static_cast<std::uint64_t>(t.numel() * t.element_size());
    put<std::uint64_t>(out, bytes);
    out.write(static_cast<const char*>(t.data_ptr()), static_cast<std::streamsize>(bytes));
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

TensorArchive read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    fail(ErrorCode::kFormat, "not an svnvs archive: " + path.string());
  const auto version = get<std::uint32_t>(in, path);
  if (version != TensorArchive::kFormatVersion)
    fail(ErrorCode::kFormat, "unsupported archive version " + std::to_string(version));
  TensorArchive archive;
  archive.config_hash = get<std::uint64_t>(in, path);
  archive.metadata = get_string(in, path);
  const auto count = get<std::uint64_t>(in, path);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto name = get_string(in, path);
    const auto dtype = dtype_from(get<std::uint8_t>(in, path), path);
    const auto ndim = get<std::uint64_t>(in, path);
    if (ndim > 16) fail(ErrorCode::kFormat, "corrupt archive " + path.string());
    std::vector<int64_t> sizes(ndim);
    for (auto& s : sizes) s = get<std::int64_t>(in, path);
    const auto bytes = get<std::uint64_t>(in, path);
    auto t = torch::empty(sizes, torch::TensorOptions().dtype(dtype));
    if (bytes != static_cast<std::uint64_t>(t.numel() * t.element_size()))
      fail(ErrorCode::kFormat, "archive tensor " + name + " has inconsistent size");
    if (bytes > 0 && !in.read(static_cast<char*>(t.data_ptr()), static_cast<std::streamsize>(bytes)))
      fail(ErrorCode::kFormat, "truncated archive " + path.string());
    archive.tensors.emplace_back(std::move(name), std::move(t));
  }
  return archive;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace svnvs
