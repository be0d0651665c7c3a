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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <torch/torch.h>

namespace svnvs {

/// Single-file container of named tensors with a small header:
///
///   "SVNVSARC" | u32 format version | u64 config hash |
///   u64 metadata length | metadata bytes | u64 tensor count |
///   per tensor: u64 name length | name | u8 dtype | u64 ndim | i64 dims[ndim] |
///               u64 byte count | raw little-endian data
///
/// dtype codes: 0 float32, 1 float64, 2 int64. Writing the same archive twice
/// yields identical bytes.
struct TensorArchive {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::uint64_t config_hash = 0;
  std::string metadata;
  std::vector<std::pair<std::string, torch::Tensor>> tensors;

  const torch::Tensor* find(const std::string& name) const;
};

void write_archive(const std::filesystem::path& path, const TensorArchive& archive);
TensorArchive read_archive(const std::filesystem::path& path);

/// 64-bit FNV-1a, used for config and content hashes.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace svnvs
