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

#include "doctest_torch.hpp"

#include <cmath>

#include "svnvs/archive.hpp"
#include "svnvs/error.hpp"
#include "svnvs/metrics.hpp"
#include "test_util.hpp"

using namespace svnvs;
using svnvs::test::TempDir;

namespace {

// Smooth procedural texture shared with the reference computation.
torch::Tensor texture(double phase) {
  auto y = torch::arange(32, torch::kFloat64).view({32, 1}).expand({32, 40});
  auto x = torch::arange(40, torch::kFloat64).view({1, 40}).expand({32, 40});
  std::vector<torch::Tensor> ch;
  for (int c = 0; c < 3; ++c)
    ch.push_back(0.5 + 0.35 * torch::sin(0.31 * x + 0.17 * y + c + phase) * torch::cos(0.11 * x - 0.23 * y + 0.5 * c));
  return torch::stack(ch);
}

}  // namespace

TEST_CASE("psnr of identical images is the infinite sentinel") {
  auto a = torch::rand({3, 8, 8});
  CHECK(psnr(a, a) == kPsnrIdentical);
  CHECK(std::isinf(psnr(a, a)));
}

TEST_CASE("psnr of uniform offsets") {
  auto a = torch::full({3, 16, 16}, 0.25, torch::kFloat64);
  CHECK(psnr(a + 0.1, a) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(psnr(a + 0.5, a) == doctest::Approx(20 * std::log10(2.0)).epsilon(1e-9));
  CHECK(psnr(a + 0.5, a) == doctest::Approx(6.0206).epsilon(1e-5));
}

TEST_CASE("psnr and ssim reject shape mismatches") {
  CHECK_THROWS_AS(psnr(torch::zeros({3, 4, 4}), torch::zeros({3, 4, 5})), Error);
  CHECK_THROWS_AS(ssim(torch::zeros({3, 12, 12}), torch::zeros({3, 12, 13})), Error);
}

TEST_CASE("ssim of identical images is one") {
  auto a = texture(0.0);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim matches an independent reference implementation") {
  // Reference: scikit-image structural_similarity on the luma channel with
  // gaussian_weights, sigma 1.5, population covariance, data_range 1.
  CHECK(ssim(texture(0.0), texture(0.4)) == doctest::Approx(0.902906815562029).epsilon(1e-9));
  CHECK(ssim(1.0 - texture(0.0), texture(0.0)) == doctest::Approx(-0.7822120903913219).epsilon(1e-9));
  CHECK(ssim(1.0 - texture(0.0), texture(0.0)) < 0.2);
}

TEST_CASE("ssim of two constant images has the closed form") {
  const double a = 0.3, b = 0.7, c1 = 0.01 * 0.01;
  const double expected = (2 * a * b + c1) / (a * a + b * b + c1);
  const double got = ssim(torch::full({3, 16, 16}, a, torch::kFloat64), torch::full({3, 16, 16}, b, torch::kFloat64));
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  CHECK(got < 1.0);
}

TEST_CASE("ssim needs at least an 11x11 image") {
  CHECK_THROWS_AS(ssim(torch::zeros({3, 10, 30}), torch::zeros({3, 10, 30})), Error);
  CHECK_NOTHROW(ssim(torch::zeros({3, 11, 11}), torch::zeros({3, 11, 11})));
}

TEST_CASE("archive round trip is lossless and byte-stable") {
  TempDir dir("archive");
  torch::manual_seed(0);
  TensorArchive a;
  a.config_hash = 0x0123456789abcdefULL;
  a.metadata = R"({"k":1})";
  a.tensors = {{"w", torch::randn({3, 4})},
               {"d", torch::randn({2}, torch::kFloat64)},
               {"i", torch::tensor({int64_t{-5}, int64_t{7}})},
               {"scalar", torch::tensor(3.5f)},
               {"strided", torch::randn({4, 6}).t()}};
  write_archive(dir / "a.bin", a);
  auto b = read_archive(dir / "a.bin");
  CHECK(b.config_hash == a.config_hash);
  CHECK(b.metadata == a.metadata);
  REQUIRE(b.tensors.size() == a.tensors.size());
  for (std::size_t i = 0; i < a.tensors.size(); ++i) {
    CHECK(b.tensors[i].first == a.tensors[i].first);
    CHECK(b.tensors[i].second.dtype() == a.tensors[i].second.dtype());
    CHECK(b.tensors[i].second.sizes() == a.tensors[i].second.sizes());
    CHECK(torch::equal(b.tensors[i].second, a.tensors[i].second));
  }
  REQUIRE(b.find("i") != nullptr);
  CHECK(b.find("missing") == nullptr);
  write_archive(dir / "b.bin", b);
  CHECK(svnvs::test::read_bytes(dir / "a.bin") == svnvs::test::read_bytes(dir / "b.bin"));
}

TEST_CASE("archive rejects corrupt or truncated files") {
  TempDir dir("archive_bad");
  TensorArchive a;
  a.tensors = {{"w", torch::ones({8})}};
  write_archive(dir / "a.bin", a);
  auto bytes = svnvs::test::read_bytes(dir / "a.bin");
  svnvs::test::write_text(dir / "trunc.bin", bytes.substr(0, bytes.size() - 3));
  svnvs::test::write_text(dir / "magic.bin", "XXXXXXXX" + bytes.substr(8));
  for (const char* name : {"trunc.bin", "magic.bin"}) {
    try {
      read_archive(dir / name);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kFormat);
    }
  }
  CHECK_THROWS_AS(read_archive(dir / "none.bin"), Error);
  TensorArchive u8;
  u8.tensors = {{"b", torch::zeros({2}, torch::kUInt8)}};
  CHECK_THROWS_AS(write_archive(dir / "u8.bin", u8), Error);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}
