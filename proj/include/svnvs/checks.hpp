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
#include <string>
#include <string_view>
#include <vector>

namespace svnvs {

/// One verified property: a measured value against a tolerance.
struct CheckResult {
  std::string module;  // e.g. "rendering.aggregate"
  std::string name;    // e.g. "gradient" or "brute_force"
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Module ids accepted by gradient_check().
std::vector<std::string> gradient_check_modules();

/// Analytic gradient of the named module's scalarized output against central
/// finite differences (h = 1e-3) on a small double-precision fixture. Returns
/// the maximum relative error over sampled coordinates.
CheckResult gradient_check(std::string_view module_id, std::uint64_t fixture_seed);

/// Gradient checks plus invariant checks for every module whose id starts
/// with `module_filter` (empty = all).
std::vector<CheckResult> run_checks(std::string_view module_filter, std::uint64_t seed);

namespace debug {
/// Deliberately corrupts the named operation (only "rendering.aggregate" is
/// wired) so the check suite can prove it notices. Empty string clears it.
void inject_fault(std::string_view module_id);
bool fault_active(std::string_view module_id);
}  // namespace debug

}  // namespace svnvs
