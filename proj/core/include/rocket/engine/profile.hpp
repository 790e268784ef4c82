/*
 * Copyright 2026 The rocket-ipc Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace rocket::engine {

// Calibrated copy-latency model: a fixed setup cost plus a per-MB transfer
// cost (MB = 10^6 bytes). The estimate itself lives in completion/.
struct EngineProfile {
  double l_fixed_us = 73.6;
  double alpha_us_per_mb = 33.4;
  std::string calibrated_at;  // ISO 8601 UTC, empty for built-in defaults
  std::uint64_t sample_count = 0;

  static EngineProfile defaults() { return {}; }

  // Throws Error(InvalidArgument) unless both coefficients are positive.
  void validate() const;

  // key=value text with l_fixed_us, alpha_us_per_mb, calibrated_at and
  // sample_count. Unknown keys are ignored; missing coefficients are an
  // error.
  static EngineProfile parse(std::string_view text);
  static EngineProfile load(const std::filesystem::path& path);
  std::string format() const;
  void save(const std::filesystem::path& path) const;
};

// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string iso8601_now();

}  // namespace rocket::engine
