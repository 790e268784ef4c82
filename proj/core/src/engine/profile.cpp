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

#include "rocket/engine/profile.hpp"

#include <charconv>
#include <ctime>

#include "rocket/common/error.hpp"
#include "rocket/common/kv_file.hpp"

namespace rocket::engine {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

EngineProfile from_kv(const KeyValueFile& kv) {
  EngineProfile p;
  auto l_fixed = kv.get_double("l_fixed_us");
  auto alpha = kv.get_double("alpha_us_per_mb");
  if (!l_fixed || !alpha) {
    throw Error(Errc::InvalidArgument, "profile needs both l_fixed_us and alpha_us_per_mb");
  }
  p.l_fixed_us = *l_fixed;
  p.alpha_us_per_mb = *alpha;
  p.calibrated_at = kv.get("calibrated_at").value_or("");
  p.sample_count = kv.get_uint("sample_count").value_or(0);
  p.validate();
  return p;
}

}  // namespace

void EngineProfile::validate() const {
  if (!(l_fixed_us > 0.0) || !(alpha_us_per_mb > 0.0)) {
    throw Error(Errc::InvalidArgument, "profile coefficients must be positive (l_fixed_us=" +
                                           format_double(l_fixed_us) +
                                           ", alpha_us_per_mb=" + format_double(alpha_us_per_mb) + ")");
  }
}

EngineProfile EngineProfile::parse(std::string_view text) {
  return from_kv(KeyValueFile::parse(text));
}

EngineProfile EngineProfile::load(const std::filesystem::path& path) {
  return from_kv(KeyValueFile::load(path));
}

std::string EngineProfile::format() const {
  KeyValueFile kv;
  kv.set("l_fixed_us", format_double(l_fixed_us));
  kv.set("alpha_us_per_mb", format_double(alpha_us_per_mb));
  kv.set("calibrated_at", calibrated_at);
  kv.set("sample_count", std::to_string(sample_count));
  return kv.to_string();
}

void EngineProfile::save(const std::filesystem::path& path) const {
  KeyValueFile::parse(format()).save(path);
}

std::string iso8601_now() {
  const std::time_t t = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buf[32];
  const std::size_t n = std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return std::string(buf, n);
}

}  // namespace rocket::engine
