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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rocket/bench/harness.hpp"

namespace rocket::bench {

inline constexpr std::string_view kCsvHeader =
    "mode,device,injection,n,batch,payload_bytes,latency_p50_us,latency_p99_us,throughput_rps,"
    "copy_in_us,wait_us,exec_us,copy_out_us,poll_count,touch_count";

struct CsvRow {
  Mode mode = Mode::Sync;
  engine::DeviceKind device = engine::DeviceKind::Sim;
  InjectionHint injection = InjectionHint::Default;
  std::uint32_t n = 0;
  std::uint32_t batch = 0;
  std::uint64_t payload_bytes = 0;
  double latency_p50_us = 0.0;
  double latency_p99_us = 0.0;
  double throughput_rps = 0.0;
  double copy_in_us = 0.0;
  double wait_us = 0.0;
  double exec_us = 0.0;
  double copy_out_us = 0.0;
  std::uint64_t poll_count = 0;
  std::uint64_t touch_count = 0;

  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

CsvRow to_row(const RunReport& report);

// Doubles are written in shortest round-trip form, so parse_csv(format_csv(x))
// reproduces x exactly.
std::string format_csv(std::span<const CsvRow> rows);
// Throws Error(InvalidArgument) on a wrong header or malformed row.
std::vector<CsvRow> parse_csv(std::string_view text);

// Throws Error(IoError).
void emit_csv(std::span<const CsvRow> rows, const std::filesystem::path& path);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

}  // namespace rocket::bench
