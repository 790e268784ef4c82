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

#include "rocket/bench/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rocket/common/error.hpp"
#include "rocket/common/kv_file.hpp"

namespace rocket::bench {

namespace {

template <typename T>
void put(std::string& out, T value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, end);
}

template <typename T>
T take(std::string_view field, std::size_t line) {
  T v{};
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || end != field.data() + field.size()) {
    throw Error(Errc::InvalidArgument,
                "csv line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

template <typename T>
T take_enum(std::optional<T> v, std::string_view field, std::size_t line) {
  if (!v) {
    throw Error(Errc::InvalidArgument,
                "csv line " + std::to_string(line) + ": bad value '" + std::string(field) + "'");
  }
  return *v;
}

}  // namespace

CsvRow to_row(const RunReport& r) {
  CsvRow row;
  row.mode = r.scenario.mode;
  row.device = r.scenario.device;
  row.injection = r.scenario.injection;
  row.n = r.scenario.clients;
  row.batch = r.scenario.batch;
  row.payload_bytes = r.scenario.payload_bytes;
  row.latency_p50_us = r.latency_p50_us;
  row.latency_p99_us = r.latency_p99_us;
  row.throughput_rps = r.throughput_rps;
  row.copy_in_us = r.stages.copy_in_us;
  row.wait_us = r.stages.wait_us;
  row.exec_us = r.stages.exec_us;
  row.copy_out_us = r.stages.copy_out_us;
  row.poll_count = r.poll_count;
  row.touch_count = r.touch_count;
  return row;
}

std::string format_csv(std::span<const CsvRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += to_string(r.mode);
    out += ',';
    out += engine::to_string(r.device);
    out += ',';
    out += to_string(r.injection);
    for (auto v : {static_cast<std::uint64_t>(r.n), static_cast<std::uint64_t>(r.batch), r.payload_bytes}) {
      out += ',';
      put(out, v);
    }
    for (double v : {r.latency_p50_us, r.latency_p99_us, r.throughput_rps, r.copy_in_us, r.wait_us, r.exec_us,
                     r.copy_out_us}) {
      out += ',';
      put(out, v);
    }
    for (auto v : {r.poll_count, r.touch_count}) {
      out += ',';
      put(out, v);
    }
    out += '\n';
  }
  return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty()) {
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) {
        throw Error(Errc::InvalidArgument, "csv: unexpected header '" + std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 15) {
      throw Error(Errc::InvalidArgument, "csv line " + std::to_string(line_no) + ": expected 15 fields");
    }
    CsvRow r;
    r.mode = take_enum(parse_mode(f[0]), f[0], line_no);
    r.device = engine::parse_device_kind(f[1]);
    r.injection = take_enum(parse_injection_hint(f[2]), f[2], line_no);
    r.n = take<std::uint32_t>(f[3], line_no);
    r.batch = take<std::uint32_t>(f[4], line_no);
    r.payload_bytes = take<std::uint64_t>(f[5], line_no);
    r.latency_p50_us = take<double>(f[6], line_no);
    r.latency_p99_us = take<double>(f[7], line_no);
    r.throughput_rps = take<double>(f[8], line_no);
    r.copy_in_us = take<double>(f[9], line_no);
    r.wait_us = take<double>(f[10], line_no);
    r.exec_us = take<double>(f[11], line_no);
    r.copy_out_us = take<double>(f[12], line_no);
    r.poll_count = take<std::uint64_t>(f[13], line_no);
    r.touch_count = take<std::uint64_t>(f[14], line_no);
    rows.push_back(r);
  }
  if (!header_seen) {
    throw Error(Errc::InvalidArgument, "csv: missing header");
  }
  return rows;
}

void emit_csv(std::span<const CsvRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  out << format_csv(rows);
  out.close();
  if (!out) {
    throw Error(Errc::IoError, "write to " + path.string() + " failed");
  }
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

}  // namespace rocket::bench
