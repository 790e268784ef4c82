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

#include "rocket/common/kv_file.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rocket/common/error.hpp"

namespace rocket {

std::string_view trim(std::string_view text) noexcept {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(sep, start);
    const std::size_t end = pos == std::string_view::npos ? text.size() : pos;
    const auto piece = trim(text.substr(start, end - start));
    if (!piece.empty()) {
      out.emplace_back(piece);
    }
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_size(std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr == first) {
    throw Error(Errc::InvalidArgument, "bad size '" + std::string(text) + "'");
  }
  std::string suffix(trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr))));
  for (auto& c : suffix) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  std::uint64_t mult = 1;
  if (suffix.empty() || suffix == "B") {
    mult = 1;
  } else if (suffix == "K" || suffix == "KB" || suffix == "KIB") {
    mult = 1ULL << 10;
  } else if (suffix == "M" || suffix == "MB" || suffix == "MIB") {
    mult = 1ULL << 20;
  } else if (suffix == "G" || suffix == "GB" || suffix == "GIB") {
    mult = 1ULL << 30;
  } else {
    throw Error(Errc::InvalidArgument, "bad size suffix '" + suffix + "'");
  }
  return value * mult;
}

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    ++line_no;
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::InvalidArgument, "line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw Error(Errc::InvalidArgument, "line " + std::to_string(line_no) + ": empty key");
    }
    file.entries_.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void KeyValueFile::set(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == key) {
      return it->second;
    }
  }
  return std::nullopt;
}

std::optional<double> KeyValueFile::get_double(std::string_view key) const {
  auto raw = get(key);
  if (!raw) {
    return std::nullopt;
  }
  double value = 0.0;
  const auto* first = raw->data();
  const auto* last = raw->data() + raw->size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw Error(Errc::InvalidArgument, std::string(key) + ": not a number '" + *raw + "'");
  }
  return value;
}

std::optional<std::uint64_t> KeyValueFile::get_uint(std::string_view key) const {
  auto raw = get(key);
  if (!raw) {
    return std::nullopt;
  }
  std::uint64_t value = 0;
  const auto* first = raw->data();
  const auto* last = raw->data() + raw->size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw Error(Errc::InvalidArgument, std::string(key) + ": not an unsigned integer '" + *raw + "'");
  }
  return value;
}

std::vector<std::string> KeyValueFile::get_list(std::string_view key) const {
  auto raw = get(key);
  if (!raw) {
    return {};
  }
  return split(*raw, ',');
}

std::string KeyValueFile::to_string() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

void KeyValueFile::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::IoError, "cannot write " + path.string());
  }
  out << to_string();
  if (!out) {
    throw Error(Errc::IoError, "write failed for " + path.string());
  }
}

}  // namespace rocket
