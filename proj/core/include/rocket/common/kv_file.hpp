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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rocket {

// Ordered key=value document. Blank lines and lines starting with '#' are
// skipped on parse; keys and values are whitespace-trimmed. Later
// duplicates win on lookup.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  bool contains(std::string_view key) const { return get(key).has_value(); }

  // Typed accessors throw Error(InvalidArgument) on malformed values.
  std::optional<double> get_double(std::string_view key) const;
  std::optional<std::uint64_t> get_uint(std::string_view key) const;
  std::vector<std::string> get_list(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string to_string() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string_view trim(std::string_view text) noexcept;
std::vector<std::string> split(std::string_view text, char sep);

// Parses byte counts such as "4096", "64K", "1M", "16MiB", "2G".
// K/M/G are binary multiples.
std::uint64_t parse_size(std::string_view text);

}  // namespace rocket
