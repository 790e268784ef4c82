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

#include <cstddef>

namespace rocket::transport {

struct Range {
  std::size_t offset = 0;
  std::size_t length = 0;

  std::size_t end() const noexcept { return offset + length; }
  bool overlaps(const Range& other) const noexcept {
    return length != 0 && other.length != 0 && offset < other.end() && other.offset < end();
  }
  friend bool operator==(const Range&, const Range&) = default;
};

// Bump allocator that carves aligned, non-overlapping sub-ranges out of a
// fixed span. Used once per segment at setup; nothing is ever freed.
class RangeAllocator {
 public:
  explicit RangeAllocator(std::size_t capacity) noexcept : capacity_(capacity) {}

  // Throws Error(RegionExhausted) when the request does not fit and
  // Error(InvalidArgument) for a non power-of-two alignment.
  Range allocate(std::size_t length, std::size_t alignment);

  std::size_t used() const noexcept { return cursor_; }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
};

inline constexpr std::size_t align_up(std::size_t value, std::size_t alignment) noexcept {
  return (value + alignment - 1) & ~(alignment - 1);
}

}  // namespace rocket::transport
