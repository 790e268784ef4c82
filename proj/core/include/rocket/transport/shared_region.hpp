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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace rocket::transport {

std::size_t page_size() noexcept;
std::size_t round_up_to_page(std::size_t length) noexcept;

// A POSIX shared-memory object mapped into this process.
//
// The creator owns the OS name and unlinks it on destruction; openers only
// unmap. Both sides fault in every page before the constructor returns, so
// steady-state access to the region never takes a soft page fault. The
// mapping is made exactly once and lives as long as the object.
class SharedRegion {
 public:
  // Creates a zero-filled region of `length` bytes rounded up to a page
  // multiple and writes every page. With `pin`, also tries mlock(); on
  // refusal the region stays usable with pinned() == false and warning()
  // explaining why.
  //
  // Throws Error(NameCollision) if `name` exists, Error(OutOfMemory) if the
  // backing store cannot be sized.
  static SharedRegion create(std::string name, std::size_t length, bool pin);

  // Maps an existing region and read-touches every page.
  // Throws Error(ServerUnavailable) if `name` does not exist.
  static SharedRegion open(std::string name);

  static bool exists(std::string_view name) noexcept;
  static bool remove(std::string_view name) noexcept;

  SharedRegion() = default;
  SharedRegion(SharedRegion&& other) noexcept;
  SharedRegion& operator=(SharedRegion&& other) noexcept;
  SharedRegion(const SharedRegion&) = delete;
  SharedRegion& operator=(const SharedRegion&) = delete;
  ~SharedRegion();

  const std::string& name() const noexcept { return name_; }
  std::size_t length() const noexcept { return length_; }
  std::byte* base() const noexcept { return base_; }
  std::span<std::byte> bytes() const noexcept { return {base_, length_}; }
  bool pinned() const noexcept { return pinned_; }
  bool prefaulted() const noexcept { return prefaulted_; }
  bool owner() const noexcept { return owner_; }
  bool valid() const noexcept { return base_ != nullptr; }
  const std::optional<std::string>& warning() const noexcept { return warning_; }

  // Pages visited by the prefault loop.
  std::size_t touched_pages() const noexcept { return touched_pages_; }

  // Detaches ownership so the destructor will not unlink the name.
  void release_name() noexcept { owner_ = false; }

  // Process-wide count of mmap() calls made by this class. Lets callers
  // assert that a steady-state code path performs no remapping.
  static std::uint64_t map_calls() noexcept;

 private:
  void reset() noexcept;

  std::string name_;
  std::byte* base_ = nullptr;
  std::size_t length_ = 0;
  bool pinned_ = false;
  bool prefaulted_ = false;
  bool owner_ = false;
  std::size_t touched_pages_ = 0;
  std::optional<std::string> warning_;
};

// Soft (minor) page faults taken so far by the calling thread.
std::uint64_t thread_minor_faults() noexcept;

}  // namespace rocket::transport
