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
#include <deque>
#include <optional>

namespace rocket::transport {

// Circular bump allocator over one payload range. Allocations are handed
// out in address order and recycled in FIFO order: a released allocation's
// space becomes reusable once every allocation before it is released too.
// When the arena drains completely it rewinds to offset 0, so a strictly
// request/response workload keeps hitting the same (cache-warm) bytes.
//
// Metadata is local to the owning process; the arena itself never touches
// the payload bytes.
class PayloadArena {
 public:
  explicit PayloadArena(std::size_t capacity, std::size_t granule = 64);

  // Offset of a granule-aligned block of at least `bytes` bytes, or nullopt
  // if the space is not available right now.
  std::optional<std::size_t> allocate(std::size_t bytes);

  // Releases the live allocation starting at `offset`. Returns false if no
  // live allocation starts there.
  bool release(std::size_t offset);

  // True if a request of `bytes` could ever succeed on an empty arena.
  bool fits(std::size_t bytes) const noexcept;

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t granule() const noexcept { return granule_; }
  // Bytes between tail and head, including wrap padding.
  std::size_t in_use() const noexcept { return static_cast<std::size_t>(head_ - tail_); }
  std::size_t live_allocations() const noexcept;
  bool empty() const noexcept { return records_.empty(); }

 private:
  struct Record {
    std::uint64_t position;  // monotonic start
    std::size_t offset;      // position % capacity
    std::size_t size;
    bool released;
  };

  void collect() noexcept;

  std::size_t capacity_;
  std::size_t granule_;
  std::uint64_t head_ = 0;
  std::uint64_t tail_ = 0;
  std::deque<Record> records_;
};

}  // namespace rocket::transport
