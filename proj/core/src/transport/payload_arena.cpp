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

#include "rocket/transport/payload_arena.hpp"

#include <algorithm>

#include "rocket/common/error.hpp"
#include "rocket/transport/range_allocator.hpp"
#include "rocket/transport/ring_queue.hpp"

namespace rocket::transport {

PayloadArena::PayloadArena(std::size_t capacity, std::size_t granule) : capacity_(capacity), granule_(granule) {
  if (!is_power_of_two(granule) || capacity % granule != 0) {
    throw Error(Errc::InvalidArgument, "arena capacity must be a multiple of a power-of-two granule");
  }
}

bool PayloadArena::fits(std::size_t bytes) const noexcept {
  return align_up(std::max<std::size_t>(bytes, 1), granule_) <= capacity_;
}

std::optional<std::size_t> PayloadArena::allocate(std::size_t bytes) {
  if (!fits(bytes)) {
    return std::nullopt;
  }
  const std::size_t size = align_up(std::max<std::size_t>(bytes, 1), granule_);
  const std::size_t offset = static_cast<std::size_t>(head_ % capacity_);
  const std::size_t pad = offset + size > capacity_ ? capacity_ - offset : 0;
  if (head_ + pad + size - tail_ > capacity_) {
    return std::nullopt;
  }
  if (pad != 0) {
    records_.push_back(Record{head_, offset, pad, true});
    head_ += pad;
  }
  const std::size_t start = static_cast<std::size_t>(head_ % capacity_);
  records_.push_back(Record{head_, start, size, false});
  head_ += size;
  return start;
}

bool PayloadArena::release(std::size_t offset) {
  for (auto& record : records_) {
    if (!record.released && record.offset == offset) {
      record.released = true;
      collect();
      return true;
    }
  }
  return false;
}

void PayloadArena::collect() noexcept {
  while (!records_.empty() && records_.front().released) {
    records_.pop_front();
  }
  if (records_.empty()) {
    head_ = 0;
    tail_ = 0;
  } else {
    tail_ = records_.front().position;
  }
}

std::size_t PayloadArena::live_allocations() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [](const Record& r) { return !r.released; }));
}

}  // namespace rocket::transport
