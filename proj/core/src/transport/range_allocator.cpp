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

#include "rocket/transport/range_allocator.hpp"

#include <string>

#include "rocket/common/error.hpp"
#include "rocket/transport/ring_queue.hpp"

namespace rocket::transport {

Range RangeAllocator::allocate(std::size_t length, std::size_t alignment) {
  if (!is_power_of_two(alignment)) {
    throw Error(Errc::InvalidArgument, "alignment must be a power of two");
  }
  const std::size_t start = align_up(cursor_, alignment);
  if (start > capacity_ || length > capacity_ - start) {
    throw Error(Errc::RegionExhausted, "cannot carve " + std::to_string(length) + " bytes at offset " +
                                           std::to_string(start) + " from " + std::to_string(capacity_));
  }
  cursor_ = start + length;
  return Range{start, length};
}

}  // namespace rocket::transport
