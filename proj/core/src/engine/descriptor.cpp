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

#include "rocket/engine/descriptor.hpp"

#include <cstdint>

#include "rocket/common/error.hpp"

namespace rocket::engine {

std::string_view to_string(CompletionStatus status) noexcept {
  switch (status) {
    case CompletionStatus::Pending: return "PENDING";
    case CompletionStatus::Complete: return "COMPLETE";
    case CompletionStatus::Faulted: return "FAULTED";
  }
  return "?";
}

void CompletionRecord::reset() noexcept {
  bytes_done.store(0, std::memory_order_relaxed);
  submit_ns.store(0, std::memory_order_relaxed);
  complete_ns.store(0, std::memory_order_relaxed);
  transitions.store(0, std::memory_order_relaxed);
  status.store(CompletionStatus::Pending, std::memory_order_release);
}

bool CompletionRecord::publish(CompletionStatus terminal, std::uint64_t bytes, Nanos at) noexcept {
  if (status.load(std::memory_order_relaxed) != CompletionStatus::Pending) {
    return false;
  }
  bytes_done.store(bytes, std::memory_order_relaxed);
  complete_ns.store(at, std::memory_order_relaxed);
  auto expected = CompletionStatus::Pending;
  if (!status.compare_exchange_strong(expected, terminal, std::memory_order_release, std::memory_order_relaxed)) {
    return false;
  }
  transitions.fetch_add(1, std::memory_order_relaxed);
  return true;
}

void validate(const CopyDescriptor& desc) {
  if (desc.completion == nullptr) {
    throw Error(Errc::InvalidDescriptor, "descriptor has no completion record");
  }
  if (desc.length() == 0) {
    throw Error(Errc::InvalidDescriptor, "descriptor length must be positive");
  }
  if (desc.dst.size() < desc.length()) {
    throw Error(Errc::InvalidDescriptor, "destination smaller than source");
  }
  if (desc.completion->load() != CompletionStatus::Pending) {
    throw Error(Errc::InvalidDescriptor, "completion record is not pending");
  }
  const auto src_lo = reinterpret_cast<std::uintptr_t>(desc.src.data());
  const auto src_hi = src_lo + desc.length();
  const auto dst_lo = reinterpret_cast<std::uintptr_t>(desc.dst.data());
  const auto dst_hi = dst_lo + desc.length();
  if (src_lo < dst_hi && dst_lo < src_hi) {
    throw Error(Errc::OverlappingRanges, "source and destination overlap");
  }
  if (dst_lo % kCopyAlignment != 0) {
    throw Error(Errc::Misaligned, "destination is not 64-byte aligned");
  }
}

}  // namespace rocket::engine
