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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "rocket/transport/doorbell.hpp"
#include "rocket/transport/range_allocator.hpp"
#include "rocket/transport/ring_queue.hpp"
#include "rocket/transport/shared_region.hpp"

namespace rocket::transport {

// "rocket.<server>.ctl" and "rocket.<server>.<client-id>".
std::string control_segment_name(std::string_view server_name);
std::string pair_segment_name(std::string_view server_name, std::uint32_t client_id);

// Offsets of every component inside a client's pair segment.
struct PairLayout {
  Range header;
  Range tx_ring;
  Range rx_ring;
  Range tx_payload;
  Range rx_payload;
  std::size_t total = 0;
};

// Every tx payload block is preceded by one 64-byte granule holding a
// consumed flag. The client clears it when it fills the block; the server
// sets it once the payload has been copied out, after which the client may
// reuse the space.
inline constexpr std::size_t kTxPrefixBytes = 64;

// Flag for the block whose payload starts at `payload_offset`, or nullptr
// when the offset leaves no room for the prefix or is not 64-byte aligned.
std::atomic<std::uint32_t>* tx_consumed_flag(std::span<std::byte> tx_payload, std::size_t payload_offset) noexcept;

// Lives at offset 0 of the pair segment.
struct PairHeader {
  std::uint32_t magic;
  std::uint32_t client_id;
  std::uint32_t ring_capacity;
  std::uint32_t reserved;
  std::uint64_t tx_ring_offset;
  std::uint64_t rx_ring_offset;
  std::uint64_t tx_payload_offset;
  std::uint64_t tx_payload_length;
  std::uint64_t rx_payload_offset;
  std::uint64_t rx_payload_length;
  // Rung by the server after each push to the rx ring.
  alignas(64) Doorbell rx_bell;
};

// A client's dedicated transmit (client->server) and receive
// (server->client) rings plus their payload ranges, all inside one
// pre-faulted segment that stays mapped for the whole session.
class QueuePair {
 public:
  static constexpr std::uint32_t kMagic = 0x52494150;  // "PAIR"

  // `payload_bytes` is split evenly between tx and rx; each half is rounded
  // down to a page multiple. Throws Error(CapacityNotPowerOfTwo) and
  // Error(RegionExhausted) for unusable parameters.
  static PairLayout layout(std::uint32_t ring_capacity, std::size_t payload_bytes);

  // Server side: creates, formats and owns the segment.
  static QueuePair create(std::string segment_name, std::uint32_t client_id, std::uint32_t ring_capacity,
                          std::size_t payload_bytes, bool pin);

  // Client side: maps an existing segment.
  static QueuePair attach(std::string segment_name);

  QueuePair() = default;
  QueuePair(QueuePair&&) noexcept = default;
  QueuePair& operator=(QueuePair&&) noexcept = default;

  std::uint32_t client_id() const noexcept { return header_->client_id; }
  RingQueue& tx() noexcept { return tx_; }
  RingQueue& rx() noexcept { return rx_; }
  std::span<std::byte> tx_payload() const noexcept { return tx_payload_; }
  std::span<std::byte> rx_payload() const noexcept { return rx_payload_; }
  Doorbell& rx_doorbell() noexcept { return header_->rx_bell; }
  const SharedRegion& region() const noexcept { return region_; }
  const PairLayout& layout() const noexcept { return layout_; }
  bool valid() const noexcept { return header_ != nullptr; }

 private:
  void bind();

  SharedRegion region_;
  PairHeader* header_ = nullptr;
  PairLayout layout_{};
  RingQueue tx_;
  RingQueue rx_;
  std::span<std::byte> tx_payload_;
  std::span<std::byte> rx_payload_;
};

}  // namespace rocket::transport
