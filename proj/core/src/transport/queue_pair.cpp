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

#include "rocket/transport/queue_pair.hpp"

#include <new>

#include "rocket/common/error.hpp"

namespace rocket::transport {

namespace {

constexpr std::size_t kPayloadAlignment = 4096;

}  // namespace

std::string control_segment_name(std::string_view server_name) {
  return "rocket." + std::string(server_name) + ".ctl";
}

std::string pair_segment_name(std::string_view server_name, std::uint32_t client_id) {
  return "rocket." + std::string(server_name) + "." + std::to_string(client_id);
}

std::atomic<std::uint32_t>* tx_consumed_flag(std::span<std::byte> tx_payload, std::size_t payload_offset) noexcept {
  if (payload_offset < kTxPrefixBytes || payload_offset % kTxPrefixBytes != 0 || payload_offset > tx_payload.size()) {
    return nullptr;
  }
  return std::launder(reinterpret_cast<std::atomic<std::uint32_t>*>(tx_payload.data() + payload_offset - kTxPrefixBytes));
}

PairLayout QueuePair::layout(std::uint32_t ring_capacity, std::size_t payload_bytes) {
  if (!is_power_of_two(ring_capacity)) {
    throw Error(Errc::CapacityNotPowerOfTwo,
                "ring capacity " + std::to_string(ring_capacity) + " is not a power of two");
  }
  const std::size_t half = (payload_bytes / 2) / kPayloadAlignment * kPayloadAlignment;
  if (half == 0) {
    throw Error(Errc::RegionExhausted, "payload budget of " + std::to_string(payload_bytes) +
                                           " bytes is too small for a queue pair");
  }
  const std::size_t ring_bytes = RingQueue::bytes_required(ring_capacity);
  const std::size_t total = align_up(sizeof(PairHeader), kPayloadAlignment) +
                            2 * align_up(ring_bytes, kPayloadAlignment) + 2 * half;
  RangeAllocator carve(total);
  PairLayout out;
  out.header = carve.allocate(sizeof(PairHeader), 64);
  out.tx_ring = carve.allocate(ring_bytes, 64);
  out.rx_ring = carve.allocate(ring_bytes, 64);
  out.tx_payload = carve.allocate(half, kPayloadAlignment);
  out.rx_payload = carve.allocate(half, kPayloadAlignment);
  out.total = round_up_to_page(carve.used());
  return out;
}

QueuePair QueuePair::create(std::string segment_name, std::uint32_t client_id, std::uint32_t ring_capacity,
                            std::size_t payload_bytes, bool pin) {
  const PairLayout lay = layout(ring_capacity, payload_bytes);
  QueuePair pair;
  pair.region_ = SharedRegion::create(std::move(segment_name), lay.total, pin);
  auto bytes = pair.region_.bytes();

  auto* header = new (bytes.data() + lay.header.offset) PairHeader{};
  header->client_id = client_id;
  header->ring_capacity = ring_capacity;
  header->tx_ring_offset = lay.tx_ring.offset;
  header->rx_ring_offset = lay.rx_ring.offset;
  header->tx_payload_offset = lay.tx_payload.offset;
  header->tx_payload_length = lay.tx_payload.length;
  header->rx_payload_offset = lay.rx_payload.offset;
  header->rx_payload_length = lay.rx_payload.length;
  header->rx_bell.init();
  RingQueue::initialize(bytes.subspan(lay.tx_ring.offset, lay.tx_ring.length), ring_capacity);
  RingQueue::initialize(bytes.subspan(lay.rx_ring.offset, lay.rx_ring.length), ring_capacity);
  std::atomic_thread_fence(std::memory_order_release);
  header->magic = kMagic;
  pair.bind();
  return pair;
}

QueuePair QueuePair::attach(std::string segment_name) {
  QueuePair pair;
  pair.region_ = SharedRegion::open(std::move(segment_name));
  pair.bind();
  return pair;
}

void QueuePair::bind() {
  auto bytes = region_.bytes();
  if (bytes.size() < sizeof(PairHeader)) {
    throw Error(Errc::MalformedHeader, "pair segment too small");
  }
  header_ = std::launder(reinterpret_cast<PairHeader*>(bytes.data()));
  std::atomic_thread_fence(std::memory_order_acquire);
  const PairHeader& h = *header_;
  if (h.magic != kMagic) {
    throw Error(Errc::MalformedHeader, "pair segment '" + region_.name() + "' is not initialized");
  }
  const PairLayout expected = layout(h.ring_capacity, 2 * h.tx_payload_length);
  if (expected.tx_ring.offset != h.tx_ring_offset || expected.rx_ring.offset != h.rx_ring_offset ||
      expected.tx_payload.offset != h.tx_payload_offset || expected.rx_payload.offset != h.rx_payload_offset ||
      h.rx_payload_length != h.tx_payload_length || expected.total > bytes.size()) {
    throw Error(Errc::MalformedHeader, "pair segment layout does not validate");
  }
  layout_ = expected;
  tx_ = RingQueue::attach(bytes.subspan(layout_.tx_ring.offset, layout_.tx_ring.length));
  rx_ = RingQueue::attach(bytes.subspan(layout_.rx_ring.offset, layout_.rx_ring.length));
  tx_payload_ = bytes.subspan(layout_.tx_payload.offset, layout_.tx_payload.length);
  rx_payload_ = bytes.subspan(layout_.rx_payload.offset, layout_.rx_payload.length);
}

}  // namespace rocket::transport
