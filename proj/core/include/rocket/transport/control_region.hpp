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

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rocket/transport/doorbell.hpp"
#include "rocket/transport/queue_pair.hpp"
#include "rocket/transport/shared_region.hpp"

namespace rocket::transport {

inline constexpr std::uint32_t kControlMagic = 0x4C544352;  // "RCTL"
inline constexpr std::uint32_t kControlVersion = 1;
inline constexpr std::size_t kMaxOps = 32;
inline constexpr std::size_t kOpNameCapacity = 30;

enum class SlotState : std::uint32_t { Free = 0, Connecting = 1, Active = 2, Disconnecting = 3 };

struct OpEntry {
  std::uint16_t code;
  char name[kOpNameCapacity];
};

// Per-client pair descriptor. The client moves Free->Connecting and
// Active->Disconnecting; the server moves Connecting->Active and
// Disconnecting->Free.
struct PairDescriptor {
  alignas(64) std::atomic<std::uint32_t> state;
  std::uint32_t client_id;
  std::uint64_t client_pid;
  std::uint32_t ring_capacity;
  std::uint32_t session;
  std::uint64_t payload_bytes;
  std::uint64_t segment_bytes;
};

// Header of the server's control segment. Everything but the atomics is
// written once before `ready` is published. Host byte order, which the
// library requires to be little-endian.
struct ControlHeader {
  std::uint32_t magic;
  std::uint32_t protocol_version;
  std::atomic<std::uint32_t> ready;
  std::atomic<std::uint32_t> active_clients;
  std::uint32_t max_clients;
  std::uint32_t ring_capacity;
  std::uint64_t payload_bytes_per_client;
  std::uint64_t server_pid;
  std::uint32_t device;  // 0 = cpu, 1 = sim
  std::uint32_t op_count;
  double l_fixed_us;
  double alpha_us_per_mb;
  std::uint64_t offload_threshold;
  alignas(64) Doorbell doorbell;
  std::array<OpEntry, kMaxOps> ops;
};

struct ControlSettings {
  std::uint32_t max_clients = 4;
  std::uint32_t ring_capacity = 64;
  std::uint64_t payload_bytes_per_client = 32ULL << 20;
  std::uint32_t device = 1;
  double l_fixed_us = 73.6;
  double alpha_us_per_mb = 33.4;
  std::uint64_t offload_threshold = 64 * 1024;
};

class ControlRegion {
 public:
  // Creates and formats "rocket.<server>.ctl" (not yet ready). A leftover
  // segment whose server process is gone is reclaimed along with its pair
  // segments; a live one raises Error(NameCollision).
  static ControlRegion create(std::string_view server_name, const ControlSettings& settings,
                              std::span<const std::pair<std::uint16_t, std::string>> ops);

  // Throws Error(ServerUnavailable) if the segment is missing, malformed, or
  // not marked ready.
  static ControlRegion open(std::string_view server_name);

  ControlRegion() = default;
  ControlRegion(ControlRegion&&) noexcept = default;
  ControlRegion& operator=(ControlRegion&&) noexcept = default;

  ControlHeader& header() noexcept { return *header_; }
  const ControlHeader& header() const noexcept { return *header_; }
  PairDescriptor& slot(std::uint32_t client_id);
  std::uint32_t max_clients() const noexcept { return header_->max_clients; }
  const std::string& server_name() const noexcept { return server_name_; }
  Doorbell& doorbell() noexcept { return header_->doorbell; }
  const SharedRegion& region() const noexcept { return region_; }
  bool valid() const noexcept { return header_ != nullptr; }

  void set_ready(bool ready) noexcept;
  bool ready() const noexcept;

  // Stores the active client count with release ordering. Returns the new
  // value.
  std::uint32_t publish_concurrency(std::uint32_t active_clients) noexcept;
  std::uint32_t active_clients() const noexcept;

  std::optional<std::uint16_t> lookup_op(std::string_view name) const noexcept;
  std::optional<std::string> op_name(std::uint16_t code) const;
  std::vector<std::pair<std::uint16_t, std::string>> ops() const;

  // Client side: claims a Free slot for `pid`. nullopt when all slots are
  // taken.
  std::optional<std::uint32_t> claim_slot(std::uint64_t pid) noexcept;

  // Server side: creates the pair segment for `client_id` and records it in
  // the slot. Throws Error(ServerUnavailable) when the control block is not
  // formatted, Error(RegionExhausted) for an out-of-range id, and whatever
  // QueuePair::create raises.
  QueuePair open_queue_pair(std::uint32_t client_id, std::uint32_t ring_capacity, std::size_t payload_bytes,
                            bool pin);

  static std::size_t bytes_required(std::uint32_t max_clients) noexcept;

 private:
  void bind(std::uint32_t expected_slots);

  std::string server_name_;
  SharedRegion region_;
  ControlHeader* header_ = nullptr;
  PairDescriptor* slots_ = nullptr;
};

}  // namespace rocket::transport
