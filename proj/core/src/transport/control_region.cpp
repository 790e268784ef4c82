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

#include "rocket/transport/control_region.hpp"

#include <signal.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>
#include <new>

#include "rocket/common/error.hpp"

namespace rocket::transport {

static_assert(std::endian::native == std::endian::little, "shared-memory layouts assume little-endian hosts");

namespace {

std::size_t slots_offset() noexcept {
  return (sizeof(ControlHeader) + 63) / 64 * 64;
}

bool process_alive(std::uint64_t pid) noexcept {
  if (pid == 0) {
    return false;
  }
  if (::kill(static_cast<pid_t>(pid), 0) == 0) {
    return true;
  }
  return errno == EPERM;
}

// Removes a control segment (and its pair segments) left by a server that
// is no longer running. Returns true if anything was reclaimed.
bool reclaim_stale(std::string_view server_name) {
  const std::string ctl = control_segment_name(server_name);
  SharedRegion old;
  try {
    old = SharedRegion::open(ctl);
  } catch (const Error&) {
    return false;
  }
  if (old.length() < sizeof(ControlHeader)) {
    SharedRegion::remove(ctl);
    return true;
  }
  const auto* header = std::launder(reinterpret_cast<const ControlHeader*>(old.base()));
  if (header->magic == kControlMagic && process_alive(header->server_pid)) {
    return false;
  }
  const std::uint32_t slots = header->magic == kControlMagic ? header->max_clients : 0;
  for (std::uint32_t i = 0; i < slots; ++i) {
    SharedRegion::remove(pair_segment_name(server_name, i));
  }
  SharedRegion::remove(ctl);
  return true;
}

}  // namespace

std::size_t ControlRegion::bytes_required(std::uint32_t max_clients) noexcept {
  return slots_offset() + static_cast<std::size_t>(max_clients) * sizeof(PairDescriptor);
}

ControlRegion ControlRegion::create(std::string_view server_name, const ControlSettings& settings,
                                    std::span<const std::pair<std::uint16_t, std::string>> ops) {
  if (settings.max_clients == 0) {
    throw Error(Errc::InvalidArgument, "max_clients must be at least 1");
  }
  if (ops.size() > kMaxOps) {
    throw Error(Errc::InvalidArgument, "too many registered operations");
  }
  const std::string name = control_segment_name(server_name);
  ControlRegion ctl;
  ctl.server_name_ = std::string(server_name);
  try {
    ctl.region_ = SharedRegion::create(name, bytes_required(settings.max_clients), false);
  } catch (const Error& e) {
    if (e.code() != Errc::NameCollision || !reclaim_stale(server_name)) {
      throw;
    }
    ctl.region_ = SharedRegion::create(name, bytes_required(settings.max_clients), false);
  }

  auto* header = new (ctl.region_.base()) ControlHeader{};
  header->protocol_version = kControlVersion;
  header->ready.store(0, std::memory_order_relaxed);
  header->active_clients.store(0, std::memory_order_relaxed);
  header->max_clients = settings.max_clients;
  header->ring_capacity = settings.ring_capacity;
  header->payload_bytes_per_client = settings.payload_bytes_per_client;
  header->server_pid = static_cast<std::uint64_t>(::getpid());
  header->device = settings.device;
  header->l_fixed_us = settings.l_fixed_us;
  header->alpha_us_per_mb = settings.alpha_us_per_mb;
  header->offload_threshold = settings.offload_threshold;
  header->doorbell.init();
  header->op_count = static_cast<std::uint32_t>(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& [code, op] = ops[i];
    if (op.empty() || op.size() >= kOpNameCapacity) {
      throw Error(Errc::InvalidArgument, "operation name '" + op + "' must be 1.." +
                                             std::to_string(kOpNameCapacity - 1) + " characters");
    }
    header->ops[i].code = code;
    std::memset(header->ops[i].name, 0, kOpNameCapacity);
    std::memcpy(header->ops[i].name, op.data(), op.size());
  }
  auto* slots = reinterpret_cast<PairDescriptor*>(ctl.region_.base() + slots_offset());
  for (std::uint32_t i = 0; i < settings.max_clients; ++i) {
    auto* slot = new (slots + i) PairDescriptor{};
    slot->state.store(static_cast<std::uint32_t>(SlotState::Free), std::memory_order_relaxed);
    slot->client_id = i;
  }
  std::atomic_thread_fence(std::memory_order_release);
  header->magic = kControlMagic;
  ctl.bind(settings.max_clients);
  return ctl;
}

ControlRegion ControlRegion::open(std::string_view server_name) {
  ControlRegion ctl;
  ctl.server_name_ = std::string(server_name);
  ctl.region_ = SharedRegion::open(control_segment_name(server_name));
  try {
    ctl.bind(0);
  } catch (const Error& e) {
    throw Error(Errc::ServerUnavailable, e.what());
  }
  if (!ctl.ready()) {
    throw Error(Errc::ServerUnavailable, "server '" + std::string(server_name) + "' is not accepting clients");
  }
  return ctl;
}

void ControlRegion::bind(std::uint32_t expected_slots) {
  if (region_.length() < sizeof(ControlHeader)) {
    throw Error(Errc::MalformedHeader, "control segment too small");
  }
  header_ = std::launder(reinterpret_cast<ControlHeader*>(region_.base()));
  std::atomic_thread_fence(std::memory_order_acquire);
  if (header_->magic != kControlMagic || header_->protocol_version != kControlVersion) {
    header_ = nullptr;
    throw Error(Errc::MalformedHeader, "control segment is not formatted");
  }
  if (expected_slots != 0 && header_->max_clients != expected_slots) {
    throw Error(Errc::MalformedHeader, "control segment slot count mismatch");
  }
  if (region_.length() < bytes_required(header_->max_clients)) {
    throw Error(Errc::MalformedHeader, "control segment shorter than its slot table");
  }
  slots_ = std::launder(reinterpret_cast<PairDescriptor*>(region_.base() + slots_offset()));
}

PairDescriptor& ControlRegion::slot(std::uint32_t client_id) {
  if (client_id >= header_->max_clients) {
    throw Error(Errc::RegionExhausted, "client id " + std::to_string(client_id) + " out of range");
  }
  return slots_[client_id];
}

void ControlRegion::set_ready(bool ready) noexcept {
  header_->ready.store(ready ? 1u : 0u, std::memory_order_release);
}

bool ControlRegion::ready() const noexcept {
  return header_ != nullptr && header_->ready.load(std::memory_order_acquire) == 1u;
}

std::uint32_t ControlRegion::publish_concurrency(std::uint32_t active_clients) noexcept {
  header_->active_clients.store(active_clients, std::memory_order_release);
  return active_clients;
}

std::uint32_t ControlRegion::active_clients() const noexcept {
  return header_->active_clients.load(std::memory_order_acquire);
}

std::optional<std::uint16_t> ControlRegion::lookup_op(std::string_view name) const noexcept {
  for (std::uint32_t i = 0; i < header_->op_count && i < kMaxOps; ++i) {
    const auto& entry = header_->ops[i];
    if (std::string_view(entry.name, strnlen(entry.name, kOpNameCapacity)) == name) {
      return entry.code;
    }
  }
  return std::nullopt;
}

std::optional<std::string> ControlRegion::op_name(std::uint16_t code) const {
  for (std::uint32_t i = 0; i < header_->op_count && i < kMaxOps; ++i) {
    const auto& entry = header_->ops[i];
    if (entry.code == code) {
      return std::string(entry.name, strnlen(entry.name, kOpNameCapacity));
    }
  }
  return std::nullopt;
}

std::vector<std::pair<std::uint16_t, std::string>> ControlRegion::ops() const {
  std::vector<std::pair<std::uint16_t, std::string>> out;
  for (std::uint32_t i = 0; i < header_->op_count && i < kMaxOps; ++i) {
    const auto& entry = header_->ops[i];
    out.emplace_back(entry.code, std::string(entry.name, strnlen(entry.name, kOpNameCapacity)));
  }
  return out;
}

std::optional<std::uint32_t> ControlRegion::claim_slot(std::uint64_t pid) noexcept {
  for (std::uint32_t i = 0; i < header_->max_clients; ++i) {
    auto expected = static_cast<std::uint32_t>(SlotState::Free);
    if (slots_[i].state.load(std::memory_order_acquire) != expected) {
      continue;
    }
    if (slots_[i].state.compare_exchange_strong(expected, static_cast<std::uint32_t>(SlotState::Connecting),
                                                std::memory_order_acq_rel)) {
      slots_[i].client_pid = pid;
      std::atomic_thread_fence(std::memory_order_release);
      return i;
    }
  }
  return std::nullopt;
}

QueuePair ControlRegion::open_queue_pair(std::uint32_t client_id, std::uint32_t ring_capacity,
                                         std::size_t payload_bytes, bool pin) {
  if (header_ == nullptr) {
    throw Error(Errc::ServerUnavailable, "control region is not published");
  }
  PairDescriptor& desc = slot(client_id);
  const std::string name = pair_segment_name(server_name_, client_id);
  // A pair from an earlier session on this slot is stale by construction.
  SharedRegion::remove(name);
  QueuePair pair = QueuePair::create(name, client_id, ring_capacity, payload_bytes, pin);
  desc.ring_capacity = ring_capacity;
  desc.payload_bytes = payload_bytes;
  desc.segment_bytes = pair.region().length();
  desc.session += 1;
  return pair;
}

}  // namespace rocket::transport
