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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace rocket {

using JobId = std::uint64_t;

enum class Mode : std::uint8_t { Sync = 0, Async = 1, Pipeline = 2 };
enum class DeviceHint : std::uint8_t { Auto = 0, Cpu = 1, Offload = 2 };
enum class InjectionHint : std::uint8_t { Default = 0, On = 1, Off = 2 };

std::string_view to_string(Mode mode) noexcept;
std::string_view to_string(DeviceHint hint) noexcept;
std::string_view to_string(InjectionHint hint) noexcept;
std::optional<Mode> parse_mode(std::string_view text) noexcept;
std::optional<DeviceHint> parse_device_hint(std::string_view text) noexcept;
std::optional<InjectionHint> parse_injection_hint(std::string_view text) noexcept;

// Synthetic per-request stage costs carried in the header extension.
struct StageCosts {
  std::uint32_t pre_us = 0;
  std::uint32_t proc_us_per_mb = 0;
  std::uint32_t post_us = 0;

  friend bool operator==(const StageCosts&, const StageCosts&) = default;
};

}  // namespace rocket

namespace rocket::transport {

inline constexpr std::size_t kSlotSize = 64;
using Slot = std::array<std::byte, kSlotSize>;

inline constexpr std::uint32_t kMessageMagic = 0x544B4352;  // "RCKT" in memory order
inline constexpr std::uint8_t kProtocolVersion = 1;

enum class MessageKind : std::uint8_t { Request = 1, Query = 2, Response = 3, Error = 4 };

enum class Subcode : std::uint16_t {
  None = 0,
  NotReady = 1,
  Unknown = 2,
  UnknownOp = 3,
  Malformed = 4,
  HandlerFailed = 5,
  ResultTooLarge = 6,
  ShuttingDown = 7,
};

std::string_view to_string(MessageKind kind) noexcept;
std::string_view to_string(Subcode code) noexcept;

struct MessageFlags {
  DeviceHint device = DeviceHint::Auto;
  InjectionHint injection = InjectionHint::Default;
  Mode mode = Mode::Sync;
  bool has_stage_costs = false;
  // Set on the server's answer to a QUERY so the client can tell it apart
  // from an unsolicited completion notice.
  bool query_reply = false;

  friend bool operator==(const MessageFlags&, const MessageFlags&) = default;
};

std::uint32_t pack_flags(const MessageFlags& flags) noexcept;
std::optional<MessageFlags> unpack_flags(std::uint32_t bits) noexcept;

// One ring slot. Wire layout (little-endian, 64 bytes):
//
//   off size field
//    0   4   magic
//    4   1   version
//    5   1   kind
//    6   2   op_code
//    8   8   job_id
//   16   4   payload_offset   (into the sender's payload range)
//   20   4   payload_len
//   24   4   result_offset    (into the rx payload range; requests only)
//   28   4   result_capacity
//   32   4   flags            (device:2 injection:2 mode:2 stages:1 reply:1)
//   36   4   generation
//   40   4   pre_us
//   44   4   proc_us_per_mb
//   48   4   post_us
//   52   2   subcode
//   54   2   reserved (zero)
//   56   8   timestamp_ns     (sender's monotonic clock at push)
struct MessageHeader {
  MessageKind kind = MessageKind::Request;
  std::uint16_t op_code = 0;
  JobId job_id = 0;
  std::uint32_t payload_offset = 0;
  std::uint32_t payload_len = 0;
  std::uint32_t result_offset = 0;
  std::uint32_t result_capacity = 0;
  MessageFlags flags{};
  std::uint32_t generation = 0;
  StageCosts stages{};
  Subcode subcode = Subcode::None;
  std::uint64_t timestamp_ns = 0;

  friend bool operator==(const MessageHeader&, const MessageHeader&) = default;
};

Slot encode(const MessageHeader& header) noexcept;

// Returns nullopt for a slot that is not a well-formed header: bad magic,
// unsupported version, unknown kind, or undefined flag bits.
std::optional<MessageHeader> decode(const Slot& slot) noexcept;

// Job id stored at bytes 8..15 regardless of validity; used to address an
// ERROR reply to a header that failed to decode.
JobId peek_job_id(const Slot& slot) noexcept;

}  // namespace rocket::transport
