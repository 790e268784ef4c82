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

#include "rocket/transport/message.hpp"

namespace rocket {

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::Sync: return "sync";
    case Mode::Async: return "async";
    case Mode::Pipeline: return "pipeline";
  }
  return "?";
}

std::string_view to_string(DeviceHint hint) noexcept {
  switch (hint) {
    case DeviceHint::Auto: return "auto";
    case DeviceHint::Cpu: return "cpu";
    case DeviceHint::Offload: return "offload";
  }
  return "?";
}

std::string_view to_string(InjectionHint hint) noexcept {
  switch (hint) {
    case InjectionHint::Default: return "default";
    case InjectionHint::On: return "on";
    case InjectionHint::Off: return "off";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept {
  if (text == "sync") return Mode::Sync;
  if (text == "async") return Mode::Async;
  if (text == "pipeline" || text == "pipelined") return Mode::Pipeline;
  return std::nullopt;
}

std::optional<DeviceHint> parse_device_hint(std::string_view text) noexcept {
  if (text == "auto") return DeviceHint::Auto;
  if (text == "cpu") return DeviceHint::Cpu;
  if (text == "offload" || text == "sim" || text == "dsa") return DeviceHint::Offload;
  return std::nullopt;
}

std::optional<InjectionHint> parse_injection_hint(std::string_view text) noexcept {
  if (text == "default") return InjectionHint::Default;
  if (text == "on") return InjectionHint::On;
  if (text == "off") return InjectionHint::Off;
  return std::nullopt;
}

}  // namespace rocket

namespace rocket::transport {

namespace {

template <typename T>
void store_le(Slot& slot, std::size_t offset, T value) noexcept {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    slot[offset + i] = static_cast<std::byte>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFFu);
  }
}

template <typename T>
T load_le(const Slot& slot, std::size_t offset) noexcept {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(slot[offset + i])) << (8 * i);
  }
  return static_cast<T>(value);
}

constexpr std::uint32_t kFlagMask = 0xFFu;

}  // namespace

std::string_view to_string(MessageKind kind) noexcept {
  switch (kind) {
    case MessageKind::Request: return "REQUEST";
    case MessageKind::Query: return "QUERY";
    case MessageKind::Response: return "RESPONSE";
    case MessageKind::Error: return "ERROR";
  }
  return "?";
}

std::string_view to_string(Subcode code) noexcept {
  switch (code) {
    case Subcode::None: return "NONE";
    case Subcode::NotReady: return "NOT_READY";
    case Subcode::Unknown: return "UNKNOWN";
    case Subcode::UnknownOp: return "UNKNOWN_OP";
    case Subcode::Malformed: return "MALFORMED";
    case Subcode::HandlerFailed: return "HANDLER_FAILED";
    case Subcode::ResultTooLarge: return "RESULT_TOO_LARGE";
    case Subcode::ShuttingDown: return "SHUTTING_DOWN";
  }
  return "?";
}

std::uint32_t pack_flags(const MessageFlags& flags) noexcept {
  std::uint32_t bits = 0;
  bits |= static_cast<std::uint32_t>(flags.device) & 0x3u;
  bits |= (static_cast<std::uint32_t>(flags.injection) & 0x3u) << 2;
  bits |= (static_cast<std::uint32_t>(flags.mode) & 0x3u) << 4;
  bits |= (flags.has_stage_costs ? 1u : 0u) << 6;
  bits |= (flags.query_reply ? 1u : 0u) << 7;
  return bits;
}

std::optional<MessageFlags> unpack_flags(std::uint32_t bits) noexcept {
  if ((bits & ~kFlagMask) != 0) {
    return std::nullopt;
  }
  const auto device = bits & 0x3u;
  const auto injection = (bits >> 2) & 0x3u;
  const auto mode = (bits >> 4) & 0x3u;
  if (device > 2 || injection > 2 || mode > 2) {
    return std::nullopt;
  }
  MessageFlags flags;
  flags.device = static_cast<DeviceHint>(device);
  flags.injection = static_cast<InjectionHint>(injection);
  flags.mode = static_cast<Mode>(mode);
  flags.has_stage_costs = ((bits >> 6) & 1u) != 0;
  flags.query_reply = ((bits >> 7) & 1u) != 0;
  return flags;
}

Slot encode(const MessageHeader& h) noexcept {
  Slot slot{};
  store_le<std::uint32_t>(slot, 0, kMessageMagic);
  store_le<std::uint8_t>(slot, 4, kProtocolVersion);
  store_le<std::uint8_t>(slot, 5, static_cast<std::uint8_t>(h.kind));
  store_le<std::uint16_t>(slot, 6, h.op_code);
  store_le<std::uint64_t>(slot, 8, h.job_id);
  store_le<std::uint32_t>(slot, 16, h.payload_offset);
  store_le<std::uint32_t>(slot, 20, h.payload_len);
  store_le<std::uint32_t>(slot, 24, h.result_offset);
  store_le<std::uint32_t>(slot, 28, h.result_capacity);
  store_le<std::uint32_t>(slot, 32, pack_flags(h.flags));
  store_le<std::uint32_t>(slot, 36, h.generation);
  store_le<std::uint32_t>(slot, 40, h.stages.pre_us);
  store_le<std::uint32_t>(slot, 44, h.stages.proc_us_per_mb);
  store_le<std::uint32_t>(slot, 48, h.stages.post_us);
  store_le<std::uint16_t>(slot, 52, static_cast<std::uint16_t>(h.subcode));
  store_le<std::uint64_t>(slot, 56, h.timestamp_ns);
  return slot;
}

std::optional<MessageHeader> decode(const Slot& slot) noexcept {
  if (load_le<std::uint32_t>(slot, 0) != kMessageMagic) {
    return std::nullopt;
  }
  if (load_le<std::uint8_t>(slot, 4) != kProtocolVersion) {
    return std::nullopt;
  }
  const auto kind = load_le<std::uint8_t>(slot, 5);
  if (kind < 1 || kind > 4) {
    return std::nullopt;
  }
  const auto flags = unpack_flags(load_le<std::uint32_t>(slot, 32));
  if (!flags) {
    return std::nullopt;
  }
  const auto subcode = load_le<std::uint16_t>(slot, 52);
  if (subcode > static_cast<std::uint16_t>(Subcode::ShuttingDown)) {
    return std::nullopt;
  }
  if (load_le<std::uint16_t>(slot, 54) != 0) {
    return std::nullopt;
  }
  MessageHeader h;
  h.kind = static_cast<MessageKind>(kind);
  h.op_code = load_le<std::uint16_t>(slot, 6);
  h.job_id = load_le<std::uint64_t>(slot, 8);
  h.payload_offset = load_le<std::uint32_t>(slot, 16);
  h.payload_len = load_le<std::uint32_t>(slot, 20);
  h.result_offset = load_le<std::uint32_t>(slot, 24);
  h.result_capacity = load_le<std::uint32_t>(slot, 28);
  h.flags = *flags;
  h.generation = load_le<std::uint32_t>(slot, 36);
  h.stages.pre_us = load_le<std::uint32_t>(slot, 40);
  h.stages.proc_us_per_mb = load_le<std::uint32_t>(slot, 44);
  h.stages.post_us = load_le<std::uint32_t>(slot, 48);
  h.subcode = static_cast<Subcode>(subcode);
  h.timestamp_ns = load_le<std::uint64_t>(slot, 56);
  return h;
}

JobId peek_job_id(const Slot& slot) noexcept {
  return load_le<std::uint64_t>(slot, 8);
}

}  // namespace rocket::transport
