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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rocket/transport/message.hpp"

namespace rocket::runtime {

inline constexpr std::uint16_t kOpEcho = 0x01;
inline constexpr std::uint16_t kOpChecksum = 0x02;
inline constexpr std::uint16_t kOpSynthetic = 0x03;

// Computes a result from `input`. The returned span must point into `input`
// or `scratch`; a handler that returns its input unchanged costs no copy.
// Throwing marks the job FAILED.
using HandlerFn = std::function<std::span<const std::byte>(std::span<const std::byte> input,
                                                           std::span<std::byte> scratch)>;

struct HandlerRegistration {
  std::uint16_t op_code = 0;
  std::string name;
  HandlerFn execute;
  // Synthetic stage costs applied when a request does not carry its own.
  std::optional<StageCosts> stage_costs;
};

class HandlerRegistry {
 public:
  // echo, checksum and synthetic.
  static HandlerRegistry with_builtins();

  // Throws Error(InvalidArgument) for a duplicate op code or name, an empty
  // name, or a missing function.
  void add(HandlerRegistration registration);

  const HandlerRegistration* find(std::uint16_t op_code) const noexcept;
  std::vector<std::pair<std::uint16_t, std::string>> table() const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<HandlerRegistration> entries_;
};

// Sum of the unsigned byte values, as returned by the checksum op.
std::uint64_t byte_sum(std::span<const std::byte> data) noexcept;

// Little-endian 8-byte encoding used for the checksum result.
std::array<std::byte, 8> encode_u64(std::uint64_t value) noexcept;
std::uint64_t decode_u64(std::span<const std::byte> bytes);

}  // namespace rocket::runtime
