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

#include "rocket/runtime/handlers.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "rocket/common/error.hpp"

namespace rocket::runtime {

std::uint64_t byte_sum(std::span<const std::byte> data) noexcept {
  std::uint64_t sum = 0;
  for (std::byte b : data) {
    sum += static_cast<std::uint8_t>(b);
  }
  return sum;
}

std::array<std::byte, 8> encode_u64(std::uint64_t value) noexcept {
  std::array<std::byte, 8> out{};
  for (std::size_t i = 0; i < 8; ++i) {
    out[i] = static_cast<std::byte>((value >> (8 * i)) & 0xff);
  }
  return out;
}

std::uint64_t decode_u64(std::span<const std::byte> bytes) {
  if (bytes.size() != 8) {
    throw Error(Errc::InvalidArgument, "expected an 8-byte value, got " + std::to_string(bytes.size()));
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  return v;
}

HandlerRegistry HandlerRegistry::with_builtins() {
  HandlerRegistry r;
  r.add({kOpEcho, "echo",
         [](std::span<const std::byte> in, std::span<std::byte>) { return in; }, std::nullopt});
  r.add({kOpChecksum, "checksum",
         [](std::span<const std::byte> in, std::span<std::byte> scratch) -> std::span<const std::byte> {
           if (scratch.size() < 8) {
             throw Error(Errc::RegionExhausted, "checksum needs 8 bytes of scratch");
           }
           const auto sum = encode_u64(byte_sum(in));
           std::memcpy(scratch.data(), sum.data(), sum.size());
           return scratch.first(8);
         },
         std::nullopt});
  // The synthetic op returns its payload; its cost is the timed stages.
  r.add({kOpSynthetic, "synthetic",
         [](std::span<const std::byte> in, std::span<std::byte>) { return in; }, StageCosts{}});
  return r;
}

void HandlerRegistry::add(HandlerRegistration registration) {
  if (registration.name.empty() || !registration.execute) {
    throw Error(Errc::InvalidArgument, "handler registration needs a name and a function");
  }
  for (const auto& e : entries_) {
    if (e.op_code == registration.op_code || e.name == registration.name) {
      throw Error(Errc::InvalidArgument, "handler '" + registration.name + "' (op " +
                                             std::to_string(registration.op_code) + ") is already registered");
    }
  }
  entries_.push_back(std::move(registration));
}

const HandlerRegistration* HandlerRegistry::find(std::uint16_t op_code) const noexcept {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.op_code == op_code; });
  return it == entries_.end() ? nullptr : &*it;
}

std::vector<std::pair<std::uint16_t, std::string>> HandlerRegistry::table() const {
  std::vector<std::pair<std::uint16_t, std::string>> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    out.emplace_back(e.op_code, e.name);
  }
  return out;
}

}  // namespace rocket::runtime
