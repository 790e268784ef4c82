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

#include <stdexcept>
#include <string>
#include <string_view>

namespace rocket {

enum class Errc {
  NameCollision,
  OutOfMemory,
  PinDenied,
  ServerUnavailable,
  CapacityNotPowerOfTwo,
  RegionExhausted,
  QueueFull,
  OverlappingRanges,
  Misaligned,
  InvalidDescriptor,
  Timeout,
  InsufficientSamples,
  NegativeFit,
  UnknownOp,
  MalformedHeader,
  TooManyClients,
  PayloadTooLarge,
  ServerError,
  ModeMismatch,
  JobIdExhausted,
  InvalidArgument,
  IoError,
  ScenarioInvalid,
  ServerLaunchFailed,
  SystemError,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers can branch on the condition rather than on message text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Throws Error(SystemError) with strerror(errno) appended.
[[noreturn]] void throw_errno(std::string_view what);

}  // namespace rocket
