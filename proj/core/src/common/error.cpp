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

#include "rocket/common/error.hpp"

#include <cerrno>
#include <cstring>

namespace rocket {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NameCollision: return "NameCollision";
    case Errc::OutOfMemory: return "OutOfMemory";
    case Errc::PinDenied: return "PinDenied";
    case Errc::ServerUnavailable: return "ServerUnavailable";
    case Errc::CapacityNotPowerOfTwo: return "CapacityNotPowerOfTwo";
    case Errc::RegionExhausted: return "RegionExhausted";
    case Errc::QueueFull: return "QueueFull";
    case Errc::OverlappingRanges: return "OverlappingRanges";
    case Errc::Misaligned: return "Misaligned";
    case Errc::InvalidDescriptor: return "InvalidDescriptor";
    case Errc::Timeout: return "Timeout";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::NegativeFit: return "NegativeFit";
    case Errc::UnknownOp: return "UnknownOp";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TooManyClients: return "TooManyClients";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::ServerError: return "ServerError";
    case Errc::ModeMismatch: return "ModeMismatch";
    case Errc::JobIdExhausted: return "JobIdExhausted";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
    case Errc::ServerLaunchFailed: return "ServerLaunchFailed";
    case Errc::SystemError: return "SystemError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

void throw_errno(std::string_view what) {
  const int err = errno;
  throw Error(Errc::SystemError, std::string(what) + ": " + std::strerror(err));
}

}  // namespace rocket
