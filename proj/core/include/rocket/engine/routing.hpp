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

#include <cstddef>
#include <string_view>

#include "rocket/transport/message.hpp"

namespace rocket::engine {

enum class Route { Cpu, Offload };

std::string_view to_string(Route route) noexcept;

// Explicit hints are returned unchanged. AUTO picks the CPU for transfers
// shorter than `threshold` and the offload engine otherwise.
// Throws Error(InvalidArgument) if threshold is 0.
Route route_device(std::size_t length, std::size_t threshold, DeviceHint hint);

}  // namespace rocket::engine
