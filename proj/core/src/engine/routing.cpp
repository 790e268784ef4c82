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

#include "rocket/engine/routing.hpp"

#include "rocket/common/error.hpp"

namespace rocket::engine {

std::string_view to_string(Route route) noexcept {
  return route == Route::Cpu ? "cpu" : "offload";
}

Route route_device(std::size_t length, std::size_t threshold, DeviceHint hint) {
  if (threshold == 0) {
    throw Error(Errc::InvalidArgument, "offload threshold must be positive");
  }
  switch (hint) {
    case DeviceHint::Cpu: return Route::Cpu;
    case DeviceHint::Offload: return Route::Offload;
    case DeviceHint::Auto: break;
  }
  return length < threshold ? Route::Cpu : Route::Offload;
}

}  // namespace rocket::engine
