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

#include "rocket/engine/profile.hpp"

namespace rocket::completion {

inline constexpr double kBytesPerMb = 1e6;

// Predicted copy latency in microseconds: l_fixed + alpha * bytes / 10^6.
double estimate_latency_us(const engine::EngineProfile& profile, std::size_t bytes) noexcept;
double estimate_latency_us(double l_fixed_us, double alpha_us_per_mb, double size_mb) noexcept;

}  // namespace rocket::completion
