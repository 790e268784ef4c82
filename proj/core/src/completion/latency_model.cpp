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

#include "rocket/completion/latency_model.hpp"

namespace rocket::completion {

double estimate_latency_us(double l_fixed_us, double alpha_us_per_mb, double size_mb) noexcept {
  return l_fixed_us + alpha_us_per_mb * size_mb;
}

double estimate_latency_us(const engine::EngineProfile& profile, std::size_t bytes) noexcept {
  return estimate_latency_us(profile.l_fixed_us, profile.alpha_us_per_mb,
                             static_cast<double>(bytes) / kBytesPerMb);
}

}  // namespace rocket::completion
