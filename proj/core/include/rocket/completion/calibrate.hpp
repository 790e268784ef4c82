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
#include <cstdint>
#include <span>
#include <vector>

#include "rocket/engine/backend.hpp"
#include "rocket/engine/profile.hpp"

namespace rocket::completion {

struct CalibrationSample {
  double size_mb = 0.0;
  double latency_us = 0.0;
};

struct LinearFit {
  double l_fixed_us = 0.0;
  double alpha_us_per_mb = 0.0;
  // RMS of the residuals divided by the mean observed latency.
  double relative_residual = 0.0;
};

// Ordinary least squares of latency_us against size_mb.
// Throws Error(InsufficientSamples) with fewer than two distinct sizes.
LinearFit fit_latency_model(std::span<const CalibrationSample> samples);

struct CalibrationResult {
  engine::EngineProfile profile;
  std::vector<CalibrationSample> medians;  // one per size, ascending
  std::vector<CalibrationSample> raw;
  double relative_residual = 0.0;
};

// Times `reps` copies of each size (bytes) through `backend` on prefaulted
// buffers, measuring completion timestamp minus submit timestamp, and fits
// the per-size medians. Needs at least 4 distinct sizes and 3 reps
// (Error(InsufficientSamples)); a non-positive coefficient raises
// Error(NegativeFit).
CalibrationResult calibrate(engine::CopyBackend& backend, std::span<const std::size_t> sizes, std::uint32_t reps);

}  // namespace rocket::completion
