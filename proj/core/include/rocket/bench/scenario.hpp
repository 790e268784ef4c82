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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rocket/common/kv_file.hpp"
#include "rocket/engine/backend.hpp"
#include "rocket/engine/profile.hpp"
#include "rocket/transport/message.hpp"

namespace rocket::bench {

enum class Workload { Echo, Checksum, Synthetic };

std::string_view to_string(Workload w) noexcept;
std::optional<Workload> parse_workload(std::string_view text) noexcept;

struct Scenario {
  Workload workload = Workload::Echo;
  StageCosts stages{};  // used by Workload::Synthetic
  std::uint64_t payload_bytes = 1ULL << 20;
  std::uint32_t batch = 8;
  std::uint32_t clients = 1;
  Mode mode = Mode::Sync;
  engine::DeviceKind device = engine::DeviceKind::Sim;
  InjectionHint injection = InjectionHint::Default;
  DeviceHint device_hint = DeviceHint::Auto;
  // Per client, warmup included.
  std::uint32_t iterations = 100;
  std::uint32_t warmup = 10;
  // Outstanding requests per client in async mode.
  std::uint32_t async_window = 2;
  std::uint32_t worker_threads = 2;
  engine::EngineProfile profile = engine::EngineProfile::defaults();
  std::uint64_t offload_threshold = 64 * 1024;
  double jitter_pct = 0.0;

  std::uint32_t measured() const noexcept { return iterations - warmup; }

  // Throws Error(ScenarioInvalid).
  void validate() const;
};

struct MatrixAxes {
  std::vector<Mode> modes;
  std::vector<engine::DeviceKind> devices;
  std::vector<InjectionHint> injections;
  std::vector<std::uint32_t> clients;
  std::vector<std::uint32_t> batches;

  std::size_t cells() const noexcept {
    return modes.size() * devices.size() * injections.size() * clients.size() * batches.size();
  }
};

struct MatrixSpec {
  Scenario base;
  MatrixAxes axes;
};

// Reads a key=value scenario file. Recognized keys: workload, payload_bytes,
// modes, devices, injections, clients, batches, iterations, warmup, and
// optionally pre_us, proc_us_per_mb, post_us, device_hint, offload_threshold,
// worker_threads, async_window, jitter_pct, profile (path to a profile file,
// relative to the scenario file). Axis keys take comma-separated lists and
// default to the base scenario's single value.
MatrixSpec parse_matrix(const KeyValueFile& kv, const std::filesystem::path& base_dir = {});
MatrixSpec load_matrix(const std::filesystem::path& path);

// Cross product of the axes applied to `base`, modes varying slowest.
std::vector<Scenario> expand(const MatrixSpec& spec);

}  // namespace rocket::bench
