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
#include <optional>
#include <string>
#include <string_view>

#include "rocket/completion/wait.hpp"
#include "rocket/engine/backend.hpp"
#include "rocket/engine/profile.hpp"
#include "rocket/engine/sim_backend.hpp"
#include "rocket/transport/message.hpp"

namespace rocket::runtime {

enum class InjectionRule { On, Off, SingleClientOnly };

std::string_view to_string(InjectionRule rule) noexcept;
std::optional<InjectionRule> parse_injection_rule(std::string_view text) noexcept;

// Server-side default for cache injection, per execution mode.
struct InjectionPolicy {
  InjectionRule sync = InjectionRule::On;
  InjectionRule async = InjectionRule::SingleClientOnly;
  InjectionRule pipeline = InjectionRule::Off;

  InjectionRule rule(Mode mode) const noexcept;
};

// An explicit request hint wins; DEFAULT defers to the policy table with
// `active_clients` as sampled when the job was dispatched.
bool resolve_injection(const InjectionPolicy& policy, Mode mode, std::uint32_t active_clients,
                       InjectionHint hint) noexcept;

struct ServerConfig {
  std::string name = "default";
  std::uint32_t max_clients = 4;
  std::uint32_t ring_capacity = 64;
  std::uint64_t payload_bytes_per_client = 32ULL << 20;
  engine::DeviceKind device = engine::DeviceKind::Sim;
  engine::EngineProfile profile = engine::EngineProfile::defaults();
  // Engine parameters for device=sim. Unset: l_fixed/alpha follow `profile`.
  std::optional<engine::SimEngineConfig> sim;
  std::uint64_t offload_threshold = 64 * 1024;
  InjectionPolicy injection{};
  std::uint32_t batch_max = 8;
  double batch_timeout_us = 200.0;
  std::uint32_t worker_threads = 2;
  bool pin = false;
  // Finished jobs remembered for QUERY; the oldest finished ones are
  // forgotten beyond this.
  std::uint32_t job_table_limit = 4096;
  completion::PollPolicy poll{};

  engine::SimEngineConfig sim_config() const;

  // Throws Error(InvalidArgument) on an unusable field.
  void validate() const;
};

}  // namespace rocket::runtime
