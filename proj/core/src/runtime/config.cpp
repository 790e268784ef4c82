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

#include "rocket/runtime/config.hpp"

#include "rocket/common/error.hpp"
#include "rocket/transport/ring_queue.hpp"

namespace rocket::runtime {

std::string_view to_string(InjectionRule rule) noexcept {
  switch (rule) {
    case InjectionRule::On: return "on";
    case InjectionRule::Off: return "off";
    case InjectionRule::SingleClientOnly: return "single-client";
  }
  return "?";
}

std::optional<InjectionRule> parse_injection_rule(std::string_view text) noexcept {
  for (auto r : {InjectionRule::On, InjectionRule::Off, InjectionRule::SingleClientOnly}) {
    if (text == to_string(r)) {
      return r;
    }
  }
  return std::nullopt;
}

InjectionRule InjectionPolicy::rule(Mode mode) const noexcept {
  switch (mode) {
    case Mode::Sync: return sync;
    case Mode::Async: return async;
    case Mode::Pipeline: return pipeline;
  }
  return InjectionRule::Off;
}

bool resolve_injection(const InjectionPolicy& policy, Mode mode, std::uint32_t active_clients,
                       InjectionHint hint) noexcept {
  if (hint == InjectionHint::On) {
    return true;
  }
  if (hint == InjectionHint::Off) {
    return false;
  }
  switch (policy.rule(mode)) {
    case InjectionRule::On: return true;
    case InjectionRule::Off: return false;
    case InjectionRule::SingleClientOnly: return active_clients == 1;
  }
  return false;
}

engine::SimEngineConfig ServerConfig::sim_config() const {
  if (sim) {
    return *sim;
  }
  engine::SimEngineConfig c;
  c.l_fixed_us = profile.l_fixed_us;
  c.alpha_us_per_mb = profile.alpha_us_per_mb;
  return c;
}

void ServerConfig::validate() const {
  if (name.empty() || name.find('/') != std::string::npos) {
    throw Error(Errc::InvalidArgument, "server name must be non-empty and contain no '/'");
  }
  if (max_clients == 0 || max_clients > (1u << 15)) {
    throw Error(Errc::InvalidArgument, "max_clients must be in [1, 32768]");
  }
  if (!transport::is_power_of_two(ring_capacity)) {
    throw Error(Errc::CapacityNotPowerOfTwo, "ring_capacity must be a power of two");
  }
  if (batch_max < 1) {
    throw Error(Errc::InvalidArgument, "batch_max must be at least 1");
  }
  if (!(batch_timeout_us >= 0.0)) {
    throw Error(Errc::InvalidArgument, "batch_timeout_us must be non-negative");
  }
  if (worker_threads < 1) {
    throw Error(Errc::InvalidArgument, "worker_threads must be at least 1");
  }
  if (offload_threshold == 0) {
    throw Error(Errc::InvalidArgument, "offload_threshold must be positive");
  }
  if (job_table_limit == 0) {
    throw Error(Errc::InvalidArgument, "job_table_limit must be positive");
  }
  profile.validate();
  sim_config().validate();
  poll.validate();
}

}  // namespace rocket::runtime
