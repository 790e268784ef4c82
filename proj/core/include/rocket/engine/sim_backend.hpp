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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "rocket/engine/backend.hpp"

namespace rocket::engine {

struct SimEngineConfig {
  double l_fixed_us = 73.6;
  double alpha_us_per_mb = 33.4;
  std::uint32_t queue_depth = 32;
  std::uint32_t workers = 1;
  double jitter_pct = 0.0;  // in [0, 50]
  std::uint64_t seed = 0x5eed;

  // Throws Error(InvalidArgument) when a field is out of range.
  void validate() const;
};

// Asynchronous engine emulated with dedicated worker threads. Each worker is
// one serialized transfer channel: a descriptor finishes at
//   max(submit + l_fixed + alpha * MB, previous finish on that channel + alpha * MB)
// (MB = 10^6 bytes), scaled by jitter when configured. The worker performs
// the real copy, the injection touch if requested, then sleeps out whatever
// remains before publishing COMPLETE.
class SimBackend final : public CopyBackend {
 public:
  explicit SimBackend(SimEngineConfig config = {});
  ~SimBackend() override;

  SimBackend(const SimBackend&) = delete;
  SimBackend& operator=(const SimBackend&) = delete;

  DeviceKind kind() const noexcept override { return DeviceKind::Sim; }
  std::optional<SubmitTicket> try_submit(const CopyDescriptor& desc) override;

  const SimEngineConfig& config() const noexcept { return config_; }
  std::uint32_t in_flight() const noexcept;

  // Modeled (jitter-free) duration of a lone transfer of `bytes`.
  double model_latency_us(std::size_t bytes) const noexcept;

 private:
  struct Job {
    CopyDescriptor desc;
    Nanos deadline;
  };
  struct Worker {
    std::deque<Job> queue;
    std::condition_variable cv;
    Nanos channel_free_ns = 0;
    std::thread thread;
  };

  void run(Worker& worker);

  SimEngineConfig config_;
  mutable std::mutex mu_;
  std::vector<std::unique_ptr<Worker>> workers_;
  std::atomic<std::uint32_t> in_flight_{0};
  std::uint64_t sequence_ = 0;
  std::mt19937_64 rng_;
  bool stopping_ = false;
};

}  // namespace rocket::engine
