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

#include "rocket/engine/sim_backend.hpp"

#include <pthread.h>
#include <sched.h>

#include <algorithm>
#include <cstring>

#include "rocket/common/error.hpp"

namespace rocket::engine {

void SimEngineConfig::validate() const {
  if (!(l_fixed_us >= 0.0) || !(alpha_us_per_mb >= 0.0)) {
    throw Error(Errc::InvalidArgument, "sim engine latency parameters must be non-negative");
  }
  if (queue_depth < 1) {
    throw Error(Errc::InvalidArgument, "sim engine queue_depth must be at least 1");
  }
  if (workers < 1) {
    throw Error(Errc::InvalidArgument, "sim engine needs at least one worker");
  }
  if (!(jitter_pct >= 0.0 && jitter_pct <= 50.0)) {
    throw Error(Errc::InvalidArgument, "sim engine jitter_pct must be within [0, 50]");
  }
}

SimBackend::SimBackend(SimEngineConfig config) : config_(config), rng_(config.seed) {
  config_.validate();
  workers_.reserve(config_.workers);
  for (std::uint32_t i = 0; i < config_.workers; ++i) {
    workers_.push_back(std::make_unique<Worker>());
  }
  for (auto& w : workers_) {
    w->thread = std::thread([this, raw = w.get()] { run(*raw); });
  }
}

SimBackend::~SimBackend() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  for (auto& w : workers_) {
    w->cv.notify_all();
  }
  for (auto& w : workers_) {
    if (w->thread.joinable()) {
      w->thread.join();
    }
  }
}

double SimBackend::model_latency_us(std::size_t bytes) const noexcept {
  return config_.l_fixed_us + config_.alpha_us_per_mb * (static_cast<double>(bytes) / 1e6);
}

std::uint32_t SimBackend::in_flight() const noexcept {
  return in_flight_.load(std::memory_order_acquire);
}

std::optional<SubmitTicket> SimBackend::try_submit(const CopyDescriptor& desc) {
  validate(desc);
  std::unique_lock lock(mu_);
  if (in_flight_.load(std::memory_order_acquire) >= config_.queue_depth) {
    lock.unlock();
    count_queue_full();
    return std::nullopt;
  }
  in_flight_.fetch_add(1, std::memory_order_relaxed);
  const std::uint64_t seq = ++sequence_;
  Worker& worker = *workers_[seq % workers_.size()];

  double scale = 1.0;
  if (config_.jitter_pct > 0.0) {
    std::uniform_real_distribution<double> dist(-config_.jitter_pct, config_.jitter_pct);
    scale = 1.0 + dist(rng_) / 100.0;
  }
  const Nanos submit = now_ns();
  const double transfer_us = config_.alpha_us_per_mb * (static_cast<double>(desc.length()) / 1e6) * scale;
  const double setup_us = config_.l_fixed_us * scale;
  const Nanos deadline = std::max(submit + us_to_ns(setup_us + transfer_us),
                                  worker.channel_free_ns + us_to_ns(transfer_us));
  worker.channel_free_ns = deadline;

  desc.completion->submit_ns.store(submit, std::memory_order_relaxed);
  worker.queue.push_back(Job{desc, deadline});
  lock.unlock();
  count_submit(desc.length());
  worker.cv.notify_one();
  return SubmitTicket{seq, submit, deadline};
}

void SimBackend::run(Worker& worker) {
  enable_fine_timer_slack();
  // A device does not take the submitter's core the instant it is handed
  // work. Batch scheduling keeps the worker from preempting on wakeup, which
  // matters when the host has fewer cores than runnable threads.
  sched_param param{};
  ::pthread_setschedparam(::pthread_self(), SCHED_BATCH, &param);
  std::unique_lock lock(mu_);
  for (;;) {
    worker.cv.wait(lock, [&] { return stopping_ || !worker.queue.empty(); });
    if (worker.queue.empty()) {
      return;  // stopping and drained
    }
    Job job = worker.queue.front();
    worker.queue.pop_front();
    lock.unlock();

    const CopyDescriptor& d = job.desc;
    std::memcpy(d.dst.data(), d.src.data(), d.length());
    std::uint64_t touched = 0;
    if (d.cache_injection) {
      touched = inject_touch(d.dst.first(d.length()));
    }
    const bool overrun = now_ns() > job.deadline;
    precise_sleep_until(job.deadline);
    // Free the depth slot first so a caller reacting to COMPLETE can
    // resubmit straight away.
    in_flight_.fetch_sub(1, std::memory_order_release);
    count_complete(touched, overrun);
    d.completion->publish(CompletionStatus::Complete, d.length(), now_ns());

    lock.lock();
  }
}

}  // namespace rocket::engine
