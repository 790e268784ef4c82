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

#include "rocket/completion/wait.hpp"

#include <sched.h>
#include <time.h>

#include <algorithm>

#include "rocket/common/error.hpp"
#include "rocket/completion/latency_model.hpp"

namespace rocket::completion {

using engine::CompletionRecord;
using engine::CompletionStatus;

std::string_view to_string(PollKind kind) noexcept {
  switch (kind) {
    case PollKind::Busy: return "busy";
    case PollKind::Lazy: return "lazy";
    case PollKind::Passive: return "passive";
    case PollKind::Hybrid: return "hybrid";
  }
  return "?";
}

std::optional<PollKind> parse_poll_kind(std::string_view text) noexcept {
  for (auto k : {PollKind::Busy, PollKind::Lazy, PollKind::Passive, PollKind::Hybrid}) {
    if (text == to_string(k)) {
      return k;
    }
  }
  return std::nullopt;
}

void PollPolicy::validate() const {
  if (!(lazy_period_us > 0.0)) {
    throw Error(Errc::InvalidArgument, "lazy_period_us must be positive");
  }
  if (!(passive_cap_us > 0.0 && passive_cap_us <= 25.0)) {
    throw Error(Errc::InvalidArgument, "passive_cap_us must be in (0, 25]");
  }
  if (!(deferral_factor > 0.0 && deferral_factor < 1.0)) {
    throw Error(Errc::InvalidArgument, "deferral_factor must be in (0, 1)");
  }
  if (timeout_us && !(*timeout_us >= 0.0)) {
    throw Error(Errc::InvalidArgument, "timeout_us must be non-negative");
  }
}

namespace {

constexpr Nanos kNoDeadline = ~Nanos{0};

class Poller {
 public:
  Poller(const CompletionRecord& record, const PollPolicy& policy) : record_(record), start_(now_ns()) {
    if (policy.timeout_us) {
      deadline_ = start_ + us_to_ns(*policy.timeout_us);
    }
  }

  bool poll() noexcept {
    ++stats_.polls;
    const CompletionStatus s = record_.load();
    if (s != CompletionStatus::Pending) {
      stats_.outcome = s;
      stats_.observed_ns = now_ns();
      return true;
    }
    return false;
  }

  bool expired() const noexcept { return deadline_ != kNoDeadline && now_ns() >= deadline_; }
  Nanos clamp(Nanos t) const noexcept { return std::min(t, deadline_); }
  Nanos start() const noexcept { return start_; }

  WaitStats finish() noexcept {
    stats_.waited_us = ns_to_us(now_ns() - start_);
    return stats_;
  }

 private:
  const CompletionRecord& record_;
  Nanos start_;
  Nanos deadline_ = kNoDeadline;
  WaitStats stats_;
};

void passive_pause(Nanos cap, Nanos limit) noexcept {
  const Nanos now = now_ns();
  const Nanos until = std::min(now + cap, limit);
  if (until <= now) {
    return;
  }
  const Nanos d = until - now;
  timespec ts{static_cast<time_t>(d / 1'000'000'000ULL), static_cast<long>(d % 1'000'000'000ULL)};
  ::clock_nanosleep(CLOCK_MONOTONIC, 0, &ts, nullptr);
}

WaitStats run_busy(Poller& p) {
  while (!p.poll() && !p.expired()) {
    cpu_relax();
  }
  return p.finish();
}

WaitStats run_lazy(Poller& p, const PollPolicy& policy) {
  const Nanos period = us_to_ns(policy.lazy_period_us);
  for (Nanos k = 1; !p.poll() && !p.expired(); ++k) {
    precise_sleep_until(p.clamp(p.start() + k * period));
  }
  return p.finish();
}

WaitStats run_passive(Poller& p, const PollPolicy& policy) {
  const Nanos cap = us_to_ns(policy.passive_cap_us);
  while (!p.poll() && !p.expired()) {
    passive_pause(cap, p.clamp(kNoDeadline));
  }
  return p.finish();
}

WaitStats run_hybrid(Poller& p, const PollPolicy& policy, Nanos defer_until) {
  if (p.poll()) {
    return p.finish();
  }
  if (defer_until > now_ns()) {
    precise_sleep_until(p.clamp(defer_until));
  }
  const Nanos cap = us_to_ns(policy.passive_cap_us);
  for (std::uint32_t round = 0; round <= policy.passive_rounds; ++round) {
    if (p.poll() || p.expired()) {
      return p.finish();
    }
    if (round < policy.passive_rounds) {
      passive_pause(cap, p.clamp(kNoDeadline));
    }
  }
  while (!p.expired()) {
    ::sched_yield();
    if (p.poll()) {
      break;
    }
  }
  return p.finish();
}

}  // namespace

WaitStats wait(const CompletionRecord& record, const PollPolicy& policy, const engine::EngineProfile& profile,
               std::size_t bytes) {
  policy.validate();
  enable_fine_timer_slack();
  Poller p(record, policy);
  switch (policy.kind) {
    case PollKind::Busy: return run_busy(p);
    case PollKind::Lazy: return run_lazy(p, policy);
    case PollKind::Passive: return run_passive(p, policy);
    case PollKind::Hybrid: {
      const Nanos submit = record.submit_ns.load(std::memory_order_relaxed);
      const Nanos base = submit != 0 ? submit : p.start();
      const double defer_us = policy.deferral_factor * estimate_latency_us(profile, bytes);
      return run_hybrid(p, policy, base + us_to_ns(defer_us));
    }
  }
  return p.finish();
}

WaitStats wait_deferred(const CompletionRecord& record, const PollPolicy& policy, Nanos defer_until) {
  policy.validate();
  enable_fine_timer_slack();
  Poller p(record, policy);
  return run_hybrid(p, policy, defer_until);
}

}  // namespace rocket::completion
