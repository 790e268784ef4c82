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

#include "rocket/runtime/job.hpp"

#include <algorithm>

namespace rocket::runtime {

std::string_view to_string(JobState state) noexcept {
  switch (state) {
    case JobState::Received: return "RECEIVED";
    case JobState::CopyingIn: return "COPYING_IN";
    case JobState::Executing: return "EXECUTING";
    case JobState::CopyingOut: return "COPYING_OUT";
    case JobState::Done: return "DONE";
    case JobState::Failed: return "FAILED";
  }
  return "?";
}

bool JobRecord::advance(JobState next) noexcept {
  JobState cur = state.load(std::memory_order_relaxed);
  for (;;) {
    const bool ok = next == JobState::Failed ? (cur != JobState::Done && cur != JobState::Failed)
                                             : (cur != JobState::Failed && next > cur);
    if (!ok) {
      return false;
    }
    stamps[static_cast<std::size_t>(next)] = now_ns();
    if (state.compare_exchange_weak(cur, next, std::memory_order_release, std::memory_order_relaxed)) {
      return true;
    }
  }
}

void JobTable::insert(std::shared_ptr<JobRecord> job) {
  std::lock_guard lock(mu_);
  const JobId id = job->id;
  if (jobs_.insert_or_assign(id, std::move(job)).second) {
    order_.push_back(id);
  }
  evict_locked();
}

std::shared_ptr<JobRecord> JobTable::find(JobId id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  return it == jobs_.end() ? nullptr : it->second;
}

std::size_t JobTable::size() const {
  std::lock_guard lock(mu_);
  return jobs_.size();
}

void JobTable::forget_client(std::uint32_t client_id) {
  std::lock_guard lock(mu_);
  std::erase_if(jobs_, [&](const auto& kv) { return kv.second->client_id == client_id; });
  std::erase_if(order_, [&](JobId id) { return !jobs_.contains(id); });
}

void JobTable::evict_locked() {
  // Scan from the oldest; in-flight jobs keep their place in the order.
  for (auto it = order_.begin(); jobs_.size() > limit_ && it != order_.end();) {
    auto job = jobs_.find(*it);
    if (job == jobs_.end()) {
      it = order_.erase(it);
      continue;
    }
    const JobState s = job->second->load();
    if (s == JobState::Done || s == JobState::Failed) {
      jobs_.erase(job);
      it = order_.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace rocket::runtime
