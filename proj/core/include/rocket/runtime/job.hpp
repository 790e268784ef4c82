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

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <unordered_map>

#include "rocket/common/clock.hpp"
#include "rocket/transport/message.hpp"

namespace rocket::runtime {

enum class JobState : std::uint8_t { Received = 0, CopyingIn, Executing, CopyingOut, Done, Failed };

std::string_view to_string(JobState state) noexcept;

// Job ids carry the issuing client in the top 16 bits and a per-session
// sequence starting at 1 in the low 48.
inline constexpr unsigned kJobSeqBits = 48;
inline constexpr JobId kJobSeqMask = (JobId{1} << kJobSeqBits) - 1;

constexpr JobId make_job_id(std::uint32_t client_id, std::uint64_t seq) noexcept {
  return (static_cast<JobId>(client_id) << kJobSeqBits) | (seq & kJobSeqMask);
}
constexpr std::uint32_t job_client(JobId id) noexcept { return static_cast<std::uint32_t>(id >> kJobSeqBits); }
constexpr std::uint64_t job_sequence(JobId id) noexcept { return id & kJobSeqMask; }

struct JobRecord {
  JobId id = 0;
  std::uint32_t client_id = 0;
  transport::MessageHeader request{};
  bool injection = false;
  std::atomic<JobState> state{JobState::Received};
  // Indexed by JobState; written by the owning worker before the state
  // store that makes them visible.
  std::array<Nanos, 6> stamps{};
  std::uint32_t result_offset = 0;
  std::uint32_t result_len = 0;
  transport::Subcode failure = transport::Subcode::None;

  JobState load() const noexcept { return state.load(std::memory_order_acquire); }

  // Moves forward in the declared order, or to Failed from any state but
  // Done. Returns false, changing nothing, for any other transition.
  bool advance(JobState next) noexcept;
};

// Jobs the QueryHandler can answer for. Finished jobs beyond `limit` are
// forgotten oldest first; in-flight jobs are never evicted.
class JobTable {
 public:
  explicit JobTable(std::size_t limit) : limit_(limit) {}

  void insert(std::shared_ptr<JobRecord> job);
  std::shared_ptr<JobRecord> find(JobId id) const;
  std::size_t size() const;

  // Drops every job belonging to `client_id` (on disconnect).
  void forget_client(std::uint32_t client_id);

 private:
  void evict_locked();

  std::size_t limit_;
  mutable std::mutex mu_;
  std::unordered_map<JobId, std::shared_ptr<JobRecord>> jobs_;
  std::deque<JobId> order_;
};

}  // namespace rocket::runtime
