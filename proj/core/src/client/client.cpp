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

#include "rocket/client/client.hpp"

#include <sched.h>
#include <unistd.h>

#include <algorithm>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <unordered_map>

#include "rocket/common/error.hpp"
#include "rocket/engine/cpu_backend.hpp"
#include "rocket/engine/routing.hpp"
#include "rocket/engine/sim_backend.hpp"
#include "rocket/runtime/job.hpp"
#include "rocket/transport/control_region.hpp"
#include "rocket/transport/payload_arena.hpp"

namespace rocket::client {

using transport::MessageHeader;
using transport::MessageKind;
using transport::Subcode;

namespace {

constexpr Nanos kRxWaitNs = 5'000'000;
constexpr Nanos kSpaceWaitNs = 50'000;
constexpr std::size_t kMinResultCapacity = 64;
constexpr std::size_t kCacheEntryLimit = 4096;

Error server_error(Subcode code, JobId job) {
  return Error(Errc::ServerError, "job " + std::to_string(job) + " failed: " + std::string(transport::to_string(code)));
}

}  // namespace

struct ResponseFuture::Shared {
  std::weak_ptr<ClientSession::Impl> session;
  mutable std::mutex mu;
  FutureState state = FutureState::Pending;
  std::vector<std::byte> bytes;
  Subcode failure = Subcode::None;
};

struct ClientSession::Impl {
  struct TxBlock {
    std::size_t offset;
    JobId job;
    std::atomic<std::uint32_t>* flag;
    bool done;
  };
  struct Pending {
    std::uint32_t rx_offset;
    std::uint32_t capacity;
    std::uint32_t generation;
    std::shared_ptr<ResponseFuture::Shared> future;  // null for pipeline jobs
  };
  // A finished pipeline result. It stays in the rx area until collected
  // and moves to the heap only when the space is needed for a new request.
  struct Cached {
    std::vector<std::byte> bytes;
    Subcode failure = Subcode::None;
    std::optional<std::uint32_t> rx_offset;
    std::uint32_t rx_len = 0;
  };

  ClientConfig config;
  transport::ControlRegion control;
  std::uint32_t id = 0;
  transport::QueuePair pair;
  std::optional<transport::PayloadArena> tx_arena;
  std::optional<transport::PayloadArena> rx_arena;
  std::unique_ptr<engine::CopyBackend> engine;
  engine::CpuBackend cpu;
  engine::EngineProfile profile;
  std::uint64_t threshold = 1;
  std::uint64_t next_seq = 1;
  std::uint32_t next_generation = 1;
  bool closed = false;

  std::mutex mu;
  std::deque<TxBlock> tx_blocks;
  std::unordered_map<JobId, Pending> pending;
  std::unordered_map<JobId, Cached> cache;
  std::deque<JobId> cache_order;
  std::size_t cache_bytes = 0;
  std::size_t cache_limit = 0;
  std::unordered_map<JobId, MessageHeader> query_replies;
  ClientStats stats;

  ~Impl() { close(); }

  // ---- connection ---------------------------------------------------------

  void connect() {
    using transport::SlotState;
    control = transport::ControlRegion::open(config.server_name);
    auto claimed = control.claim_slot(static_cast<std::uint64_t>(::getpid()));
    if (!claimed) {
      throw Error(Errc::TooManyClients, "server '" + config.server_name + "' has no free client slot");
    }
    id = *claimed;
    control.doorbell().ring();
    auto& desc = control.slot(id);
    const Nanos deadline = now_ns() + us_to_ns(config.connect_timeout_ms * 1000.0);
    for (;;) {
      const auto state = static_cast<SlotState>(desc.state.load(std::memory_order_acquire));
      if (state == SlotState::Active) {
        break;
      }
      if (state == SlotState::Free || now_ns() >= deadline || !control.ready()) {
        auto expected = static_cast<std::uint32_t>(SlotState::Connecting);
        desc.state.compare_exchange_strong(expected, static_cast<std::uint32_t>(SlotState::Free));
        throw Error(Errc::ServerUnavailable, "server '" + config.server_name + "' did not accept the connection");
      }
      precise_sleep_for(50'000);
    }
    pair = transport::QueuePair::attach(transport::pair_segment_name(config.server_name, id));
    tx_arena.emplace(pair.tx_payload().size());
    rx_arena.emplace(pair.rx_payload().size());
    cache_limit = pair.rx_payload().size();

    const auto& header = control.header();
    profile.l_fixed_us = header.l_fixed_us;
    profile.alpha_us_per_mb = header.alpha_us_per_mb;
    threshold = header.offload_threshold;
    if (header.device == 1) {
      engine::SimEngineConfig sc;
      sc.l_fixed_us = header.l_fixed_us;
      sc.alpha_us_per_mb = header.alpha_us_per_mb;
      engine = std::make_unique<engine::SimBackend>(sc);
    } else {
      engine = std::make_unique<engine::CpuBackend>();
    }
  }

  void close() {
    using transport::SlotState;
    std::unique_lock lock(mu);
    if (closed || !control.valid()) {
      closed = true;
      return;
    }
    closed = true;
    for (auto& [job, p] : pending) {
      if (p.future) {
        std::lock_guard fl(p.future->mu);
        p.future->state = FutureState::Failed;
        p.future->failure = Subcode::ShuttingDown;
      }
    }
    pending.clear();
    auto& desc = control.slot(id);
    auto expected = static_cast<std::uint32_t>(SlotState::Active);
    if (desc.state.compare_exchange_strong(expected, static_cast<std::uint32_t>(SlotState::Disconnecting))) {
      control.doorbell().ring();
      // Wait for the server to release the slot so a reconnect sees it free.
      const Nanos deadline = now_ns() + 1'000'000'000ULL;
      while (control.ready() && now_ns() < deadline &&
             desc.state.load(std::memory_order_acquire) != static_cast<std::uint32_t>(SlotState::Free)) {
        precise_sleep_for(100'000);
      }
    }
    engine.reset();
  }

  void ensure_open() const {
    if (closed) {
      throw Error(Errc::ServerUnavailable, "session is closed");
    }
  }

  // ---- rx side --------------------------------------------------------------

  std::size_t pump_locked() {
    std::size_t n = 0;
    while (auto raw = pair.rx().try_pop()) {
      ++n;
      auto h = transport::decode(*raw);
      if (!h) {
        continue;
      }
      if (h->flags.query_reply) {
        query_replies[h->job_id] = *h;
        continue;
      }
      auto it = pending.find(h->job_id);
      if (it == pending.end()) {
        continue;  // already collected through a QUERY
      }
      Pending p = std::move(it->second);
      pending.erase(it);
      if (h->kind == MessageKind::Response && h->generation == p.generation && h->payload_offset == p.rx_offset &&
          h->payload_len <= p.capacity) {
        if (p.future) {
          resolve(h->job_id, p, take_result(p.rx_offset, h->payload_len), Subcode::None);
        } else {
          keep_in_rx(h->job_id, p.rx_offset, h->payload_len);
        }
      } else {
        rx_arena->release(p.rx_offset);
        mark_tx_done(h->job_id);
        resolve(h->job_id, p, {}, h->kind == MessageKind::Error ? h->subcode : Subcode::Malformed);
      }
    }
    return n;
  }

  // Copies a finished result out of shared memory and recycles its space.
  std::vector<std::byte> take_result(std::uint32_t rx_offset, std::uint32_t len) {
    auto out = copy_result(rx_offset, len);
    rx_arena->release(rx_offset);
    return out;
  }

  std::vector<std::byte> copy_result(std::uint32_t rx_offset, std::uint32_t len) {
    const Nanos t0 = now_ns();
    const auto src = pair.rx_payload().subspan(rx_offset, len);
    std::vector<std::byte> out(src.begin(), src.end());
    stats.rx_copy_ns += now_ns() - t0;
    return out;
  }

  void keep_in_rx(JobId job, std::uint32_t rx_offset, std::uint32_t len) {
    Cached c;
    c.rx_offset = rx_offset;
    c.rx_len = len;
    cache[job] = std::move(c);
    cache_order.push_back(job);
    trim_cache();
  }

  // Result bytes of a cache entry; the entry keeps them.
  std::vector<std::byte> cached_bytes(const Cached& c) {
    return c.rx_offset ? copy_result(*c.rx_offset, c.rx_len) : c.bytes;
  }

  // Removes an entry and hands its bytes over.
  std::vector<std::byte> retire(std::unordered_map<JobId, Cached>::iterator it) {
    Cached c = std::move(it->second);
    cache.erase(it);
    if (c.rx_offset) {
      return take_result(*c.rx_offset, c.rx_len);
    }
    cache_bytes -= c.bytes.size();
    return std::move(c.bytes);
  }

  // Moves the oldest result still held in the rx area to the heap. Returns
  // false if there is none.
  bool spill_oldest() {
    for (JobId job : cache_order) {
      auto it = cache.find(job);
      if (it != cache.end() && it->second.rx_offset) {
        Cached& c = it->second;
        c.bytes = take_result(*c.rx_offset, c.rx_len);
        c.rx_offset.reset();
        cache_bytes += c.bytes.size();
        trim_cache();
        return true;
      }
    }
    return false;
  }

  void trim_cache() {
    while (cache_order.size() > 1 && (cache_bytes > cache_limit || cache_order.size() > kCacheEntryLimit)) {
      auto old = cache.find(cache_order.front());
      if (old != cache.end()) {
        retire(old);
      }
      cache_order.pop_front();
    }
  }

  void resolve(JobId job, const Pending& p, std::vector<std::byte> bytes, Subcode failure) {
    if (p.future) {
      std::lock_guard fl(p.future->mu);
      p.future->bytes = std::move(bytes);
      p.future->failure = failure;
      p.future->state = failure == Subcode::None ? FutureState::Ready : FutureState::Failed;
      return;
    }
    cache_bytes += bytes.size();
    cache[job] = Cached{std::move(bytes), failure, std::nullopt, 0};
    cache_order.push_back(job);
    trim_cache();
  }

  template <typename Done>
  void wait_until(std::unique_lock<std::mutex>& lock, Done done) {
    for (;;) {
      const std::uint32_t seq = pair.rx_doorbell().sequence();
      pump_locked();
      if (done()) {
        return;
      }
      if (!control.ready()) {
        throw Error(Errc::ServerUnavailable, "server '" + config.server_name + "' stopped");
      }
      lock.unlock();
      pair.rx_doorbell().wait(seq, kRxWaitNs);
      lock.lock();
    }
  }

  // Used by futures, possibly from another thread.
  void wait_future(const ResponseFuture::Shared& shared) {
    std::unique_lock lock(mu);
    wait_until(lock, [&] {
      std::lock_guard fl(shared.mu);
      return shared.state != FutureState::Pending;
    });
  }

  // ---- tx side --------------------------------------------------------------

  void mark_tx_done(JobId job) {
    for (auto& b : tx_blocks) {
      if (b.job == job) {
        b.done = true;
      }
    }
  }

  void reclaim_tx() {
    for (auto it = tx_blocks.begin(); it != tx_blocks.end();) {
      if (it->done || it->flag->load(std::memory_order_acquire) != 0) {
        tx_arena->release(it->offset);
        it = tx_blocks.erase(it);
      } else {
        ++it;
      }
    }
  }

  // Waits for space without the session lock held for long: rx traffic is
  // processed while waiting, which is what frees result space.
  template <typename Try>
  auto acquire(std::unique_lock<std::mutex>& lock, Try attempt) {
    for (;;) {
      if (auto got = attempt()) {
        return *got;
      }
      const std::uint32_t seq = pair.rx_doorbell().sequence();
      if (pump_locked() != 0) {
        continue;
      }
      if (!control.ready()) {
        throw Error(Errc::ServerUnavailable, "server '" + config.server_name + "' stopped");
      }
      lock.unlock();
      pair.rx_doorbell().wait(seq, kSpaceWaitNs);
      lock.lock();
    }
  }

  void copy_to_tx(std::span<const std::byte> data, std::span<std::byte> dst, DeviceHint hint) {
    if (data.empty()) {
      return;
    }
    engine::CompletionRecord record;
    const engine::CopyDescriptor desc{data, dst, false, &record};
    engine::CopyBackend* target =
        engine::route_device(data.size(), threshold, hint) == engine::Route::Offload ? engine.get() : &cpu;
    const Nanos t0 = now_ns();
    while (!target->try_submit(desc)) {
      if (hint == DeviceHint::Auto) {
        target = &cpu;
      } else {
        ::sched_yield();
      }
    }
    const Nanos t1 = now_ns();
    ++(target == &cpu ? stats.cpu_copies : stats.offload_copies);
    const auto ws = completion::wait(record, config.poll, profile, data.size());
    stats.tx_copy_ns += t1 - t0;
    stats.tx_wait_ns += now_ns() - t1;
    stats.polls += ws.polls;
  }

  std::pair<JobId, Pending> submit(std::uint16_t op, std::span<const std::byte> data, const Overrides& o, Mode mode) {
    std::unique_lock lock(mu);
    ensure_open();
    if (mode != config.mode) {
      throw Error(Errc::ModeMismatch, "session mode is " + std::string(to_string(config.mode)) + ", request used " +
                                          std::string(to_string(mode)));
    }
    if (!control.op_name(op)) {
      throw Error(Errc::UnknownOp, "op " + std::to_string(op) + " is not registered on the server");
    }
    const std::size_t capacity = std::max(o.result_capacity.value_or(data.size()), kMinResultCapacity);
    const std::size_t block = data.size() + transport::kTxPrefixBytes;
    if (!tx_arena->fits(block) || !rx_arena->fits(capacity) || data.size() > UINT32_MAX || capacity > UINT32_MAX) {
      throw Error(Errc::PayloadTooLarge, std::to_string(data.size()) + "-byte payload (result room " +
                                             std::to_string(capacity) + ") does not fit the queue pair");
    }
    if (next_seq > runtime::kJobSeqMask) {
      throw Error(Errc::JobIdExhausted, "job id space for this session is used up");
    }
    const JobId job = runtime::make_job_id(id, next_seq++);
    const DeviceHint device = o.device.value_or(config.device_hint);
    const InjectionHint injection = o.injection.value_or(config.cache_injection);

    const std::size_t tx_off = acquire(lock, [&]() -> std::optional<std::size_t> {
      reclaim_tx();
      return tx_arena->allocate(block);
    });
    auto* flag = transport::tx_consumed_flag(pair.tx_payload(), tx_off + transport::kTxPrefixBytes);
    flag->store(0, std::memory_order_relaxed);
    tx_blocks.push_back({tx_off, job, flag, false});
    const std::size_t rx_off = acquire(lock, [&]() -> std::optional<std::size_t> {
      for (;;) {
        if (auto got = rx_arena->allocate(capacity)) {
          return got;
        }
        if (!spill_oldest()) {
          return std::nullopt;
        }
      }
    });

    const std::size_t payload_off = tx_off + transport::kTxPrefixBytes;
    copy_to_tx(data, pair.tx_payload().subspan(payload_off, data.size()), device);

    MessageHeader h;
    h.kind = MessageKind::Request;
    h.op_code = op;
    h.job_id = job;
    h.payload_offset = static_cast<std::uint32_t>(payload_off);
    h.payload_len = static_cast<std::uint32_t>(data.size());
    h.result_offset = static_cast<std::uint32_t>(rx_off);
    h.result_capacity = static_cast<std::uint32_t>(capacity);
    h.flags.device = device;
    h.flags.injection = injection;
    h.flags.mode = mode;
    if (o.stages) {
      h.flags.has_stage_costs = true;
      h.stages = *o.stages;
    }
    h.generation = next_generation++;
    Pending p{h.result_offset, h.result_capacity, h.generation, nullptr};
    push(lock, h);
    ++stats.requests;
    return {job, p};
  }

  void push(std::unique_lock<std::mutex>& lock, MessageHeader h) {
    h.timestamp_ns = now_ns();
    const auto encoded = transport::encode(h);
    acquire(lock, [&]() -> std::optional<bool> {
      if (pair.tx().try_push(encoded)) {
        return true;
      }
      control.doorbell().ring();
      return std::nullopt;
    });
    control.doorbell().ring();
  }
};

// ---- ResponseFuture ---------------------------------------------------------

FutureState ResponseFuture::state() const {
  if (!shared_) {
    return FutureState::Failed;
  }
  std::lock_guard lock(shared_->mu);
  return shared_->state;
}

const std::vector<std::byte>& ResponseFuture::get() const {
  if (!shared_) {
    throw Error(Errc::InvalidArgument, "empty future");
  }
  if (state() == FutureState::Pending) {
    auto session = shared_->session.lock();
    if (!session) {
      throw Error(Errc::ServerUnavailable, "session closed before job " + std::to_string(job_id_) + " completed");
    }
    session->wait_future(*shared_);
  }
  std::lock_guard lock(shared_->mu);
  if (shared_->state == FutureState::Failed) {
    throw server_error(shared_->failure, job_id_);
  }
  return shared_->bytes;
}

// ---- ClientSession ------------------------------------------------------------

ClientSession ClientSession::connect(ClientConfig config) {
  config.poll.validate();
  auto impl = std::make_shared<Impl>();
  impl->config = std::move(config);
  impl->connect();
  return ClientSession(std::move(impl));
}

ClientSession::ClientSession(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
ClientSession::ClientSession(ClientSession&&) noexcept = default;
ClientSession& ClientSession::operator=(ClientSession&&) noexcept = default;

ClientSession::~ClientSession() {
  close();
}

void ClientSession::close() {
  if (impl_) {
    impl_->close();
  }
}

std::uint32_t ClientSession::client_id() const noexcept {
  return impl_->id;
}

Mode ClientSession::mode() const noexcept {
  return impl_->config.mode;
}

std::optional<std::uint16_t> ClientSession::op_code(std::string_view name) const {
  return impl_->control.lookup_op(name);
}

std::uint32_t ClientSession::active_clients() const noexcept {
  return impl_->control.active_clients();
}

namespace {

std::uint16_t resolve_op(const ClientSession& s, std::string_view name) {
  auto code = s.op_code(name);
  if (!code) {
    throw Error(Errc::UnknownOp, "op '" + std::string(name) + "' is not registered on the server");
  }
  return *code;
}

}  // namespace

ResponseFuture ClientSession::submit_future(std::uint16_t op, std::span<const std::byte> data, const Overrides& o,
                                            Mode mode) {
  auto shared = std::make_shared<ResponseFuture::Shared>();
  shared->session = impl_;
  auto [job, pending] = impl_->submit(op, data, o, mode);
  pending.future = shared;
  std::lock_guard lock(impl_->mu);
  impl_->pending.emplace(job, std::move(pending));
  return ResponseFuture(job, std::move(shared));
}

std::vector<std::byte> ClientSession::request_sync(std::uint16_t op, std::span<const std::byte> data,
                                                   const Overrides& o) {
  return submit_future(op, data, o, Mode::Sync).get();
}

std::vector<std::byte> ClientSession::request_sync(std::string_view op, std::span<const std::byte> data,
                                                   const Overrides& o) {
  return request_sync(resolve_op(*this, op), data, o);
}

ResponseFuture ClientSession::request_async(std::uint16_t op, std::span<const std::byte> data, const Overrides& o) {
  return submit_future(op, data, o, Mode::Async);
}

ResponseFuture ClientSession::request_async(std::string_view op, std::span<const std::byte> data,
                                            const Overrides& o) {
  return request_async(resolve_op(*this, op), data, o);
}

JobId ClientSession::request_pipeline(std::uint16_t op, std::span<const std::byte> data, const Overrides& o) {
  auto [job, pending] = impl_->submit(op, data, o, Mode::Pipeline);
  std::lock_guard lock(impl_->mu);
  impl_->pending.emplace(job, std::move(pending));
  return job;
}

JobId ClientSession::request_pipeline(std::string_view op, std::span<const std::byte> data, const Overrides& o) {
  return request_pipeline(resolve_op(*this, op), data, o);
}

QueryResult ClientSession::query_result(JobId job) {
  Impl& s = *impl_;
  std::unique_lock lock(s.mu);
  s.ensure_open();
  auto cached = [&]() -> std::optional<QueryResult> {
    auto it = s.cache.find(job);
    if (it == s.cache.end()) {
      return std::nullopt;
    }
    if (it->second.failure != Subcode::None) {
      throw server_error(it->second.failure, job);
    }
    return QueryResult{QueryStatus::Ready, s.cached_bytes(it->second)};
  };
  if (auto hit = cached()) {
    return *hit;
  }
  MessageHeader q;
  q.kind = MessageKind::Query;
  q.job_id = job;
  q.flags.mode = s.config.mode;
  s.query_replies.erase(job);
  s.push(lock, q);
  ++s.stats.queries;
  s.wait_until(lock, [&] { return s.query_replies.contains(job); });
  const MessageHeader reply = s.query_replies[job];
  s.query_replies.erase(job);

  if (reply.kind == MessageKind::Error) {
    switch (reply.subcode) {
      case Subcode::NotReady: return {QueryStatus::NotReady, {}};
      case Subcode::Unknown: return {QueryStatus::Unknown, {}};
      default: throw server_error(reply.subcode, job);
    }
  }
  if (auto hit = cached()) {
    return *hit;
  }
  auto it = s.pending.find(job);
  if (it == s.pending.end() || it->second.generation != reply.generation ||
      it->second.rx_offset != reply.payload_offset || reply.payload_len > it->second.capacity) {
    return {QueryStatus::Unknown, {}};  // result space already recycled
  }
  Impl::Pending p = std::move(it->second);
  s.pending.erase(it);
  s.keep_in_rx(job, p.rx_offset, reply.payload_len);
  return *cached();
}

std::vector<std::byte> ClientSession::wait_result(JobId job) {
  Impl& s = *impl_;
  std::unique_lock lock(s.mu);
  s.ensure_open();
  s.wait_until(lock, [&] { return s.cache.contains(job) || !s.pending.contains(job); });
  auto it = s.cache.find(job);
  if (it == s.cache.end()) {
    throw Error(Errc::InvalidArgument, "job " + std::to_string(job) + " is not outstanding on this session");
  }
  // Collecting the result retires it from the cache.
  const Subcode failure = it->second.failure;
  auto bytes = s.retire(it);
  if (failure != Subcode::None) {
    throw server_error(failure, job);
  }
  return bytes;
}

std::size_t ClientSession::pump() {
  std::lock_guard lock(impl_->mu);
  return impl_->pump_locked();
}

ClientStats ClientSession::stats() const {
  std::lock_guard lock(impl_->mu);
  return impl_->stats;
}

void ClientSession::reset_stats() {
  std::lock_guard lock(impl_->mu);
  impl_->stats = {};
}

}  // namespace rocket::client
