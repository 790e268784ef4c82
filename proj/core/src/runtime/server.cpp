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

#include "rocket/runtime/server.hpp"

#include <signal.h>
#include <sched.h>
#include <sys/mman.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include "rocket/common/error.hpp"
#include "rocket/completion/latency_model.hpp"
#include "rocket/completion/wait.hpp"
#include "rocket/engine/cpu_backend.hpp"
#include "rocket/engine/routing.hpp"
#include "rocket/engine/sim_backend.hpp"
#include "rocket/runtime/job.hpp"
#include "rocket/transport/control_region.hpp"

namespace rocket::runtime {

using transport::MessageHeader;
using transport::MessageKind;
using transport::Subcode;

namespace {

constexpr std::size_t kAlign = 64;
constexpr std::size_t kPopsPerVisit = 8;
constexpr Nanos kIdleWaitNs = 20'000'000;
constexpr Nanos kDrainPollNs = 1'000'000;
constexpr Nanos kLivenessPeriodNs = 200'000'000;

std::size_t align_up(std::size_t v, std::size_t a) noexcept {
  return (v + a - 1) / a * a;
}

// Private, pre-faulted staging memory for one worker: payloads are copied
// in here and handler output is built here. Bump-allocated per task.
class StagingBuffer {
 public:
  explicit StagingBuffer(std::size_t bytes) : size_(transport::round_up_to_page(bytes)) {
    void* p = ::mmap(nullptr, size_, PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS | MAP_POPULATE, -1, 0);
    if (p == MAP_FAILED) {
      throw_errno("mmap staging buffer");
    }
    base_ = static_cast<std::byte*>(p);
    const std::size_t page = transport::page_size();
    for (std::size_t off = 0; off < size_; off += page) {
      base_[off] = std::byte{0};
    }
  }
  ~StagingBuffer() {
    if (base_ != nullptr) {
      ::munmap(base_, size_);
    }
  }
  StagingBuffer(const StagingBuffer&) = delete;
  StagingBuffer& operator=(const StagingBuffer&) = delete;

  void reset() noexcept { used_ = 0; }
  std::size_t remaining() const noexcept { return size_ - used_; }
  std::size_t size() const noexcept { return size_; }

  std::span<std::byte> take(std::size_t bytes) noexcept {
    const std::size_t need = align_up(std::max<std::size_t>(bytes, 1), kAlign);
    if (need > remaining()) {
      return {};
    }
    std::span<std::byte> out(base_ + used_, bytes);
    used_ += need;
    return out;
  }

  static std::size_t footprint(std::size_t bytes) noexcept { return align_up(std::max<std::size_t>(bytes, 1), kAlign); }

 private:
  std::byte* base_ = nullptr;
  std::size_t size_ = 0;
  std::size_t used_ = 0;
};

struct AtomicStats {
  std::atomic<std::uint64_t> requests{0}, queries{0}, jobs_done{0}, jobs_failed{0}, errors_sent{0}, batches{0};
  std::atomic<std::uint64_t> copy_in_ns{0}, wait_ns{0}, exec_ns{0}, copy_out_ns{0}, polls{0};
  std::atomic<std::uint64_t> cpu_copies{0}, offload_copies{0}, queue_full_fallbacks{0};

  template <typename... A>
  static void zero(A&... a) noexcept {
    (a.store(0, std::memory_order_relaxed), ...);
  }
  void reset() noexcept {
    zero(requests, queries, jobs_done, jobs_failed, errors_sent, batches, copy_in_ns, wait_ns, exec_ns,
         copy_out_ns, polls, cpu_copies, offload_copies, queue_full_fallbacks);
  }
};

void add(std::atomic<std::uint64_t>& a, std::uint64_t v) noexcept {
  a.fetch_add(v, std::memory_order_relaxed);
}

}  // namespace

struct Server::Impl {
  struct ClientSlot {
    transport::QueuePair pair;
    bool active = false;
    std::uint64_t pid = 0;
    std::mutex rx_mu;
    std::atomic<std::uint32_t> in_flight{0};
    std::vector<std::shared_ptr<JobRecord>> batch;
    Nanos batch_started = 0;
  };

  struct Task {
    std::vector<std::shared_ptr<JobRecord>> jobs;
    bool pipeline = false;
  };

  struct Worker {
    std::thread thread;
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Task> tasks;
    std::unique_ptr<StagingBuffer> staging;
  };

  // One in-flight copy owned by a worker.
  struct Copy {
    engine::CompletionRecord record;
    std::size_t bytes = 0;
    bool offloaded = false;
  };

  // Per-job working state inside a task.
  struct Work {
    std::shared_ptr<JobRecord> job;
    const HandlerRegistration* handler = nullptr;
    StageCosts stages{};
    std::span<std::byte> input;
    std::span<std::byte> scratch;
    std::span<const std::byte> result;
    Copy in;
    Copy out;
    bool failed = false;
  };

  Impl(ServerConfig c, HandlerRegistry h)
      : config(std::move(c)), handlers(std::move(h)), jobs(config.job_table_limit) {}

  ServerConfig config;
  HandlerRegistry handlers;
  JobTable jobs;
  transport::ControlRegion control;
  std::unique_ptr<engine::CopyBackend> engine;
  engine::CpuBackend cpu;
  std::vector<std::unique_ptr<ClientSlot>> slots;
  std::vector<std::unique_ptr<Worker>> workers;
  std::thread dispatcher;
  std::atomic<bool> stopping{false};
  std::atomic<bool> started{false};
  std::uint32_t active = 0;  // dispatcher-owned
  AtomicStats st;

  // ---- setup / teardown -------------------------------------------------

  void start() {
    config.validate();
    if (started.load()) {
      return;
    }
    if (config.device == engine::DeviceKind::Sim) {
      engine = std::make_unique<engine::SimBackend>(config.sim_config());
    } else {
      engine = std::make_unique<engine::CpuBackend>();
    }
    transport::ControlSettings cs;
    cs.max_clients = config.max_clients;
    cs.ring_capacity = config.ring_capacity;
    cs.payload_bytes_per_client = config.payload_bytes_per_client;
    cs.device = config.device == engine::DeviceKind::Sim ? 1u : 0u;
    cs.l_fixed_us = config.profile.l_fixed_us;
    cs.alpha_us_per_mb = config.profile.alpha_us_per_mb;
    cs.offload_threshold = config.offload_threshold;
    const auto table = handlers.table();
    control = transport::ControlRegion::create(config.name, cs, table);

    const auto lay = transport::QueuePair::layout(config.ring_capacity, config.payload_bytes_per_client);
    // A task's staging holds inputs (bounded by tx) and outputs (bounded by rx).
    const std::size_t staging_bytes = lay.tx_payload.length + lay.rx_payload.length + 2 * kAlign;
    slots.clear();
    for (std::uint32_t i = 0; i < config.max_clients; ++i) {
      slots.push_back(std::make_unique<ClientSlot>());
    }
    workers.clear();
    for (std::uint32_t i = 0; i < config.worker_threads; ++i) {
      auto w = std::make_unique<Worker>();
      w->staging = std::make_unique<StagingBuffer>(staging_bytes);
      workers.push_back(std::move(w));
    }
    stopping.store(false);
    for (auto& w : workers) {
      w->thread = std::thread([this, raw = w.get()] { worker_loop(*raw); });
    }
    dispatcher = std::thread([this] { dispatch_loop(); });
    control.set_ready(true);
    started.store(true);
  }

  void stop() {
    if (!started.exchange(false)) {
      return;
    }
    control.set_ready(false);
    stopping.store(true);
    control.doorbell().ring();
    if (dispatcher.joinable()) {
      dispatcher.join();
    }
    for (auto& w : workers) {
      {
        std::lock_guard lock(w->mu);
      }
      w->cv.notify_all();
    }
    for (auto& w : workers) {
      if (w->thread.joinable()) {
        w->thread.join();
      }
    }
    workers.clear();
    for (auto& s : slots) {
      s->pair = transport::QueuePair{};
    }
    control = transport::ControlRegion{};
    engine.reset();
  }

  // ---- responses --------------------------------------------------------

  void push_rx(ClientSlot& slot, const MessageHeader& h) {
    std::lock_guard lock(slot.rx_mu);
    if (!slot.pair.valid()) {
      return;
    }
    const auto encoded = transport::encode(h);
    while (!slot.pair.rx().try_push(encoded)) {
      if (stopping.load(std::memory_order_relaxed)) {
        return;
      }
      ::sched_yield();
    }
    slot.pair.rx_doorbell().ring();
  }

  MessageHeader reply_base(const MessageHeader& req, MessageKind kind) const noexcept {
    MessageHeader h;
    h.kind = kind;
    h.op_code = req.op_code;
    h.job_id = req.job_id;
    h.flags.mode = req.flags.mode;
    h.generation = req.generation;
    return h;
  }

  void send_error(ClientSlot& slot, const MessageHeader& req, Subcode code, bool query_reply) {
    MessageHeader h = reply_base(req, MessageKind::Error);
    h.subcode = code;
    h.flags.query_reply = query_reply;
    h.timestamp_ns = now_ns();
    add(st.errors_sent, 1);
    push_rx(slot, h);
  }

  void send_result(ClientSlot& slot, const JobRecord& job, bool query_reply) {
    MessageHeader h = reply_base(job.request, MessageKind::Response);
    h.payload_offset = job.result_offset;
    h.payload_len = job.result_len;
    h.result_offset = job.result_offset;
    h.result_capacity = job.request.result_capacity;
    h.flags.query_reply = query_reply;
    h.timestamp_ns = now_ns();
    push_rx(slot, h);
  }

  // ---- dispatcher -------------------------------------------------------

  void dispatch_loop() {
    enable_fine_timer_slack();
    Nanos next_liveness = now_ns() + kLivenessPeriodNs;
    while (!stopping.load(std::memory_order_acquire)) {
      const std::uint32_t seq = control.doorbell().sequence();
      bool progress = false;
      bool draining = false;
      for (std::uint32_t i = 0; i < slots.size(); ++i) {
        progress |= service_slot(i, draining);
      }
      const Nanos now = now_ns();
      Nanos wait_ns = kIdleWaitNs;
      for (std::uint32_t i = 0; i < slots.size(); ++i) {
        ClientSlot& s = *slots[i];
        if (s.batch.empty()) {
          continue;
        }
        const Nanos due = s.batch_started + us_to_ns(config.batch_timeout_us);
        if (now >= due) {
          flush_batch(i);
          progress = true;
        } else {
          wait_ns = std::min(wait_ns, due - now);
        }
      }
      if (now >= next_liveness) {
        reap_dead_clients();
        next_liveness = now + kLivenessPeriodNs;
      }
      if (!progress) {
        if (draining) {
          wait_ns = std::min(wait_ns, kDrainPollNs);
        }
        control.doorbell().wait(seq, std::max<Nanos>(wait_ns, 1));
      }
    }
  }

  bool service_slot(std::uint32_t id, bool& draining) {
    using transport::SlotState;
    auto& desc = control.slot(id);
    ClientSlot& s = *slots[id];
    const auto state = static_cast<SlotState>(desc.state.load(std::memory_order_acquire));
    switch (state) {
      case SlotState::Free:
        return false;
      case SlotState::Connecting:
        if (!s.active) {
          connect_slot(id);
          return true;
        }
        return false;
      case SlotState::Active:
        return s.active && drain_tx(id);
      case SlotState::Disconnecting:
        if (!s.active) {
          desc.state.store(static_cast<std::uint32_t>(SlotState::Free), std::memory_order_release);
          return true;
        }
        drain_tx(id);
        if (!s.batch.empty()) {
          flush_batch(id);
        }
        if (s.in_flight.load(std::memory_order_acquire) != 0) {
          draining = true;
          return false;
        }
        disconnect_slot(id);
        return true;
    }
    return false;
  }

  void connect_slot(std::uint32_t id) {
    using transport::SlotState;
    auto& desc = control.slot(id);
    ClientSlot& s = *slots[id];
    try {
      s.pair = control.open_queue_pair(id, config.ring_capacity, config.payload_bytes_per_client, config.pin);
    } catch (const Error& e) {
      std::fprintf(stderr, "rocket: cannot open queue pair for client %u: %s\n", id, e.what());
      desc.state.store(static_cast<std::uint32_t>(SlotState::Free), std::memory_order_release);
      return;
    }
    if (const auto& warn = s.pair.region().warning()) {
      std::fprintf(stderr, "rocket: %s\n", warn->c_str());
    }
    s.active = true;
    s.pid = desc.client_pid;
    s.batch.clear();
    control.publish_concurrency(++active);
    desc.state.store(static_cast<std::uint32_t>(SlotState::Active), std::memory_order_release);
    control.doorbell().ring();
  }

  void disconnect_slot(std::uint32_t id) {
    using transport::SlotState;
    ClientSlot& s = *slots[id];
    {
      std::lock_guard lock(s.rx_mu);
      s.pair = transport::QueuePair{};
    }
    s.active = false;
    s.batch.clear();
    jobs.forget_client(id);
    control.publish_concurrency(--active);
    control.slot(id).state.store(static_cast<std::uint32_t>(SlotState::Free), std::memory_order_release);
  }

  void reap_dead_clients() {
    using transport::SlotState;
    for (std::uint32_t i = 0; i < slots.size(); ++i) {
      ClientSlot& s = *slots[i];
      if (!s.active || s.pid == 0 || s.pid == static_cast<std::uint64_t>(::getpid())) {
        continue;
      }
      if (::kill(static_cast<pid_t>(s.pid), 0) != 0 && errno == ESRCH) {
        auto expected = static_cast<std::uint32_t>(SlotState::Active);
        control.slot(i).state.compare_exchange_strong(expected, static_cast<std::uint32_t>(SlotState::Disconnecting));
      }
    }
  }

  bool drain_tx(std::uint32_t id) {
    ClientSlot& s = *slots[id];
    bool any = false;
    for (std::size_t n = 0; n < kPopsPerVisit; ++n) {
      auto slot_bytes = s.pair.tx().try_pop();
      if (!slot_bytes) {
        break;
      }
      any = true;
      handle_message(id, *slot_bytes);
    }
    return any;
  }

  void handle_message(std::uint32_t id, const transport::Slot& raw) {
    ClientSlot& s = *slots[id];
    auto decoded = transport::decode(raw);
    if (!decoded) {
      MessageHeader stub;
      stub.job_id = transport::peek_job_id(raw);
      send_error(s, stub, Subcode::Malformed, false);
      return;
    }
    const MessageHeader& h = *decoded;
    switch (h.kind) {
      case MessageKind::Request:
        handle_request(id, h);
        return;
      case MessageKind::Query:
        handle_query(id, h);
        return;
      default:
        send_error(s, h, Subcode::Malformed, false);
        return;
    }
  }

  void mark_consumed(ClientSlot& s, const MessageHeader& h) noexcept {
    if (auto* flag = transport::tx_consumed_flag(s.pair.tx_payload(), h.payload_offset)) {
      flag->store(1, std::memory_order_release);
    }
  }

  bool well_formed(const ClientSlot& s, std::uint32_t id, const MessageHeader& h) const noexcept {
    const std::uint64_t tx = s.pair.tx_payload().size();
    const std::uint64_t rx = s.pair.rx_payload().size();
    if (job_client(h.job_id) != id || job_sequence(h.job_id) == 0) {
      return false;
    }
    if (h.payload_offset < transport::kTxPrefixBytes || h.payload_offset % kAlign != 0 ||
        std::uint64_t{h.payload_offset} + h.payload_len > tx) {
      return false;
    }
    if (h.result_offset % kAlign != 0 || std::uint64_t{h.result_offset} + h.result_capacity > rx) {
      return false;
    }
    return true;
  }

  void handle_request(std::uint32_t id, const MessageHeader& h) {
    ClientSlot& s = *slots[id];
    add(st.requests, 1);
    if (!well_formed(s, id, h)) {
      mark_consumed(s, h);
      send_error(s, h, Subcode::Malformed, false);
      return;
    }
    if (handlers.find(h.op_code) == nullptr) {
      mark_consumed(s, h);
      send_error(s, h, Subcode::UnknownOp, false);
      return;
    }
    auto job = std::make_shared<JobRecord>();
    job->id = h.job_id;
    job->client_id = id;
    job->request = h;
    job->stamps[static_cast<std::size_t>(JobState::Received)] = now_ns();
    // Sampled here so a concurrency change only affects later jobs.
    job->injection = resolve_injection(config.injection, h.flags.mode, control.active_clients(), h.flags.injection);
    jobs.insert(job);
    s.in_flight.fetch_add(1, std::memory_order_acq_rel);

    if (h.flags.mode == Mode::Pipeline) {
      if (s.batch.empty()) {
        s.batch_started = now_ns();
      }
      s.batch.push_back(std::move(job));
      if (s.batch.size() >= config.batch_max) {
        flush_batch(id);
      }
      return;
    }
    Task t;
    t.jobs.push_back(std::move(job));
    enqueue(id, std::move(t));
  }

  void flush_batch(std::uint32_t id) {
    ClientSlot& s = *slots[id];
    Task t;
    t.pipeline = true;
    t.jobs.swap(s.batch);
    add(st.batches, 1);
    enqueue(id, std::move(t));
  }

  void enqueue(std::uint32_t client_id, Task task) {
    Worker& w = *workers[client_id % workers.size()];
    {
      std::lock_guard lock(w.mu);
      w.tasks.push_back(std::move(task));
    }
    w.cv.notify_one();
  }

  void handle_query(std::uint32_t id, const MessageHeader& h) {
    ClientSlot& s = *slots[id];
    add(st.queries, 1);
    auto job = jobs.find(h.job_id);
    if (!job || job->client_id != id) {
      send_error(s, h, Subcode::Unknown, true);
      return;
    }
    switch (job->load()) {
      case JobState::Done: {
        MessageHeader reply = reply_base(job->request, MessageKind::Response);
        reply.payload_offset = job->result_offset;
        reply.payload_len = job->result_len;
        reply.result_offset = job->result_offset;
        reply.result_capacity = job->request.result_capacity;
        reply.flags.query_reply = true;
        reply.timestamp_ns = now_ns();
        push_rx(s, reply);
        return;
      }
      case JobState::Failed:
        send_error(s, job->request, job->failure, true);
        return;
      default:
        send_error(s, job->request, Subcode::NotReady, true);
        return;
    }
  }

  // ---- workers ----------------------------------------------------------

  void worker_loop(Worker& w) {
    enable_fine_timer_slack();
    for (;;) {
      Task task;
      {
        std::unique_lock lock(w.mu);
        w.cv.wait(lock, [&] { return stopping.load() || !w.tasks.empty(); });
        if (stopping.load()) {
          return;
        }
        task = std::move(w.tasks.front());
        w.tasks.pop_front();
      }
      if (task.pipeline) {
        run_batch(w, task.jobs);
      } else {
        run_single(w, task.jobs.front());
      }
    }
  }

  // Starts a copy on the routed engine. Returns the time spent submitting
  // (which includes the whole copy when it ran inline on the CPU).
  Nanos submit_copy(Copy& c, std::span<const std::byte> src, std::span<std::byte> dst, DeviceHint hint,
                    bool inject) {
    c.bytes = src.size();
    c.record.reset();
    const Nanos t0 = now_ns();
    if (c.bytes == 0) {
      c.record.publish(engine::CompletionStatus::Complete, 0, t0);
      return 0;
    }
    const engine::CopyDescriptor desc{src, dst, inject, &c.record};
    engine::CopyBackend* target = &cpu;
    if (engine::route_device(c.bytes, config.offload_threshold, hint) == engine::Route::Offload) {
      target = engine.get();
    }
    for (;;) {
      if (target->try_submit(desc)) {
        break;
      }
      if (hint == DeviceHint::Auto) {
        add(st.queue_full_fallbacks, 1);
        target = &cpu;
        continue;
      }
      ::sched_yield();
    }
    add(target != &cpu ? st.offload_copies : st.cpu_copies, 1);
    // Only a copy still in flight on an asynchronous engine is worth deferring for.
    c.offloaded = target != &cpu && target->kind() == engine::DeviceKind::Sim;
    return now_ns() - t0;
  }

  completion::WaitStats wait_copy(const Copy& c) {
    auto ws = completion::wait(c.record, config.poll, config.profile, c.bytes);
    add(st.polls, ws.polls);
    add(st.wait_ns, static_cast<std::uint64_t>(ws.waited_us * 1000.0));
    return ws;
  }

  completion::WaitStats wait_copy_deferred(const Copy& c, Nanos defer_until) {
    auto ws = completion::wait_deferred(c.record, config.poll, defer_until);
    add(st.polls, ws.polls);
    add(st.wait_ns, static_cast<std::uint64_t>(ws.waited_us * 1000.0));
    return ws;
  }

  void fail(Work& wk, Subcode code) {
    if (wk.failed) {
      return;
    }
    wk.failed = true;
    wk.job->failure = code;
    wk.job->advance(JobState::Failed);
    add(st.jobs_failed, 1);
    ClientSlot& s = *slots[wk.job->client_id];
    mark_consumed(s, wk.job->request);
    send_error(s, wk.job->request, code, false);
    s.in_flight.fetch_sub(1, std::memory_order_acq_rel);
  }

  void finish(Work& wk) {
    wk.job->result_len = static_cast<std::uint32_t>(wk.result.size());
    wk.job->result_offset = wk.job->request.result_offset;
    wk.job->advance(JobState::Done);
    add(st.jobs_done, 1);
    ClientSlot& s = *slots[wk.job->client_id];
    send_result(s, *wk.job, false);
    s.in_flight.fetch_sub(1, std::memory_order_acq_rel);
  }

  // Resolves handler and stage costs and reserves staging space. False if
  // the staging buffer cannot hold this job right now.
  bool prepare(Worker& w, Work& wk) {
    const MessageHeader& h = wk.job->request;
    if (StagingBuffer::footprint(h.payload_len) + StagingBuffer::footprint(h.result_capacity) >
        w.staging->remaining()) {
      return false;
    }
    wk.handler = handlers.find(h.op_code);
    wk.stages = h.flags.has_stage_costs ? h.stages : wk.handler->stage_costs.value_or(StageCosts{});
    wk.input = w.staging->take(h.payload_len);
    wk.scratch = w.staging->take(h.result_capacity);
    return true;
  }

  Nanos start_copy_in(Work& wk) {
    ClientSlot& s = *slots[wk.job->client_id];
    const MessageHeader& h = wk.job->request;
    wk.job->advance(JobState::CopyingIn);
    const auto src = s.pair.tx_payload().subspan(h.payload_offset, h.payload_len);
    const Nanos spent = submit_copy(wk.in, src, wk.input, h.flags.device, wk.job->injection);
    add(st.copy_in_ns, spent);
    return spent;
  }

  // Runs the handler and its processing/post stages. The pre stage is run
  // by the caller because where it sits depends on the mode.
  void execute(Work& wk) {
    ClientSlot& s = *slots[wk.job->client_id];
    mark_consumed(s, wk.job->request);
    wk.job->advance(JobState::Executing);
    const Nanos t0 = now_ns();
    try {
      wk.result = wk.handler->execute(wk.input, wk.scratch);
    } catch (const std::exception&) {
      fail(wk, Subcode::HandlerFailed);
      return;
    }
    const double mb = static_cast<double>(wk.input.size()) / completion::kBytesPerMb;
    hold_until(now_ns() + us_to_ns(wk.stages.proc_us_per_mb * mb));
    hold_until(now_ns() + us_to_ns(wk.stages.post_us));
    add(st.exec_ns, now_ns() - t0);
    if (wk.result.size() > wk.job->request.result_capacity) {
      fail(wk, Subcode::ResultTooLarge);
    }
  }

  void run_pre(Work& wk) {
    if (wk.stages.pre_us == 0) {
      return;
    }
    const Nanos t0 = now_ns();
    hold_until(t0 + us_to_ns(wk.stages.pre_us));
    add(st.exec_ns, now_ns() - t0);
  }

  void start_copy_out(Work& wk) {
    ClientSlot& s = *slots[wk.job->client_id];
    const MessageHeader& h = wk.job->request;
    wk.job->advance(JobState::CopyingOut);
    const auto dst = s.pair.rx_payload().subspan(h.result_offset, wk.result.size());
    add(st.copy_out_ns, submit_copy(wk.out, wk.result, dst, h.flags.device, wk.job->injection));
  }

  void run_single(Worker& w, const std::shared_ptr<JobRecord>& job) {
    w.staging->reset();
    Work wk;
    wk.job = job;
    prepare(w, wk);  // a lone job always fits: staging covers both halves
    const bool overlap = job->request.flags.mode == Mode::Async;
    start_copy_in(wk);
    if (overlap) {
      run_pre(wk);  // runs while the copy-in is in flight
    }
    wait_copy(wk.in);
    if (!overlap) {
      run_pre(wk);
    }
    execute(wk);
    if (wk.failed) {
      return;
    }
    start_copy_out(wk);
    wait_copy(wk.out);
    finish(wk);
  }

  // Deadline for one collective wait over `copies`, modeled as a single
  // serialized transfer of their combined size starting at the first
  // submit.
  Nanos collective_deadline(Nanos first_submit, std::size_t offloaded_bytes) const noexcept {
    const double est = completion::estimate_latency_us(config.profile, offloaded_bytes);
    return first_submit + us_to_ns(config.poll.deferral_factor * est);
  }

  void run_batch(Worker& w, std::vector<std::shared_ptr<JobRecord>>& batch) {
    std::size_t next = 0;
    while (next < batch.size()) {
      w.staging->reset();
      std::deque<Work> group;
      while (next < batch.size()) {
        Work& wk = group.emplace_back();
        wk.job = batch[next];
        if (!prepare(w, wk)) {
          group.pop_back();
          break;
        }
        ++next;
      }
      if (group.empty()) {
        // Cannot happen for requests that passed well_formed(); keeps the
        // loop finite regardless.
        Work& wk = group.emplace_back();
        wk.job = batch[next++];
        fail(wk, Subcode::ResultTooLarge);
        continue;
      }
      run_group(group);
    }
  }

  void run_group(std::deque<Work>& group) {
    // All copy-ins back to back.
    Nanos first = 0;
    std::size_t offloaded = 0;
    for (auto& wk : group) {
      const Nanos t = now_ns();
      start_copy_in(wk);
      if (first == 0) {
        first = t;
      }
      offloaded += wk.in.offloaded ? wk.in.bytes : 0;
    }
    for (auto& wk : group) {
      run_pre(wk);
    }
    // One deferral for the whole group, then per-record checks; each
    // handler runs as soon as its payload is in.
    Nanos defer_until = collective_deadline(first, offloaded);
    Nanos first_out = 0;
    std::size_t offloaded_out = 0;
    for (auto& wk : group) {
      wait_copy_deferred(wk.in, offloaded != 0 ? defer_until : 0);
      execute(wk);
      if (wk.failed) {
        continue;
      }
      const Nanos t = now_ns();
      start_copy_out(wk);
      if (first_out == 0) {
        first_out = t;
      }
      offloaded_out += wk.out.offloaded ? wk.out.bytes : 0;
    }
    defer_until = offloaded_out != 0 ? collective_deadline(first_out, offloaded_out) : 0;
    for (auto& wk : group) {
      if (wk.failed) {
        continue;
      }
      wait_copy_deferred(wk.out, defer_until);
      finish(wk);
    }
  }
};

Server::Server(ServerConfig config, HandlerRegistry handlers)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(handlers))) {
  impl_->config.validate();
}

Server::~Server() {
  stop();
}

void Server::start() {
  impl_->start();
}

void Server::stop() {
  impl_->stop();
}

bool Server::running() const noexcept {
  return impl_->started.load();
}

const ServerConfig& Server::config() const noexcept {
  return impl_->config;
}

std::uint32_t Server::active_clients() const noexcept {
  return impl_->control.valid() ? impl_->control.active_clients() : 0;
}

ServerStats Server::stats() const noexcept {
  const auto& a = impl_->st;
  auto ld = [](const std::atomic<std::uint64_t>& v) { return v.load(std::memory_order_relaxed); };
  ServerStats s;
  s.requests = ld(a.requests);
  s.queries = ld(a.queries);
  s.jobs_done = ld(a.jobs_done);
  s.jobs_failed = ld(a.jobs_failed);
  s.errors_sent = ld(a.errors_sent);
  s.batches = ld(a.batches);
  s.copy_in_ns = ld(a.copy_in_ns);
  s.wait_ns = ld(a.wait_ns);
  s.exec_ns = ld(a.exec_ns);
  s.copy_out_ns = ld(a.copy_out_ns);
  s.polls = ld(a.polls);
  s.cpu_copies = ld(a.cpu_copies);
  s.offload_copies = ld(a.offload_copies);
  s.queue_full_fallbacks = ld(a.queue_full_fallbacks);
  return s;
}

engine::EngineCounters Server::engine_counters() const noexcept {
  return impl_->engine ? impl_->engine->counters() : engine::EngineCounters{};
}

void Server::reset_stats() noexcept {
  impl_->st.reset();
  if (impl_->engine) {
    impl_->engine->reset_counters();
  }
  impl_->cpu.reset_counters();
}

}  // namespace rocket::runtime
