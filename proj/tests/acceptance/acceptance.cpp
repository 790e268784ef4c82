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

// Acceptance checks. Prints one PASS/FAIL line per criterion; with
// --criterion N runs only that one. Exit status is non-zero if any check
// that ran failed.

#include <sched.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rocket/bench/harness.hpp"
#include "rocket/client/client.hpp"
#include "rocket/common/clock.hpp"
#include "rocket/common/error.hpp"
#include "rocket/completion/calibrate.hpp"
#include "rocket/completion/latency_model.hpp"
#include "rocket/completion/wait.hpp"
#include "rocket/engine/sim_backend.hpp"
#include "rocket/runtime/handlers.hpp"
#include "rocket/runtime/server.hpp"
#include "rocket/transport/ring_queue.hpp"
#include "rocket/transport/shared_region.hpp"

namespace {

using namespace rocket;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string unique_name(const char* tag) {
  static int counter = 0;
  return std::string("rocket-acc-") + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
}

struct Buffer {
  explicit Buffer(std::size_t n)
      : data(static_cast<std::byte*>(std::aligned_alloc(64, (n + 63) / 64 * 64))), size(n) {
    std::memset(data, 0, (n + 63) / 64 * 64);
  }
  ~Buffer() { std::free(data); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  std::span<std::byte> span() const { return {data, size}; }
  std::byte* data;
  std::size_t size;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.empty() ? 0.0 : v[v.size() / 2];
}

// FNV-1a; independent of anything in the library.
std::uint64_t fnv1a(std::span<const std::byte> data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto b : data) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::byte> random_bytes(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::byte> v(n);
  for (auto& b : v) {
    b = static_cast<std::byte>(rng());
  }
  return v;
}

// ---- 1 --------------------------------------------------------------------

Outcome latency_model() {
  const double got = completion::estimate_latency_us(73.6, 33.4, 1.0);
  const bool exact = got == 107.0;

  // Affinity: f(t*a + (1-t)*b) == t*f(a) + (1-t)*f(b) up to rounding of the
  // few operations involved.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> coef(0.0, 500.0), size(0.0, 64.0), mix(0.0, 1.0);
  double worst_ulps = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const double l = coef(rng), a = coef(rng), s1 = size(rng), s2 = size(rng), t = mix(rng);
    const double lhs = completion::estimate_latency_us(l, a, t * s1 + (1 - t) * s2);
    const double rhs = t * completion::estimate_latency_us(l, a, s1) + (1 - t) * completion::estimate_latency_us(l, a, s2);
    const double scale = l + a * std::max(s1, s2);
    worst_ulps = std::max(worst_ulps, std::abs(lhs - rhs) / (scale * std::numeric_limits<double>::epsilon()));
  }
  const bool affine = worst_ulps <= 8.0;
  return {exact && affine, fmt("estimate(73.6, 33.4, 1 MB) = %.17g; affinity worst error %.2f eps over 1e5 draws", got,
                               worst_ulps)};
}

// ---- 2 --------------------------------------------------------------------

Outcome calibration() {
  engine::SimEngineConfig cfg;
  cfg.l_fixed_us = 50.0;
  cfg.alpha_us_per_mb = 40.0;
  cfg.jitter_pct = 0.0;
  engine::SimBackend sim(cfg);
  const std::vector<std::size_t> sizes{1'000'000, 2'000'000, 4'000'000, 8'000'000};
  std::string medians;
  try {
    auto r = completion::calibrate(sim, sizes, 10);
    for (const auto& m : r.medians) {
      medians += fmt(" %gMB=%.1fus", m.size_mb, m.latency_us);
    }
    const double el = std::abs(r.profile.l_fixed_us - 50.0) / 50.0;
    const double ea = std::abs(r.profile.alpha_us_per_mb - 40.0) / 40.0;
    return {el <= 0.05 && ea <= 0.05,
            fmt("fit l_fixed=%.2f (%.1f%% off) alpha=%.2f (%.1f%% off), overruns=%llu; medians:%s",
                r.profile.l_fixed_us, el * 100, r.profile.alpha_us_per_mb, ea * 100,
                static_cast<unsigned long long>(sim.counters().overruns), medians.c_str())};
  } catch (const Error& e) {
    // Re-time the sizes here so the failure line says what the engine did.
    for (auto bytes : sizes) {
      Buffer src(bytes), dst(bytes);
      std::vector<double> lat;
      for (int rep = 0; rep < 10; ++rep) {
        engine::CompletionRecord rec;
        sim.submit(engine::CopyDescriptor{src.span(), dst.span(), false, &rec});
        while (!rec.done()) {
          precise_sleep_for(20'000);
        }
        lat.push_back(ns_to_us(rec.complete_ns.load() - rec.submit_ns.load()));
      }
      medians += fmt(" %gMB=%.0fus(model %.0f)", static_cast<double>(bytes) / 1e6, median(lat),
                     sim.model_latency_us(bytes));
    }
    return {false, fmt("calibration raised %s: %s; overruns=%llu; medians:%s", std::string(to_string(e.code())).c_str(),
                       e.what(), static_cast<unsigned long long>(sim.counters().overruns), medians.c_str())};
  }
}

// ---- 3 --------------------------------------------------------------------

Outcome polling() {
  engine::SimBackend sim;  // 73.6 us + 33.4 us/MB, jitter 0
  engine::EngineProfile profile;
  Buffer src(1'000'000), dst(1'000'000);
  constexpr int kTrials = 5;
  std::vector<double> busy, hybrid, lazy_over;
  bool hybrid_complete = true;
  completion::PollPolicy lazy_policy;
  lazy_policy.kind = completion::PollKind::Lazy;
  for (int trial = 0; trial < kTrials; ++trial) {
    for (auto kind : {completion::PollKind::Busy, completion::PollKind::Hybrid, completion::PollKind::Lazy}) {
      engine::CompletionRecord rec;
      sim.submit(engine::CopyDescriptor{src.span(), dst.span(), false, &rec});
      completion::PollPolicy policy = kind == completion::PollKind::Lazy ? lazy_policy : completion::PollPolicy{};
      policy.kind = kind;
      const auto st = completion::wait(rec, policy, profile, src.size);
      switch (kind) {
        case completion::PollKind::Busy: busy.push_back(static_cast<double>(st.polls)); break;
        case completion::PollKind::Hybrid:
          hybrid.push_back(static_cast<double>(st.polls));
          hybrid_complete = hybrid_complete && st.outcome == engine::CompletionStatus::Complete;
          break;
        default:
          lazy_over.push_back(ns_to_us(st.observed_ns - rec.complete_ns.load()));
          break;
      }
      precise_sleep_for(1'000'000);
    }
  }
  const double b = median(busy), h = median(hybrid), lo = median(lazy_over);
  const double lo_max = *std::max_element(lazy_over.begin(), lazy_over.end());
  const bool pass = b >= 100.0 * h && hybrid_complete && lo <= lazy_policy.lazy_period_us;
  return {pass, fmt("median polls busy=%.0f hybrid=%.0f (ratio %.0f), hybrid complete=%s, lazy overshoot median "
                    "%.1fus max %.1fus (period %.0fus), %d trials",
                    b, h, b / std::max(h, 1.0), hybrid_complete ? "yes" : "no", lo, lo_max,
                    lazy_policy.lazy_period_us, kTrials)};
}

// ---- 4 --------------------------------------------------------------------

Outcome visibility() {
  engine::SimEngineConfig cfg;
  cfg.l_fixed_us = 1.0;
  cfg.alpha_us_per_mb = 5.0;
  engine::SimBackend sim(cfg);
  constexpr std::size_t kSrc = 1 << 20, kMaxLen = 64 * 1024;
  constexpr int kCopies = 100'000;
  Buffer src(kSrc), dst(kSrc);
  std::mt19937_64 rng(4);
  for (auto& b : src.span()) {
    b = static_cast<std::byte>(rng());
  }

  // The poller thread races the engine: it spins on the record and checks
  // the destination the moment it sees COMPLETE.
  std::atomic<engine::CompletionRecord*> current{nullptr};
  std::atomic<int> handled{0};
  std::span<std::byte> target;
  std::uint64_t expected = 0;
  std::atomic<std::uint64_t> mismatches{0};
  std::atomic<bool> quit{false};
  std::thread poller([&] {
    int seen = 0;
    while (!quit.load(std::memory_order_acquire)) {
      engine::CompletionRecord* rec = current.load(std::memory_order_acquire);
      if (rec == nullptr || handled.load(std::memory_order_relaxed) != seen) {
        ::sched_yield();
        continue;
      }
      while (rec->load() == engine::CompletionStatus::Pending) {
        ::sched_yield();
      }
      if (fnv1a(target) != expected) {
        mismatches.fetch_add(1);
      }
      ++seen;
      current.store(nullptr, std::memory_order_relaxed);
      handled.store(seen, std::memory_order_release);
    }
  });

  engine::CompletionRecord rec;
  for (int i = 0; i < kCopies; ++i) {
    const std::size_t len = 1 + rng() % kMaxLen;
    const std::size_t so = rng() % (kSrc - len);
    const std::size_t doff = (rng() % ((kSrc - len) / 64)) * 64;
    target = dst.span().subspan(doff, len);
    std::memset(target.data(), static_cast<int>(i & 0xff) ^ 0x5a, len);  // stale pattern
    expected = fnv1a(src.span().subspan(so, len));
    rec.reset();
    sim.submit(engine::CopyDescriptor{src.span().subspan(so, len), target, (i & 1) != 0, &rec});
    current.store(&rec, std::memory_order_release);
    while (handled.load(std::memory_order_acquire) != i + 1) {
      ::sched_yield();
    }
  }
  quit.store(true, std::memory_order_release);
  poller.join();
  return {mismatches.load() == 0, fmt("%d copies (1..64 KiB, random offsets), %llu COMPLETE observations with a "
                                      "mismatched checksum",
                                      kCopies, static_cast<unsigned long long>(mismatches.load()))};
}

// ---- 5 --------------------------------------------------------------------

Outcome mode_differential() {
  runtime::ServerConfig cfg;
  cfg.name = unique_name("diff");
  cfg.payload_bytes_per_client = 16ULL << 20;
  cfg.batch_timeout_us = 100.0;
  runtime::Server server(cfg);
  server.start();
  auto session = [&](Mode m) {
    client::ClientConfig cc;
    cc.server_name = cfg.name;
    cc.mode = m;
    return client::ClientSession::connect(cc);
  };
  auto sync = session(Mode::Sync);
  auto async = session(Mode::Async);
  auto pipe = session(Mode::Pipeline);

  constexpr int kPairs = 1000;
  constexpr int kGroup = 8;
  std::mt19937_64 rng(5);
  int mismatches = 0, oracle_failures = 0;
  std::size_t offloaded = 0;
  for (int base = 0; base < kPairs; base += kGroup) {
    struct Pair {
      std::uint16_t op;
      std::vector<std::byte> data;
      client::Overrides o;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < kGroup; ++i) {
      Pair p;
      p.op = static_cast<std::uint16_t>(1 + rng() % 3);
      // Mostly small, some well past the offload threshold.
      const std::size_t n = rng() % 4 == 0 ? 64 * 1024 + rng() % (512 * 1024) : rng() % 8192;
      offloaded += n >= cfg.offload_threshold;
      p.data = random_bytes(rng, n);
      if (p.op == runtime::kOpSynthetic) {
        p.o.stages = StageCosts{static_cast<std::uint32_t>(rng() % 20), 0, static_cast<std::uint32_t>(rng() % 20)};
      }
      pairs.push_back(std::move(p));
    }
    std::vector<JobId> ids;
    for (const auto& p : pairs) {
      ids.push_back(pipe.request_pipeline(p.op, p.data, p.o));
    }
    std::deque<client::ResponseFuture> futures;
    for (const auto& p : pairs) {
      futures.push_back(async.request_async(p.op, p.data, p.o));
    }
    for (int i = 0; i < kGroup; ++i) {
      const auto& p = pairs[i];
      const auto a = sync.request_sync(p.op, p.data, p.o);
      const auto b = futures[i].get();
      const auto c = pipe.wait_result(ids[i]);
      if (a != b || a != c) {
        ++mismatches;
      }
      // Oracle: echo and synthetic return their input; checksum the byte sum.
      std::vector<std::byte> want = p.data;
      if (p.op == runtime::kOpChecksum) {
        std::uint64_t sum = 0;
        for (auto x : p.data) {
          sum += static_cast<std::uint8_t>(x);
        }
        want.assign(8, std::byte{0});
        for (int k = 0; k < 8; ++k) {
          want[k] = static_cast<std::byte>(sum >> (8 * k));
        }
      }
      if (a != want) {
        ++oracle_failures;
      }
    }
  }
  return {mismatches == 0 && oracle_failures == 0,
          fmt("%d random (op, payload) pairs, %zu above the offload threshold: %d cross-mode mismatches, %d oracle "
              "mismatches",
              kPairs, offloaded, mismatches, oracle_failures)};
}

// ---- 6 --------------------------------------------------------------------

Outcome overlap() {
  bench::Scenario s;
  s.workload = bench::Workload::Synthetic;
  s.stages = StageCosts{200, 0, 0};
  s.payload_bytes = 1'000'000;
  s.clients = 1;
  s.iterations = 120;
  s.warmup = 20;
  s.async_window = 1;  // per-job latency, no queueing behind a previous job
  s.mode = Mode::Sync;
  const auto sync = bench::run_scenario(s);
  s.mode = Mode::Async;
  const auto async = bench::run_scenario(s);
  const double ratio = async.latency_p50_us / sync.latency_p50_us;
  return {ratio < 0.9, fmt("SYNTHETIC(pre=200us) 1 MB sim: p50 sync=%.1fus async=%.1fus, ratio %.3f (need < 0.9)",
                           sync.latency_p50_us, async.latency_p50_us, ratio)};
}

// ---- 7 --------------------------------------------------------------------

Outcome throughput_ordering() {
  bench::Scenario s;
  s.workload = bench::Workload::Echo;
  s.payload_bytes = 1'000'000;
  s.clients = 1;
  s.batch = 8;
  s.iterations = 420;
  s.warmup = 20;
  double rps[3];
  for (auto mode : {Mode::Sync, Mode::Async, Mode::Pipeline}) {
    s.mode = mode;
    rps[static_cast<int>(mode)] = bench::run_scenario(s).throughput_rps;
  }
  const double sync = rps[0], async = rps[1], pipe = rps[2];
  const bool pass = pipe >= 1.05 * async && async >= 1.05 * sync;
  return {pass, fmt("1 MB echo n=1 sim: sync=%.0f async=%.0f pipeline(batch 8)=%.0f req/s; async/sync=%.3f "
                    "pipeline/async=%.3f (each needs >= 1.05)",
                    sync, async, pipe, async / sync, pipe / async)};
}

// ---- 8 --------------------------------------------------------------------

Outcome crossover() {
  constexpr std::uint64_t kThreshold = 64 * 1024;
  const std::vector<std::uint64_t> sizes{4096,   16384,   32768,     kThreshold - 1, kThreshold, 131072,
                                         262144, 524288,  1'000'000, 2'000'000,      4'000'000,  8'000'000};
  bench::Scenario s;
  s.payload_bytes = 0;
  s.offload_threshold = kThreshold;
  s.iterations = 40;
  s.warmup = 5;
  bool routing_ok = true;
  std::string routing;
  std::vector<double> cpu_lat, off_lat;
  for (auto size : sizes) {
    s.payload_bytes = size;
    s.device_hint = DeviceHint::Auto;
    const auto autor = bench::run_scenario(s);
    const bool used_engine = autor.engine_submits > 0;
    routing_ok = routing_ok && used_engine == (size >= kThreshold);
    s.device_hint = DeviceHint::Cpu;
    cpu_lat.push_back(bench::run_scenario(s).latency_p50_us);
    s.device_hint = DeviceHint::Offload;
    off_lat.push_back(bench::run_scenario(s).latency_p50_us);
    routing += fmt(" %llu:%s/%.0f/%.0f", static_cast<unsigned long long>(size), used_engine ? "off" : "cpu",
                   cpu_lat.back(), off_lat.back());
  }
  // The curves cross if the CPU path wins at the small end and the offload
  // path wins somewhere above it.
  const bool cpu_wins_small = cpu_lat.front() < off_lat.front();
  bool offload_wins_large = false;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    offload_wins_large = offload_wins_large || off_lat[i] < cpu_lat[i];
  }
  const bool pass = routing_ok && cpu_wins_small && offload_wins_large;
  return {pass, fmt("AUTO routing flips at %llu: %s; curves cross: %s; size:route/cpu_p50/offload_p50%s",
                    static_cast<unsigned long long>(kThreshold), routing_ok ? "yes" : "no",
                    cpu_wins_small && offload_wins_large ? "yes" : "no", routing.c_str())};
}

// ---- 9 --------------------------------------------------------------------

Outcome injection_policy() {
  runtime::ServerConfig cfg;
  cfg.name = unique_name("inj");
  cfg.payload_bytes_per_client = 8ULL << 20;
  cfg.batch_timeout_us = 100.0;
  runtime::Server server(cfg);
  server.start();
  std::mt19937_64 rng(9);
  const auto data = random_bytes(rng, 1'000'000);
  // Oracle: an injected request touches every line of its copy-in and
  // copy-out destinations.
  const std::uint64_t per_request = 2 * ((data.size() + 63) / 64);

  auto connect = [&](Mode m) {
    client::ClientConfig cc;
    cc.server_name = cfg.name;
    cc.mode = m;
    return client::ClientSession::connect(cc);
  };
  auto run_one = [&](client::ClientSession& s, const client::Overrides& o = {}) {
    server.reset_stats();
    switch (s.mode()) {
      case Mode::Sync: s.request_sync(runtime::kOpEcho, data, o); break;
      case Mode::Async: s.request_async(runtime::kOpEcho, data, o).get(); break;
      case Mode::Pipeline: s.wait_result(s.request_pipeline(runtime::kOpEcho, data, o)); break;
    }
    return server.engine_counters().touched_lines;
  };
  client::Overrides on, off;
  on.injection = InjectionHint::On;
  off.injection = InjectionHint::Off;

  std::uint64_t sync_t, async1_t, async2_t, pipe_t, pipe_on_t, sync_off_t;
  {
    auto s = connect(Mode::Sync);
    sync_t = run_one(s);
    sync_off_t = run_one(s, off);
  }
  {
    auto a = connect(Mode::Async);
    async1_t = run_one(a);
    auto other = connect(Mode::Sync);
    async2_t = run_one(a);
  }
  {
    auto p = connect(Mode::Pipeline);
    pipe_t = run_one(p);
    pipe_on_t = run_one(p, on);
  }
  const bool pass = sync_t == per_request && async1_t == per_request && async2_t == 0 && pipe_t == 0 &&
                    pipe_on_t == per_request && sync_off_t == 0;
  return {pass, fmt("touched lines (expect %llu when on): sync=%llu async n=1=%llu async n=2=%llu pipeline=%llu "
                    "pipeline+on=%llu sync+off=%llu",
                    static_cast<unsigned long long>(per_request), static_cast<unsigned long long>(sync_t),
                    static_cast<unsigned long long>(async1_t), static_cast<unsigned long long>(async2_t),
                    static_cast<unsigned long long>(pipe_t), static_cast<unsigned long long>(pipe_on_t),
                    static_cast<unsigned long long>(sync_off_t))};
}

// ---- 10 -------------------------------------------------------------------

struct SpscShared {
  std::atomic<std::uint64_t> producer_faults;
  std::atomic<std::uint32_t> producer_done;
};

transport::Slot make_message(std::uint64_t seq) {
  transport::Slot s;
  std::uint64_t x = seq * 0x9e3779b97f4a7c15ULL;
  for (std::size_t i = 0; i < s.size(); i += 8) {
    x ^= x >> 31;
    x *= 0xbf58476d1ce4e5b9ULL;
    std::memcpy(s.data() + i, &x, 8);
  }
  std::memcpy(s.data(), &seq, 8);
  return s;
}

Outcome spsc_integrity() {
  constexpr std::uint64_t kMessages = 1'000'000;
  constexpr std::uint64_t kWarm = 10'000;
  constexpr std::uint32_t kCapacity = 1024;
  const auto name = unique_name("spsc");
  const std::size_t ring_bytes = transport::RingQueue::bytes_required(kCapacity);
  auto region = transport::SharedRegion::create(name, 4096 + ring_bytes, false);
  auto* shared = new (region.base()) SpscShared{};
  auto ring_mem = region.bytes().subspan(4096, ring_bytes);
  transport::RingQueue::initialize(ring_mem, kCapacity);

  const pid_t child = ::fork();
  if (child == 0) {
    auto view = transport::SharedRegion::open(name);
    auto ring = transport::RingQueue::attach(view.bytes().subspan(4096, ring_bytes));
    auto* sh = reinterpret_cast<SpscShared*>(view.base());
    std::uint64_t faults_at_warm = 0;
    for (std::uint64_t i = 0; i < kMessages; ++i) {
      if (i == kWarm) {
        faults_at_warm = transport::thread_minor_faults();
      }
      const auto msg = make_message(i);
      while (!ring.try_push(msg)) {
        ::sched_yield();
      }
    }
    sh->producer_faults.store(transport::thread_minor_faults() - faults_at_warm);
    sh->producer_done.store(1, std::memory_order_release);
    ::_exit(0);
  }

  auto ring = transport::RingQueue::attach(ring_mem);
  std::uint64_t lost_or_reordered = 0, corrupt = 0, faults_at_warm = 0;
  std::uint64_t expected = 0;
  const Nanos t0 = now_ns();
  while (expected < kMessages) {
    if (expected == kWarm) {
      faults_at_warm = transport::thread_minor_faults();
    }
    auto slot = ring.try_pop();
    if (!slot) {
      if (now_ns() - t0 > 100'000'000'000ULL) {
        break;
      }
      ::sched_yield();
      continue;
    }
    std::uint64_t seq = 0;
    std::memcpy(&seq, slot->data(), 8);
    if (seq != expected) {
      ++lost_or_reordered;
    }
    if (*slot != make_message(seq)) {
      ++corrupt;
    }
    expected = seq + 1;
  }
  const std::uint64_t consumer_faults = transport::thread_minor_faults() - faults_at_warm;
  int status = 0;
  ::waitpid(child, &status, 0);
  const bool child_ok = WIFEXITED(status) && WEXITSTATUS(status) == 0 && shared->producer_done.load() == 1;
  const std::uint64_t producer_faults = shared->producer_faults.load();
  const bool pass = child_ok && expected == kMessages && lost_or_reordered == 0 && corrupt == 0 &&
                    consumer_faults == 0 && producer_faults == 0 && ring.empty();
  return {pass, fmt("%llu messages across processes: received=%llu lost/reordered=%llu corrupt=%llu; steady-state "
                    "minor faults producer=%llu consumer=%llu",
                    static_cast<unsigned long long>(kMessages), static_cast<unsigned long long>(expected),
                    static_cast<unsigned long long>(lost_or_reordered), static_cast<unsigned long long>(corrupt),
                    static_cast<unsigned long long>(producer_faults),
                    static_cast<unsigned long long>(consumer_faults))};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<Criterion> all{
      {1, "latency model", latency_model},
      {2, "calibration recovery", calibration},
      {3, "polling economics", polling},
      {4, "visibility safety", visibility},
      {5, "mode-differential correctness", mode_differential},
      {6, "overlap", overlap},
      {7, "throughput ordering", throughput_ordering},
      {8, "size crossover", crossover},
      {9, "injection policy", injection_policy},
      {10, "transport integrity", spsc_integrity},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) {
      continue;
    }
    const Nanos t0 = now_ns();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d %-30s %s  (%.1fs) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL",
                static_cast<double>(now_ns() - t0) / 1e9, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
