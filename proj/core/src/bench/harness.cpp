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

#include "rocket/bench/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <deque>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "rocket/client/client.hpp"
#include "rocket/common/clock.hpp"
#include "rocket/common/error.hpp"
#include "rocket/runtime/handlers.hpp"
#include "rocket/runtime/server.hpp"

namespace rocket::bench {

namespace {

std::atomic<std::uint32_t> g_server_counter{0};

std::uint64_t round_up(std::uint64_t v, std::uint64_t to) {
  return (v + to - 1) / to * to;
}

runtime::ServerConfig server_config(const Scenario& s) {
  runtime::ServerConfig c;
  c.name = "rocket-bench-" + std::to_string(::getpid()) + "-" + std::to_string(g_server_counter.fetch_add(1));
  c.max_clients = std::max<std::uint32_t>(4, s.clients);
  c.device = s.device;
  c.profile = s.profile;
  auto sim = c.sim_config();
  sim.jitter_pct = s.jitter_pct;
  c.sim = sim;
  c.offload_threshold = s.offload_threshold;
  c.batch_max = s.batch;
  c.worker_threads = s.worker_threads;
  // Room for every request a client keeps outstanding, in each direction.
  // Keeping it tight keeps the recycled ranges warm in cache.
  const std::uint64_t outstanding = s.mode == Mode::Sync ? 1 : s.mode == Mode::Async ? s.async_window : s.batch;
  const std::uint64_t depth = outstanding + 1;
  const std::uint64_t half = depth * (round_up(std::max<std::uint64_t>(s.payload_bytes, 64), 64) + 128);
  c.payload_bytes_per_client = std::max<std::uint64_t>(4ULL << 20, round_up(2 * half, 1ULL << 20));
  return c;
}

std::uint16_t op_for(Workload w) {
  switch (w) {
    case Workload::Echo: return runtime::kOpEcho;
    case Workload::Checksum: return runtime::kOpChecksum;
    case Workload::Synthetic: return runtime::kOpSynthetic;
  }
  return runtime::kOpEcho;
}

struct ClientResult {
  std::vector<double> latency_us;
  std::uint64_t polls = 0;
  std::exception_ptr error;
};

class Driver {
 public:
  Driver(const Scenario& s, client::ClientSession& session, std::uint32_t seed) : s_(s), session_(session) {
    payload_.resize(s.payload_bytes);
    std::mt19937 rng(seed);
    for (auto& b : payload_) {
      b = static_cast<std::byte>(rng());
    }
    op_ = op_for(s.workload);
    if (s.workload == Workload::Synthetic) {
      overrides_.stages = s.stages;
    }
  }

  // Issues `count` requests; latencies go to `out` when it is non-null.
  void run(std::uint32_t count, std::vector<double>* out) {
    switch (s_.mode) {
      case Mode::Sync: run_sync(count, out); break;
      case Mode::Async: run_async(count, out); break;
      case Mode::Pipeline: run_pipeline(count, out); break;
    }
  }

 private:
  void record(std::vector<double>* out, Nanos start) {
    if (out) {
      out->push_back(ns_to_us(now_ns() - start));
    }
  }

  void run_sync(std::uint32_t count, std::vector<double>* out) {
    for (std::uint32_t i = 0; i < count; ++i) {
      const Nanos t0 = now_ns();
      session_.request_sync(op_, payload_, overrides_);
      record(out, t0);
    }
  }

  void run_async(std::uint32_t count, std::vector<double>* out) {
    std::deque<std::pair<client::ResponseFuture, Nanos>> window;
    std::uint32_t issued = 0;
    while (issued < count || !window.empty()) {
      while (issued < count && window.size() < s_.async_window) {
        const Nanos t0 = now_ns();
        window.emplace_back(session_.request_async(op_, payload_, overrides_), t0);
        ++issued;
      }
      window.front().first.get();
      record(out, window.front().second);
      window.pop_front();
    }
  }

  void run_pipeline(std::uint32_t count, std::vector<double>* out) {
    std::vector<std::pair<JobId, Nanos>> group;
    for (std::uint32_t done = 0; done < count;) {
      const std::uint32_t n = std::min(s_.batch, count - done);
      group.clear();
      for (std::uint32_t i = 0; i < n; ++i) {
        const Nanos t0 = now_ns();
        group.emplace_back(session_.request_pipeline(op_, payload_, overrides_), t0);
      }
      for (const auto& [job, t0] : group) {
        session_.wait_result(job);
        record(out, t0);
      }
      done += n;
    }
  }

  const Scenario& s_;
  client::ClientSession& session_;
  std::vector<std::byte> payload_;
  std::uint16_t op_ = 0;
  client::Overrides overrides_;
};

}  // namespace

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) {
    return 0.0;
  }
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(pct / 100.0 * static_cast<double>(values.size()));
  const auto idx = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(values.size()))) - 1;
  return values[idx];
}

RunReport run_scenario(const Scenario& s) {
  s.validate();
  const auto config = server_config(s);
  runtime::Server server(config);
  try {
    server.start();
  } catch (const std::exception& e) {
    throw Error(Errc::ServerLaunchFailed, e.what());
  }

  std::vector<ClientResult> results(s.clients);
  std::atomic<Nanos> measure_start{0};
  std::atomic<Nanos> measure_end{0};
  std::barrier sync_point(static_cast<std::ptrdiff_t>(s.clients), [&]() noexcept {
    server.reset_stats();
    measure_start.store(now_ns());
  });

  std::vector<std::thread> threads;
  threads.reserve(s.clients);
  for (std::uint32_t c = 0; c < s.clients; ++c) {
    threads.emplace_back([&, c] {
      ClientResult& r = results[c];
      bool arrived = false;
      try {
        client::ClientConfig cc;
        cc.server_name = config.name;
        cc.mode = s.mode;
        cc.device_hint = s.device_hint;
        cc.cache_injection = s.injection;
        auto session = client::ClientSession::connect(cc);
        Driver driver(s, session, 0x9e3779b9u + c);
        driver.run(s.warmup, nullptr);
        sync_point.arrive_and_wait();
        arrived = true;
        session.reset_stats();
        r.latency_us.reserve(s.measured());
        driver.run(s.measured(), &r.latency_us);
        Nanos end = now_ns();
        Nanos seen = measure_end.load();
        while (seen < end && !measure_end.compare_exchange_weak(seen, end)) {
        }
        r.polls = session.stats().polls;
      } catch (...) {
        r.error = std::current_exception();
        if (!arrived) {
          sync_point.arrive_and_drop();
        }
      }
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  const auto stats = server.stats();
  const auto engine = server.engine_counters();
  server.stop();
  for (auto& r : results) {
    if (r.error) {
      std::rethrow_exception(r.error);
    }
  }

  RunReport report;
  report.scenario = s;
  for (auto& r : results) {
    report.latency_us.insert(report.latency_us.end(), r.latency_us.begin(), r.latency_us.end());
    report.poll_count += r.polls;
  }
  report.requests = report.latency_us.size();
  report.latency_p50_us = percentile(report.latency_us, 50.0);
  report.latency_p99_us = percentile(report.latency_us, 99.0);
  report.elapsed_s = static_cast<double>(measure_end.load() - measure_start.load()) / 1e9;
  if (report.elapsed_s > 0.0) {
    report.throughput_rps = static_cast<double>(report.requests) / report.elapsed_s;
  }
  report.poll_count += stats.polls;
  report.touch_count = engine.touched_lines;
  report.engine_submits = engine.submitted;
  if (stats.jobs_done > 0) {
    const double jobs = static_cast<double>(stats.jobs_done);
    report.stages.copy_in_us = ns_to_us(stats.copy_in_ns) / jobs;
    report.stages.wait_us = ns_to_us(stats.wait_ns) / jobs;
    report.stages.exec_us = ns_to_us(stats.exec_ns) / jobs;
    report.stages.copy_out_us = ns_to_us(stats.copy_out_ns) / jobs;
  }
  double mean = 0.0;
  for (double v : report.latency_us) {
    mean += v;
  }
  if (!report.latency_us.empty()) {
    mean /= static_cast<double>(report.latency_us.size());
  }
  const auto& st = report.stages;
  report.stages.queue_us = std::max(0.0, mean - (st.copy_in_us + st.wait_us + st.exec_us + st.copy_out_us));
  return report;
}

std::vector<MatrixCell> run_matrix(const MatrixSpec& spec, const std::function<void(const MatrixCell&)>& progress) {
  std::vector<MatrixCell> cells;
  for (const auto& s : expand(spec)) {
    MatrixCell cell;
    cell.scenario = s;
    try {
      cell.report = run_scenario(s);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    if (progress) {
      progress(cell);
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace rocket::bench
