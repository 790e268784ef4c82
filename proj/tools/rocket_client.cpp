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

// Issues `count` requests against a running server and reports latency.

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rocket/bench/harness.hpp"
#include "rocket/client/client.hpp"
#include "rocket/common/clock.hpp"
#include "rocket/common/error.hpp"
#include "rocket/common/kv_file.hpp"
#include "rocket/runtime/handlers.hpp"

namespace {

using namespace rocket;

// Expected result for the built-in ops; nullopt for anything else.
std::optional<std::vector<std::byte>> expected(std::string_view op, std::span<const std::byte> data) {
  if (op == "echo" || op == "synthetic") {
    return std::vector<std::byte>(data.begin(), data.end());
  }
  if (op == "checksum") {
    auto enc = runtime::encode_u64(runtime::byte_sum(data));
    return std::vector<std::byte>(enc.begin(), enc.end());
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  std::string server;
  std::string mode_name = "sync";
  std::string op = "echo";
  std::string size = "1M";
  std::uint32_t count = 100;
  std::string device = "auto";
  std::string injection = "default";
  std::uint32_t window = 2;
  std::uint32_t batch = 8;
  StageCosts stages;

  CLI::App app{"rocket-ipc client"};
  app.add_option("--server", server, "Server name")->required();
  app.add_option("--mode", mode_name, "sync, async or pipeline")->check(CLI::IsMember({"sync", "async", "pipeline"}));
  app.add_option("--op", op, "Registered op name");
  app.add_option("--size", size, "Payload size (K/M suffixes ok)");
  app.add_option("--count", count, "Number of requests");
  app.add_option("--device", device, "auto, cpu or offload")->check(CLI::IsMember({"auto", "cpu", "offload"}));
  app.add_option("--injection", injection, "default, on or off")->check(CLI::IsMember({"default", "on", "off"}));
  app.add_option("--window", window, "Outstanding requests in async mode")->check(CLI::PositiveNumber);
  app.add_option("--batch", batch, "Requests per group in pipeline mode")->check(CLI::PositiveNumber);
  app.add_option("--pre-us", stages.pre_us, "Synthetic pre-processing stage");
  app.add_option("--proc-us-per-mb", stages.proc_us_per_mb, "Synthetic processing cost per MB");
  app.add_option("--post-us", stages.post_us, "Synthetic post-processing stage");
  CLI11_PARSE(app, argc, argv);

  try {
    client::ClientConfig cc;
    cc.server_name = server;
    cc.mode = *parse_mode(mode_name);
    cc.device_hint = *parse_device_hint(device);
    cc.cache_injection = *parse_injection_hint(injection);
    auto session = client::ClientSession::connect(cc);

    std::vector<std::byte> payload(parse_size(size));
    std::mt19937 rng(0xc0ffee);
    for (auto& b : payload) {
      b = static_cast<std::byte>(rng());
    }
    client::Overrides o;
    if (op == "synthetic") {
      o.stages = stages;
    }
    const auto want = expected(op, payload);
    std::uint64_t mismatches = 0;
    auto check = [&](const std::vector<std::byte>& got) {
      if (want && got != *want) {
        ++mismatches;
      }
    };

    std::vector<double> lat;
    lat.reserve(count);
    const Nanos start = now_ns();
    if (cc.mode == Mode::Sync) {
      for (std::uint32_t i = 0; i < count; ++i) {
        const Nanos t0 = now_ns();
        check(session.request_sync(op, payload, o));
        lat.push_back(ns_to_us(now_ns() - t0));
      }
    } else if (cc.mode == Mode::Async) {
      std::deque<std::pair<client::ResponseFuture, Nanos>> inflight;
      for (std::uint32_t issued = 0; issued < count || !inflight.empty();) {
        while (issued < count && inflight.size() < window) {
          inflight.emplace_back(session.request_async(op, payload, o), now_ns());
          ++issued;
        }
        check(inflight.front().first.get());
        lat.push_back(ns_to_us(now_ns() - inflight.front().second));
        inflight.pop_front();
      }
    } else {
      std::vector<std::pair<JobId, Nanos>> group;
      for (std::uint32_t done = 0; done < count;) {
        const std::uint32_t n = std::min(batch, count - done);
        group.clear();
        for (std::uint32_t i = 0; i < n; ++i) {
          group.emplace_back(session.request_pipeline(op, payload, o), now_ns());
        }
        for (const auto& [job, t0] : group) {
          check(session.wait_result(job));
          lat.push_back(ns_to_us(now_ns() - t0));
        }
        done += n;
      }
    }
    const double secs = static_cast<double>(now_ns() - start) / 1e9;
    std::printf("client=%u mode=%s op=%s size=%zu count=%u\n", session.client_id(), mode_name.c_str(), op.c_str(),
                payload.size(), count);
    std::printf("latency_p50_us=%.2f latency_p99_us=%.2f throughput_rps=%.1f\n", bench::percentile(lat, 50),
                bench::percentile(lat, 99), secs > 0 ? count / secs : 0.0);
    if (want) {
      std::printf("verified=%llu mismatches=%llu\n", static_cast<unsigned long long>(count - mismatches),
                  static_cast<unsigned long long>(mismatches));
    }
    return mismatches == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "rocket-client: %s (%s)\n", e.what(), std::string(to_string(e.code())).c_str());
    return 1;
  }
}
