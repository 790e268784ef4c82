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

#include <doctest.h>

#include <unistd.h>

#include <random>
#include <thread>
#include <vector>

#include "rocket/client/client.hpp"
#include "rocket/common/clock.hpp"
#include "rocket/common/error.hpp"
#include "rocket/runtime/handlers.hpp"
#include "rocket/runtime/server.hpp"
#include "rocket/transport/shared_region.hpp"

using namespace rocket;
using client::ClientConfig;
using client::ClientSession;

namespace {

std::string server_name() {
  static int counter = 0;
  return "rocket-cl-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
}

runtime::ServerConfig small_config() {
  runtime::ServerConfig c;
  c.name = server_name();
  c.payload_bytes_per_client = 4ULL << 20;
  return c;
}

ClientSession connect(const std::string& name, Mode mode, InjectionHint inj = InjectionHint::Default) {
  ClientConfig cc;
  cc.server_name = name;
  cc.mode = mode;
  cc.cache_injection = inj;
  return ClientSession::connect(cc);
}

std::vector<std::byte> random_bytes(std::size_t n, unsigned seed) {
  std::vector<std::byte> v(n);
  std::mt19937 rng(seed);
  for (auto& b : v) {
    b = static_cast<std::byte>(rng());
  }
  return v;
}

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::SystemError;
}

}  // namespace

TEST_SUITE("client") {
  TEST_CASE("connecting to an absent server") {
    CHECK(error_of([] { connect("rocket-no-such-server", Mode::Sync); }) == Errc::ServerUnavailable);
  }

  TEST_CASE("slot exhaustion") {
    auto cfg = small_config();
    cfg.max_clients = 1;
    runtime::Server server(cfg);
    server.start();
    auto first = connect(cfg.name, Mode::Sync);
    CHECK(error_of([&] { connect(cfg.name, Mode::Sync); }) == Errc::TooManyClients);
  }

  TEST_CASE("request validation") {
    auto cfg = small_config();
    runtime::Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Sync);
    CHECK(s.op_code("checksum") == runtime::kOpChecksum);
    CHECK_FALSE(s.op_code("missing"));
    const auto big = random_bytes(8 << 20, 1);
    CHECK(error_of([&] { s.request_sync("echo", big); }) == Errc::PayloadTooLarge);
    const auto small = random_bytes(100, 2);
    CHECK(error_of([&] { s.request_async("echo", small); }) == Errc::ModeMismatch);
    CHECK(error_of([&] { s.request_pipeline("echo", small); }) == Errc::ModeMismatch);
    CHECK(error_of([&] { s.request_sync("missing", small); }) == Errc::UnknownOp);
    CHECK(error_of([&] { s.request_sync(std::uint16_t{0x7777}, small); }) == Errc::UnknownOp);
    CHECK(s.request_sync("echo", small) == small);
  }

  TEST_CASE("async futures resolve in order and repeat their bytes") {
    auto cfg = small_config();
    runtime::Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Async);
    const auto a = random_bytes(300'000, 3);
    const auto b = random_bytes(5'000, 4);
    auto fa = s.request_async("echo", a);
    auto fb = s.request_async("echo", b);
    CHECK(fa.job_id() < fb.job_id());
    CHECK(fb.get() == b);
    CHECK(fa.ready());
    CHECK(fa.get() == a);
    CHECK(&fa.get() == &fa.get());
    CHECK(fa.state() == client::FutureState::Ready);
  }

  TEST_CASE("a future can be waited on from another thread") {
    auto cfg = small_config();
    runtime::Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Async);
    const auto a = random_bytes(200'000, 5);
    auto f = s.request_async("echo", a);
    std::vector<std::byte> got;
    std::thread t([&] { got = f.get(); });
    t.join();
    CHECK(got == a);
  }

  TEST_CASE("async completes while the caller does other work") {
    auto cfg = small_config();
    runtime::Server server(cfg);
    server.start();
    const auto data = random_bytes(1 << 20, 6);
    auto s = connect(cfg.name, Mode::Async);
    s.request_async("echo", data).get();
    auto f = s.request_async("echo", data);
    // The caller never waits on the job, yet its response is already in
    // once the local work is over.
    hold_until(now_ns() + 20'000'000);
    s.pump();
    CHECK(f.ready());
    CHECK(f.get() == data);
  }

  TEST_CASE("pipeline ids increase and results are retrievable") {
    auto cfg = small_config();
    runtime::Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Pipeline);
    std::vector<JobId> ids;
    std::vector<std::vector<std::byte>> data;
    for (int i = 0; i < 8; ++i) {
      data.push_back(random_bytes(50'000 + i, 20 + i));
      ids.push_back(s.request_pipeline("echo", data.back()));
    }
    for (int i = 1; i < 8; ++i) {
      CHECK(ids[i] > ids[i - 1]);
    }
    for (int i = 0; i < 8; ++i) {
      client::QueryResult r;
      const Nanos deadline = now_ns() + 5'000'000'000ULL;
      do {
        r = s.query_result(ids[i]);
      } while (r.status == client::QueryStatus::NotReady && now_ns() < deadline);
      REQUIRE(r.status == client::QueryStatus::Ready);
      CHECK(r.bytes == data[i]);
    }
    // wait_result hands the result over and retires the id.
    const auto extra = random_bytes(1000, 99);
    const JobId last = s.request_pipeline("echo", extra);
    CHECK(s.wait_result(last) == extra);
    CHECK(error_of([&] { s.wait_result(last); }) == Errc::InvalidArgument);
  }

  TEST_CASE("injection precedence: request over session over server table") {
    auto cfg = small_config();
    runtime::Server server(cfg);
    server.start();
    const auto data = random_bytes(1 << 20, 7);
    {
      auto s = connect(cfg.name, Mode::Sync);  // table says ON
      server.reset_stats();
      s.request_sync("echo", data);
      CHECK(server.engine_counters().touched_lines > 0);
    }
    auto off = connect(cfg.name, Mode::Sync, InjectionHint::Off);
    server.reset_stats();
    off.request_sync("echo", data);
    CHECK(server.engine_counters().touched_lines == 0);
    client::Overrides on;
    on.injection = InjectionHint::On;
    off.request_sync("echo", data, on);
    CHECK(server.engine_counters().touched_lines > 0);
  }

  TEST_CASE("device override forces the cpu path") {
    auto cfg = small_config();
    runtime::Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Sync);
    const auto data = random_bytes(1 << 20, 8);
    client::Overrides cpu;
    cpu.device = DeviceHint::Cpu;
    server.reset_stats();
    CHECK(s.request_sync("echo", data, cpu) == data);
    CHECK(server.engine_counters().submitted == 0);
    CHECK(s.stats().cpu_copies == 1);
  }

  TEST_CASE("no shared-memory mapping after connect") {
    auto cfg = small_config();
    runtime::Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Sync);
    const auto before = transport::SharedRegion::map_calls();
    const auto data = random_bytes(100'000, 9);
    for (int i = 0; i < 50; ++i) {
      s.request_sync("echo", data);
    }
    CHECK(transport::SharedRegion::map_calls() == before);
  }

  TEST_CASE("server shutdown surfaces as ServerUnavailable") {
    auto cfg = small_config();
    auto server = std::make_unique<runtime::Server>(cfg);
    server->start();
    auto s = connect(cfg.name, Mode::Sync);
    server->stop();
    const auto data = random_bytes(1000, 10);
    CHECK(error_of([&] { s.request_sync("echo", data); }) == Errc::ServerUnavailable);
  }
}
