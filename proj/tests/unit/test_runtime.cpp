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

#include <cstring>
#include <random>
#include <thread>
#include <vector>

#include "raw_client.hpp"
#include "rocket/client/client.hpp"
#include "rocket/common/clock.hpp"
#include "rocket/common/error.hpp"
#include "rocket/runtime/config.hpp"
#include "rocket/runtime/handlers.hpp"
#include "rocket/runtime/job.hpp"
#include "rocket/runtime/server.hpp"

using namespace rocket;
using namespace rocket::runtime;
using transport::MessageHeader;
using transport::MessageKind;
using transport::Subcode;

namespace {

std::string server_name() {
  static int counter = 0;
  return "rocket-rt-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
}

ServerConfig small_config() {
  ServerConfig c;
  c.name = server_name();
  c.payload_bytes_per_client = 4ULL << 20;
  return c;
}

std::vector<std::byte> random_bytes(std::size_t n, unsigned seed) {
  std::vector<std::byte> v(n);
  std::mt19937 rng(seed);
  for (auto& b : v) {
    b = static_cast<std::byte>(rng());
  }
  return v;
}

// A request for `len` bytes already sitting at tx offset 64.
MessageHeader raw_request(const testing::RawClient& c, std::uint64_t seq, std::uint16_t op, std::uint32_t len) {
  MessageHeader h;
  h.kind = MessageKind::Request;
  h.op_code = op;
  h.job_id = c.job(seq);
  h.payload_offset = 64;
  h.payload_len = len;
  h.result_offset = 0;
  h.result_capacity = std::max<std::uint32_t>(len, 64);
  h.generation = static_cast<std::uint32_t>(seq);
  return h;
}

client::ClientSession connect(const std::string& name, Mode mode) {
  client::ClientConfig cc;
  cc.server_name = name;
  cc.mode = mode;
  return client::ClientSession::connect(cc);
}

}  // namespace

TEST_SUITE("runtime") {
  TEST_CASE("injection policy table and precedence") {
    InjectionPolicy p;
    CHECK(resolve_injection(p, Mode::Sync, 1, InjectionHint::Default));
    CHECK(resolve_injection(p, Mode::Sync, 3, InjectionHint::Default));
    CHECK(resolve_injection(p, Mode::Async, 1, InjectionHint::Default));
    CHECK_FALSE(resolve_injection(p, Mode::Async, 2, InjectionHint::Default));
    CHECK_FALSE(resolve_injection(p, Mode::Pipeline, 1, InjectionHint::Default));
    CHECK(resolve_injection(p, Mode::Pipeline, 1, InjectionHint::On));
    CHECK_FALSE(resolve_injection(p, Mode::Sync, 1, InjectionHint::Off));
    CHECK(parse_injection_rule("single-client") == InjectionRule::SingleClientOnly);
    CHECK(to_string(InjectionRule::Off) == "off");
  }

  TEST_CASE("built-in handlers") {
    auto reg = HandlerRegistry::with_builtins();
    CHECK(reg.size() == 3);
    const auto* echo = reg.find(kOpEcho);
    const auto* sum = reg.find(kOpChecksum);
    const auto* syn = reg.find(kOpSynthetic);
    REQUIRE(echo);
    REQUIRE(sum);
    REQUIRE(syn);
    CHECK(echo->name == "echo");
    CHECK(syn->stage_costs.has_value());
    std::vector<std::byte> ones(1024, std::byte{1});
    std::array<std::byte, 64> scratch{};
    auto out = sum->execute(ones, scratch);
    CHECK(decode_u64(out) == 1024);
    auto same = echo->execute(ones, scratch);
    CHECK(same.data() == ones.data());
    CHECK(byte_sum(std::vector<std::byte>{std::byte{255}, std::byte{2}}) == 257);
    CHECK(decode_u64(encode_u64(0x0102030405060708ULL)) == 0x0102030405060708ULL);
    CHECK(static_cast<int>(encode_u64(1)[0]) == 1);
    CHECK_THROWS_AS(decode_u64(std::vector<std::byte>(7)), Error);
    CHECK_THROWS_AS(reg.add({kOpEcho, "other", echo->execute, {}}), Error);
    CHECK_THROWS_AS(reg.add({0x40, "echo", echo->execute, {}}), Error);
    CHECK_FALSE(reg.find(0xffff));
  }

  TEST_CASE("job ids and states") {
    const JobId id = make_job_id(5, 77);
    CHECK(job_client(id) == 5);
    CHECK(job_sequence(id) == 77);
    JobRecord job;
    CHECK(job.advance(JobState::CopyingIn));
    CHECK(job.advance(JobState::Executing));
    CHECK_FALSE(job.advance(JobState::CopyingIn));
    CHECK(job.advance(JobState::Done));
    CHECK_FALSE(job.advance(JobState::Failed));
    CHECK(job.stamps[static_cast<int>(JobState::Done)] >= job.stamps[static_cast<int>(JobState::CopyingIn)]);
    JobRecord other;
    CHECK(other.advance(JobState::Failed));
    CHECK_FALSE(other.advance(JobState::Done));
  }

  TEST_CASE("job table evicts only finished jobs") {
    JobTable table(2);
    std::vector<std::shared_ptr<JobRecord>> jobs;
    for (int i = 0; i < 4; ++i) {
      auto j = std::make_shared<JobRecord>();
      j->id = make_job_id(1, i + 1);
      j->client_id = 1;
      jobs.push_back(j);
    }
    table.insert(jobs[0]);
    table.insert(jobs[1]);
    table.insert(jobs[2]);
    CHECK(table.size() == 3);  // nothing finished yet
    jobs[0]->advance(JobState::Done);
    table.insert(jobs[3]);
    CHECK(table.size() == 3);
    CHECK_FALSE(table.find(jobs[0]->id));
    CHECK(table.find(jobs[3]->id));
    table.forget_client(1);
    CHECK(table.size() == 0);
  }

  TEST_CASE("server config validation") {
    ServerConfig c;
    CHECK_NOTHROW(c.validate());
    c.batch_max = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.worker_threads = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.ring_capacity = 48;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.name = "a/b";
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    CHECK(c.sim_config().l_fixed_us == c.profile.l_fixed_us);
  }

  TEST_CASE("server lifecycle and name collision") {
    auto cfg = small_config();
    Server a(cfg);
    a.start();
    CHECK(a.running());
    Server b(cfg);
    try {
      b.start();
      FAIL("second server with the same name started");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NameCollision);
    }
    a.stop();
    a.stop();
    CHECK_FALSE(a.running());
    Server c(cfg);
    CHECK_NOTHROW(c.start());
  }

  TEST_CASE("echo and checksum through the server") {
    auto cfg = small_config();
    Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Sync);
    const auto data = random_bytes(1 << 20, 3);
    CHECK(s.request_sync("echo", data) == data);
    std::vector<std::byte> ones(1024, std::byte{1});
    CHECK(decode_u64(s.request_sync("checksum", ones)) == 1024);
    CHECK(s.request_sync("echo", std::span<const std::byte>{}).empty());
    const auto st = server.stats();
    CHECK(st.jobs_done == 3);
    CHECK(st.offload_copies >= 2);  // the 1 MiB request in and out
  }

  TEST_CASE("small payloads stay on the cpu path") {
    auto cfg = small_config();
    Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Sync);
    const auto data = random_bytes(2048, 4);
    CHECK(s.request_sync("echo", data) == data);
    CHECK(server.engine_counters().submitted == 0);
    CHECK(server.stats().cpu_copies == 2);
  }

  TEST_CASE("sync injection is visible in the engine touch counter") {
    auto cfg = small_config();
    Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Sync);
    const auto data = random_bytes(1 << 20, 5);
    s.request_sync("echo", data);
    CHECK(server.engine_counters().touched_lines > 0);
  }

  TEST_CASE("unknown op and malformed headers get ERROR replies") {
    auto cfg = small_config();
    Server server(cfg);
    server.start();
    testing::RawClient raw(cfg.name);
    auto h = raw_request(raw, 1, 0xffff, 16);
    raw.send(h);
    auto reply = raw.recv();
    REQUIRE(reply);
    CHECK(reply->kind == MessageKind::Error);
    CHECK(reply->subcode == Subcode::UnknownOp);
    CHECK(reply->job_id == h.job_id);

    auto bad = raw_request(raw, 2, kOpEcho, 16);
    bad.payload_offset = 65;  // misaligned
    raw.send(bad);
    reply = raw.recv();
    REQUIRE(reply);
    CHECK(reply->subcode == Subcode::Malformed);

    auto slot = transport::encode(raw_request(raw, 3, kOpEcho, 16));
    slot[0] = std::byte{0};  // bad magic
    raw.send_slot(slot);
    reply = raw.recv();
    REQUIRE(reply);
    CHECK(reply->kind == MessageKind::Error);
    CHECK(reply->subcode == Subcode::Malformed);

    // The ring advanced past the garbage: a good request still works.
    std::memset(raw.pair.tx_payload().data() + 64, 7, 16);
    raw.send(raw_request(raw, 4, kOpEcho, 16));
    reply = raw.recv();
    REQUIRE(reply);
    CHECK(reply->kind == MessageKind::Response);
    CHECK(reply->payload_len == 16);
    CHECK(raw.pair.rx_payload()[15] == std::byte{7});
  }

  TEST_CASE("query answers NOT_READY, the result, then UNKNOWN for strangers") {
    auto cfg = small_config();
    cfg.batch_timeout_us = 100.0;
    Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Pipeline);
    const auto data = random_bytes(4096, 6);
    client::Overrides slow;
    slow.stages = StageCosts{0, 0, 200'000};  // 200 ms post stage
    const JobId job = s.request_pipeline("synthetic", data, slow);
    CHECK(s.query_result(job).status == client::QueryStatus::NotReady);
    client::QueryResult r;
    const Nanos deadline = now_ns() + 5'000'000'000ULL;
    do {
      precise_sleep_for(5'000'000);
      r = s.query_result(job);
    } while (r.status == client::QueryStatus::NotReady && now_ns() < deadline);
    CHECK(r.status == client::QueryStatus::Ready);
    CHECK(r.bytes == data);
    auto again = s.query_result(job);
    CHECK(again.status == client::QueryStatus::Ready);
    CHECK(again.bytes == data);
    CHECK(s.query_result(1'000'000'000ULL).status == client::QueryStatus::Unknown);
    auto other = connect(cfg.name, Mode::Pipeline);
    CHECK(other.query_result(job).status == client::QueryStatus::Unknown);
  }

  TEST_CASE("a partial batch is flushed on timeout") {
    auto cfg = small_config();
    cfg.batch_max = 8;
    cfg.batch_timeout_us = 20'000.0;
    Server server(cfg);
    server.start();
    auto s = connect(cfg.name, Mode::Pipeline);
    const Nanos t0 = now_ns();
    std::vector<JobId> ids;
    std::vector<std::vector<std::byte>> data;
    for (int i = 0; i < 3; ++i) {
      data.push_back(random_bytes(100'000, 10 + i));
      ids.push_back(s.request_pipeline("echo", data.back()));
    }
    for (int i = 0; i < 3; ++i) {
      CHECK(s.wait_result(ids[i]) == data[i]);
    }
    CHECK(now_ns() - t0 >= 20'000'000);
    CHECK(server.stats().batches == 1);
  }

  TEST_CASE("concurrency counter follows connects and disconnects") {
    auto cfg = small_config();
    Server server(cfg);
    server.start();
    auto a = connect(cfg.name, Mode::Sync);
    {
      auto b = connect(cfg.name, Mode::Sync);
      CHECK(a.active_clients() == 2);
    }
    const Nanos deadline = now_ns() + 2'000'000'000ULL;
    while (a.active_clients() != 1 && now_ns() < deadline) {
      precise_sleep_for(1'000'000);
    }
    CHECK(a.active_clients() == 1);
    CHECK(server.active_clients() == 1);
  }

  TEST_CASE("three clients: per-client FIFO and no job lost") {
    auto cfg = small_config();
    Server server(cfg);
    server.start();
    constexpr int kPerClient = 150;
    std::vector<std::thread> threads;
    std::atomic<int> failures{0};
    for (int c = 0; c < 3; ++c) {
      threads.emplace_back([&, c] {
        try {
          auto s = connect(cfg.name, Mode::Async);
          std::deque<std::pair<client::ResponseFuture, std::vector<std::byte>>> window;
          JobId last = 0;
          for (int i = 0; i < kPerClient || !window.empty();) {
            while (i < kPerClient && window.size() < 4) {
              auto d = random_bytes(1000 + static_cast<std::size_t>(i) * 997 % 200'000, c * 1000 + i);
              auto f = s.request_async("echo", d);
              window.emplace_back(std::move(f), std::move(d));
              ++i;
            }
            auto& [f, d] = window.front();
            if (f.get() != d || f.job_id() <= last) {
              ++failures;
            }
            last = f.job_id();
            window.pop_front();
          }
        } catch (...) {
          ++failures;
        }
      });
    }
    for (auto& t : threads) {
      t.join();
    }
    CHECK(failures == 0);
    const auto st = server.stats();
    CHECK(st.requests == 3 * kPerClient);
    CHECK(st.jobs_done + st.jobs_failed == st.requests);
  }

  TEST_CASE("handler failure becomes an ERROR") {
    auto cfg = small_config();
    auto reg = HandlerRegistry::with_builtins();
    reg.add({0x40, "explode", [](std::span<const std::byte>, std::span<std::byte>) -> std::span<const std::byte> {
               throw std::runtime_error("boom");
             },
             {}});
    static const std::vector<std::byte> big(4096);
    reg.add({0x41, "grow", [](std::span<const std::byte>, std::span<std::byte>) {
               return std::span<const std::byte>(big);
             },
             {}});
    Server server(cfg, reg);
    server.start();
    auto s = connect(cfg.name, Mode::Sync);
    const auto data = random_bytes(256, 9);
    try {
      s.request_sync("explode", data);
      FAIL("expected ServerError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ServerError);
    }
    client::Overrides tight;
    tight.result_capacity = 256;
    CHECK_THROWS_AS(s.request_sync("grow", data, tight), Error);
    CHECK(s.request_sync("echo", data) == data);
    CHECK(server.stats().jobs_failed == 2);
  }
}
